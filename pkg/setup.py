"""Builds the optional compiled kernel extension.

The package works without it (pure-Python fallback); the build is skipped
gracefully when Cython or a C compiler is unavailable.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/revrec/_kernels/_native.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
