"""Similarity kernels: compiled extension when built, pure Python otherwise.

Set REVREC_PURE_KERNELS=1 to force the pure backend (used by the benchmark
and by tests that compare the two implementations).
"""

import os

if os.environ.get("REVREC_PURE_KERNELS") == "1":
    from . import pure as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import pure as _impl

BACKEND = _impl.BACKEND
cosine = _impl.cosine
fps_mean = _impl.fps_mean
