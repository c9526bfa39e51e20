# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled similarity kernels. Same contracts as pure.py."""

from libc.math cimport sqrt

BACKEND = "native"


def cosine(dict a, dict b):
    if not a or not b:
        return 0.0
    if len(b) < len(a):
        a, b = b, a
    cdef double dot = 0.0
    cdef double norm_a = 0.0
    cdef double norm_b = 0.0
    cdef double ca, cb
    for token, count in a.items():
        ca = count
        norm_a += ca * ca
        other = b.get(token)
        if other is not None:
            dot += ca * <double> other
    if dot == 0.0:
        return 0.0
    for count in b.values():
        cb = count
        norm_b += cb * cb
    cdef double value = dot / (sqrt(norm_a) * sqrt(norm_b))
    return 1.0 if value > 1.0 else value


def fps_mean(list paths_a, list paths_b):
    cdef Py_ssize_t na = len(paths_a)
    cdef Py_ssize_t nb = len(paths_b)
    if na == 0 or nb == 0:
        return 0.0
    cdef double total = 0.0
    cdef Py_ssize_t i, j, shared, la, lb, limit
    cdef tuple fa, fb
    for i in range(na):
        fa = <tuple> paths_a[i]
        la = len(fa)
        for j in range(nb):
            fb = <tuple> paths_b[j]
            lb = len(fb)
            limit = la if la < lb else lb
            shared = 0
            while shared < limit and fa[shared] == fb[shared]:
                shared += 1
            total += shared / <double> (la if la > lb else lb)
    return total / <double> (na * nb)
