# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tree kernels; same contract as ``_pykernels``."""
import numpy as np

cdef double SQRT2 = 1.4142135623730951


def schur_sweep(v, zetas):
    cdef double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef double complex[::1] zz = np.ascontiguousarray(np.atleast_1d(zetas), dtype=np.complex128)
    cdef Py_ssize_t n = vv.shape[0], m = zz.shape[0]
    if n < 1 or (n + 1) & n:
        raise ValueError(f"{n} is not a ball size")
    cdef Py_ssize_t first_leaf = (n - 1) // 2
    L = np.empty(m, dtype=np.complex128)
    g0 = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] Lv = L
    cdef double complex[::1] gv = g0
    cdef double complex[::1] d = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t i, j
    cdef double complex zeta, z, leaf_shift, scale, di, ratio
    with nogil:
        for j in range(m):
            zeta = zz[j]
            z = SQRT2 * (zeta + 1.0 / zeta)
            leaf_shift = z - SQRT2 * zeta
            scale = -zeta / SQRT2
            ratio = 1.0
            for i in range(n - 1, -1, -1):
                if i >= first_leaf:
                    di = vv[i] - leaf_shift
                else:
                    di = vv[i] - z - 1.0 / d[2 * i + 1] - 1.0 / d[2 * i + 2]
                d[i] = di
                ratio = ratio * (di * scale)
            Lv[j] = ratio
            gv[j] = 1.0 / d[0]
    return L, g0
