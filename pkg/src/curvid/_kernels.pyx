# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled permutation-pair kernels.  Mirrors ``curvid._fallback`` exactly."""

import numpy as np


def pfaffian_sum(const double[:, :, :, ::1] R,
                 const int[:, ::1] tuples,
                 const int[:, ::1] perms,
                 const int[::1] signs,
                 bint tail):
    """Sum sign(p) * prod_k R[I2k, I2k+1, J2k+1, J2k] over tuples I and perms p, J = I[p].

    With ``tail`` the last slot of I and J is left free and the sum is
    accumulated into an m x m matrix at [I[-1], J[-1]].
    """
    cdef Py_ssize_t m = R.shape[0]
    cdef Py_ssize_t ntup = tuples.shape[0]
    cdef Py_ssize_t L = tuples.shape[1]
    cdef Py_ssize_t nperm = perms.shape[0]
    cdef Py_ssize_t nfac = (L - 1) // 2 if tail else L // 2
    cdef Py_ssize_t t, p, k
    cdef int I[16]
    cdef int J[16]
    cdef double prod, total = 0.0
    out_arr = np.zeros((m, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    if L > 16:
        raise ValueError("tuple length above 16 is not supported")
    for t in range(ntup):
        for k in range(L):
            I[k] = tuples[t, k]
        for p in range(nperm):
            for k in range(L):
                J[k] = I[perms[p, k]]
            prod = signs[p]
            for k in range(nfac):
                prod *= R[I[2 * k], I[2 * k + 1], J[2 * k + 1], J[2 * k]]
                if prod == 0.0:
                    break
            if tail:
                out[I[L - 1], J[L - 1]] += prod
            else:
                total += prod
    if tail:
        return out_arr
    return total
