# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot loops in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_blas cimport zgemm

cnp.import_array()

ctypedef double complex cplx


cdef inline double abs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


def rank_one_sum(const cplx[::1] lam, const cplx[:, ::1] u, const cplx[:, ::1] v):
    # out = W^T conj(V) with W = diag(lam) U; row-major out is the column-major
    # product conj(V)^T W, one zgemm call
    cdef int n_terms = <int>u.shape[0], d_out = <int>u.shape[1], d_in = <int>v.shape[1]
    out = np.zeros((d_out, d_in), dtype=np.complex128)
    if n_terms == 0 or d_out == 0 or d_in == 0:
        return out
    w_arr = np.asarray(lam)[:, None] * np.asarray(u)
    p_arr = np.conj(np.asarray(v))
    cdef const cplx[:, ::1] w = w_arr
    cdef const cplx[:, ::1] p = p_arr
    cdef cplx[:, ::1] o = out
    cdef cplx one = 1.0, zero = 0.0
    zgemm(b"N", b"T", &d_in, &d_out, &n_terms, &one, <cplx*>&p[0, 0], &d_in, <cplx*>&w[0, 0], &d_out, &zero, &o[0, 0], &d_in)
    return out


def gram_sum(const cplx[:, :, ::1] ops):
    # sum_n A_n^* A_n = X^H X for the stacked (N d0, d) matrix X
    cdef int q = <int>(ops.shape[0] * ops.shape[1]), d = <int>ops.shape[2]
    out = np.zeros((d, d), dtype=np.complex128)
    if q == 0 or d == 0:
        return out
    x_arr = np.ascontiguousarray(np.asarray(ops).reshape(q, d))
    cdef const cplx[:, ::1] x = x_arr
    cdef cplx[:, ::1] o = out
    cdef cplx one = 1.0, zero = 0.0
    zgemm(b"N", b"C", &d, &d, &q, &one, <cplx*>&x[0, 0], &d, <cplx*>&x[0, 0], &d, &zero, &o[0, 0], &d)
    return out


def adjoint_apply(const cplx[:, :, ::1] ops, const cplx[:, ::1] vecs):
    cdef Py_ssize_t n_terms = ops.shape[0], d0 = ops.shape[1], d = ops.shape[2]
    out = np.zeros((n_terms, d), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    cdef Py_ssize_t n, r, j
    with nogil:
        for n in range(n_terms):
            for r in range(d0):
                for j in range(d):
                    o[n, j] = o[n, j] + ops[n, r, j].conjugate() * vecs[n, r]
    return out


def membership_residuals(const cplx[:, ::1] a, const cplx[:, ::1] theta,
                         const cplx[:, :, ::1] fops, const cplx[:, ::1] probes):
    cdef Py_ssize_t n_terms = fops.shape[0], d0 = fops.shape[1], d = fops.shape[2]
    # thf[m, l, :] = theta @ conj(F_m[:, l]), reused across (n, i, j, k)
    thf_arr = np.ascontiguousarray(
        np.einsum("ab,mbl->mla", np.asarray(theta), np.conj(np.asarray(fops))))
    cdef const cplx[:, :, ::1] thf = thf_arr
    cdef Py_ssize_t n, m, i, j, k, l, c
    cdef cplx s1, s2, t1, t2, r1, r2
    cdef double acc1, acc2, worst1 = 0.0, worst2 = 0.0
    with nogil:
        for n in range(n_terms):
            for m in range(n_terms):
                for i in range(d):
                    for j in range(d):
                        for k in range(d):
                            # theta(s * f) = conj(s) * theta(f)
                            s1 = (probes[n, i] * a[j, k].conjugate()).conjugate()
                            s2 = (probes[n, i] * a[k, j]).conjugate()
                            t1 = a[j, k]
                            t2 = a[k, j].conjugate()
                            for l in range(d):
                                acc1 = 0.0
                                acc2 = 0.0
                                for c in range(d0):
                                    r1 = s1 * thf[m, l, c] - t1 * probes[m, l] * fops[n, c, i]
                                    r2 = s2 * thf[m, l, c] - t2 * probes[m, l] * fops[n, c, i]
                                    acc1 = acc1 + abs2(r1)
                                    acc2 = acc2 + abs2(r2)
                                if acc1 > worst1:
                                    worst1 = acc1
                                if acc2 > worst2:
                                    worst2 = acc2
    return sqrt(worst1), sqrt(worst2)
