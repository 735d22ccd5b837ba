"""Pure-numpy implementations of the hot loops.

Signatures mirror ``_ckernels``; arrays must be C-contiguous complex128.
"""

import numpy as np


def rank_one_sum(lam, u, v):
    """sum_n lam[n] * outer(u[n], conj(v[n])) for u, v of shape (N, d)."""
    return (u * lam[:, None]).T @ np.conj(v)


def gram_sum(ops):
    """sum_n ops[n]^H ops[n] for ops of shape (N, d0, d)."""
    n, d0, d = ops.shape
    stacked = ops.reshape(n * d0, d)
    return np.conj(stacked).T @ stacked


def adjoint_apply(ops, vecs):
    """Row n is ops[n]^H vecs[n]; ops (N, d0, d), vecs (N, d0)."""
    return np.einsum("nab,na->nb", np.conj(ops), vecs)


def membership_residuals(a, theta, fops, probes):
    """Largest residuals of the two intertwining families over elementary U, V.

    With U = e_i e_j^T and V = e_k e_l^T the first family reads
    theta(F_m V^* A^* U^* p_n) = F_n U A V p_m and the second swaps A and A^*
    on the two sides. Returns (max residual family 1, max residual family 2).
    """
    n_terms, d0, d = fops.shape
    ac = np.conj(a)
    worst1 = 0.0
    worst2 = 0.0
    for n in range(n_terms):
        pn = probes[n]
        for m in range(n_terms):
            fm_cols = fops[m].T  # (d, d0), column l of F_m
            fn_cols = fops[n].T
            pm = probes[m]
            # V^* A^* U^* p_n = p_n[i] conj(A[j, k]) e_l ; then F_m e_l ; then theta
            w1 = pn[:, None, None] * ac[None, :, :]  # (i, j, k)
            lhs1 = np.conj(w1)[..., None, None] * (np.conj(fm_cols) @ theta.T)[None, None, None, :, :]
            # F_n U A V p_m = A[j, k] p_m[l] F_n e_i
            rhs1 = a[None, :, :, None, None] * (pm[:, None] * np.ones((1, d0)))[None, None, None, :, :] \
                * fn_cols[:, None, None, None, :]
            r1 = np.abs(lhs1 - rhs1)
            # second family: A and A^* exchanged
            w2 = pn[:, None, None] * a.T[None, :, :]
            lhs2 = np.conj(w2)[..., None, None] * (np.conj(fm_cols) @ theta.T)[None, None, None, :, :]
            rhs2 = ac.T[None, :, :, None, None] * (pm[:, None] * np.ones((1, d0)))[None, None, None, :, :] \
                * fn_cols[:, None, None, None, :]
            r2 = np.abs(lhs2 - rhs2)
            if r1.size:
                worst1 = max(worst1, float(np.sqrt(np.max(np.sum(r1 * r1, axis=-1)))))
                worst2 = max(worst2, float(np.sqrt(np.max(np.sum(r2 * r2, axis=-1)))))
    return worst1, worst2
