"""Seeded instance generators whose hypotheses hold by construction."""

from __future__ import annotations

import numpy as np

from .errors import DimMismatch
from .gbessel import OpSequence, TailLaw, complex_gaussian, haar_unitary, random_invertible, random_onb
from .linalg import adjoint
from .multiplier import MultiplierSpec, WeightSeq


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_weights(rng, n: int, class_tag: str = "linf", scale: float = 1.0) -> WeightSeq:
    return WeightSeq(scale * complex_gaussian(rng, n), class_tag)


def geometric_weights(rng, n: int, ratio: float = 0.5) -> WeightSeq:
    """lam_n = c_n r^n with unimodular c_n, tagged c0 with the matching tail."""
    phases = np.exp(2j * np.pi * rng.uniform(size=n))
    return WeightSeq(phases * ratio ** np.arange(1, n + 1), "c0", TailLaw("geometric", ratio))


def random_vectors(rng, n: int, d0: int) -> np.ndarray:
    return complex_gaussian(rng, n, d0)


def orthogonal_sequence(rng, d: int, d0: int, n: int) -> OpSequence:
    """A_n A_m^* = delta_nm I: disjoint row blocks of a Haar unitary (needs n d0 <= d)."""
    if n * d0 > d:
        raise DimMismatch(f"an orthogonal sequence of {n} blocks of {d0} rows needs d >= {n * d0}")
    w = haar_unitary(d, rng)
    return OpSequence(w[: n * d0].reshape(n, d0, d))


def random_spec(seed, d: int, d0: int, n: int, class_tag: str = "linf") -> MultiplierSpec:
    rng = _rng(seed)
    a = OpSequence(complex_gaussian(rng, n, d0, d))
    b = OpSequence(complex_gaussian(rng, n, d0, d))
    return MultiplierSpec(random_weights(rng, n, class_tag), a, b, random_vectors(rng, n, d0),
                          random_vectors(rng, n, d0))


def orthogonal_spec(seed, d: int, d0: int, n: int, class_tag: str = "linf",
                    b_orthogonal: bool = False) -> MultiplierSpec:
    """A orthogonal (rows of a Haar unitary); B orthogonal too when requested."""
    rng = _rng(seed)
    a = orthogonal_sequence(rng, d, d0, n)
    b = orthogonal_sequence(rng, d, d0, n) if b_orthogonal else OpSequence(complex_gaussian(rng, n, d0, d))
    return MultiplierSpec(random_weights(rng, n, class_tag), a, b, random_vectors(rng, n, d0),
                          random_vectors(rng, n, d0))


def normal_spec(seed, d: int, d0: int, n: int) -> MultiplierSpec:
    """A = B orthogonal and x = y."""
    rng = _rng(seed)
    a = orthogonal_sequence(rng, d, d0, n)
    x = random_vectors(rng, n, d0)
    return MultiplierSpec(random_weights(rng, n), a, a, x, x)


def realize(targets, vecs, rng) -> OpSequence:
    """Operators with A_n^* x_n = targets[n]; the rest of each A_n^* is random.

    A_n^* = t_n x_n^* / ||x_n||^2 + G_n (I - x_n x_n^* / ||x_n||^2).
    """
    targets = np.asarray(targets, dtype=np.complex128)
    vecs = np.asarray(vecs, dtype=np.complex128)
    n, d = targets.shape
    d0 = vecs.shape[1]
    ops = np.empty((n, d0, d), dtype=np.complex128)
    for k in range(n):
        xk = vecs[k]
        nn = float(np.vdot(xk, xk).real)
        proj = np.outer(xk, np.conj(xk)) / nn
        g = complex_gaussian(rng, d, d0)
        adj = np.outer(targets[k], np.conj(xk)) / nn + g @ (np.eye(d0) - proj)
        ops[k] = adjoint(adj)
    return OpSequence(ops)


def _biorthogonal_vectors(rng, d: int, n: int):
    """Rows u_n, v_n of C^d with <u_k, v_n> = 0 for k != n and <u_n, v_n> != 0.

    Built from one Haar basis q: v_n = c_n q_n and u_n = q_n + w_n, where w_n
    lies in the span of the unused basis vectors q_{N+1}, ..., q_d.
    """
    if n > d:
        raise DimMismatch(f"biorthogonal data needs N <= d, got N = {n}, d = {d}")
    q = haar_unitary(d, rng).T  # rows form an orthonormal basis
    coef = complex_gaussian(rng, n, d - n)
    u = q[:n] + coef @ q[n:]
    v = complex_gaussian(rng, n)[:, None] * q[:n]
    return u, v


def biorthogonal_spec(seed, d: int, d0: int, n: int) -> MultiplierSpec:
    """<A_k^* x_k, B_n^* y_n> = 0 for k != n, realized through random operators."""
    rng = _rng(seed)
    u, v = _biorthogonal_vectors(rng, d, n)
    x = random_vectors(rng, n, d0)
    y = random_vectors(rng, n, d0)
    return MultiplierSpec(random_weights(rng, n), realize(u, x, rng), realize(v, y, rng), x, y)


def product_pair(seed, d: int, d0: int, n: int):
    """(s1, s2) with <C_k^* z_k, B_n^* y_n> = 0 for k != n, where s2 = (mu, C, D, z, v)."""
    rng = _rng(seed)
    cz, by = _biorthogonal_vectors(rng, d, n)
    x, y, z, w = (random_vectors(rng, n, d0) for _ in range(4))
    a = OpSequence(complex_gaussian(rng, n, d0, d))
    dd = OpSequence(complex_gaussian(rng, n, d0, d))
    s1 = MultiplierSpec(random_weights(rng, n), a, realize(by, y, rng), x, y)
    s2 = MultiplierSpec(random_weights(rng, n), realize(cz, z, rng), dd, z, w)
    return s1, s2


def riesz_spec(seed, d0: int, n: int, max_cond: float = 100.0, class_tag: str = "linf"):
    """(spec, T0) with A an orthonormal basis and B = A T0, cond(T0) <= max_cond."""
    rng = _rng(seed)
    a = random_onb(d0, n, rng)
    t0 = random_invertible(n * d0, rng, max_cond)
    b = a.right_multiply(t0)
    spec = MultiplierSpec(random_weights(rng, n, class_tag), a, b, random_vectors(rng, n, d0),
                          random_vectors(rng, n, d0))
    return spec, t0


def random_square(rng, d: int, rank: int | None = None, scale: float = 1.0) -> np.ndarray:
    """Complex Gaussian matrix, optionally of a prescribed rank (rank 0 gives zero)."""
    if rank is None or rank >= d:
        return scale * complex_gaussian(rng, d, d)
    return scale * complex_gaussian(rng, d, rank) @ complex_gaussian(rng, rank, d)


def block_operators(rng, n: int, d0: int, scale: float = 1.0) -> np.ndarray:
    """(n, d0, d0) stack of random operators on H0."""
    return scale * complex_gaussian(rng, n, d0, d0)
