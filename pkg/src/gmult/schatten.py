"""Generalized Hilbert-Schmidt and trace classes attached to a context (theta, F, x).

A context fixes a conjugate-linear isometry ``theta`` on H0, an operator-valued
orthonormal basis ``F`` and vectors ``x_n`` in H0. Everything is probed through
the vectors ``p_n = F_n^* x_n`` in H. Membership is decided by evaluating both
intertwining families on elementary operators U = e_i e_j^T, V = e_k e_l^T;
both families are (anti)linear in U and V separately, so this finite sweep is
exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .errors import DimMismatch, NotOrthonormalBasis, NotTraceClass
from .gbessel import OpSequence, classify, haar_unitary, random_onb, std_sequence
from .linalg import (
    ConjLinearIsometry,
    abs_op,
    adjoint,
    as_matrix,
    frobenius_norm,
    matrix_from_json,
    matrix_to_json,
    operator_norm,
    sqrt_psd,
    tolerance,
    vector_from_json,
    vector_to_json,
)
from .report import Recorder, VerificationReport

# -- contexts -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GhsContext:
    theta: ConjLinearIsometry
    f: OpSequence
    x: np.ndarray  # (N, d0)

    def __post_init__(self):
        x = np.array(self.x, dtype=np.complex128)
        if x.shape != (self.f.n, self.f.d0):
            raise DimMismatch(f"x must have shape {(self.f.n, self.f.d0)}, got {x.shape}")
        if self.theta.dim != self.f.d0:
            raise DimMismatch(f"theta acts on dim {self.theta.dim}, F maps into dim {self.f.d0}")
        if not classify(self.f).is_orthonormal_basis:
            raise NotOrthonormalBasis("F must be an operator-valued orthonormal basis")
        x.flags.writeable = False
        object.__setattr__(self, "x", x)

    @property
    def d(self) -> int:
        return self.f.d

    @property
    def n(self) -> int:
        return self.f.n

    @cached_property
    def probes(self) -> np.ndarray:
        """Rows p_n = F_n^* x_n."""
        p = self.f.adjoint_apply(self.x)
        p.flags.writeable = False
        return p

    @cached_property
    def admissible_basis(self) -> tuple:
        return tuple(_solve_admissible(self))

    def to_json(self) -> dict:
        return {
            "theta": matrix_to_json(self.theta.theta_matrix),
            "F": self.f.to_json(),
            "x": [vector_to_json(v) for v in self.x],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GhsContext":
        return cls(ConjLinearIsometry(matrix_from_json(obj["theta"])), OpSequence.from_json(obj["F"]),
                   np.stack([vector_from_json(v) for v in obj["x"]]))


def std_context(d: int) -> GhsContext:
    """Coordinate functionals, x_n = 1 and plain conjugation."""
    if d < 1:
        raise DimMismatch("d must be positive")
    return GhsContext(ConjLinearIsometry.conjugation(1), std_sequence(d), np.ones((d, 1)))


def unitary_conjugate_context(d: int, seed=None, radius: float = 1.0) -> GhsContext:
    """Scalar-valued context with Haar-random F, theta = e^{i phi} conj(.), x_n = r e^{i phi/2}.

    The phase of ``theta`` and of the constant ``x_n`` are locked together, so
    the intertwining conditions hold for every operator while F, theta and x
    all differ from the coordinate context.
    """
    rng = np.random.default_rng(seed)
    w = haar_unitary(d, rng)
    phi = float(rng.uniform(0.0, 2.0 * np.pi))
    theta = ConjLinearIsometry(np.array([[np.exp(1j * phi)]]))
    x = np.full((d, 1), radius * np.exp(0.5j * phi))
    return GhsContext(theta, OpSequence(w.reshape(d, 1, d)), x)


def random_context(d0: int, n_terms: int, seed=None) -> GhsContext:
    """Haar theta and F with Gaussian x; its admissible subspace is typically {0}."""
    rng = np.random.default_rng(seed)
    f = random_onb(d0, n_terms, rng)
    theta = ConjLinearIsometry(haar_unitary(d0, rng))
    x = rng.standard_normal((n_terms, d0)) + 1j * rng.standard_normal((n_terms, d0))
    return GhsContext(theta, f, x)


# -- membership ---------------------------------------------------------------


@dataclass(frozen=True)
class MembershipVerdict:
    is_member: bool
    max_residual_cond1: float
    max_residual_cond2: float
    sigma_value: float
    tolerance: float
    star_residual: float | None = None


def _check_square(ctx: GhsContext, a) -> np.ndarray:
    a = as_matrix(a, "a")
    if a.shape != (ctx.d, ctx.d):
        raise DimMismatch(f"operator must be {ctx.d}x{ctx.d}, got {a.shape}")
    return a


def membership_tolerance(ctx: GhsContext, a, rtol: float = 1e-9) -> float:
    pmax = float(np.max(np.linalg.norm(ctx.probes, axis=1))) if ctx.n else 0.0
    return tolerance(frobenius_norm(a) * max(1.0, pmax), rtol)


def is_member(ctx: GhsContext, a, tol: float | None = None) -> MembershipVerdict:
    a = _check_square(ctx, a)
    r1, r2 = kernels.membership_residuals(a, ctx.theta.theta_matrix, ctx.f.ops, ctx.probes)
    if tol is None:
        tol = membership_tolerance(ctx, a)
    return MembershipVerdict(bool(r1 <= tol and r2 <= tol), r1, r2, sigma(ctx, a), tol)


def direct_residual(ctx: GhsContext, a, u, v) -> tuple[float, float]:
    """Both condition families evaluated at one explicit pair (U, V)."""
    a, u, v = (np.asarray(m, dtype=np.complex128) for m in (a, u, v))
    th = ctx.theta.theta_matrix
    f, p = ctx.f.ops, ctx.probes
    r1 = r2 = 0.0
    for n in range(ctx.n):
        for m in range(ctx.n):
            lhs1 = th @ np.conj(f[m] @ adjoint(v) @ adjoint(a) @ adjoint(u) @ p[n])
            rhs1 = f[n] @ u @ a @ v @ p[m]
            lhs2 = th @ np.conj(f[m] @ adjoint(v) @ a @ adjoint(u) @ p[n])
            rhs2 = f[n] @ u @ adjoint(a) @ v @ p[m]
            r1 = max(r1, float(np.linalg.norm(lhs1 - rhs1)))
            r2 = max(r2, float(np.linalg.norm(lhs2 - rhs2)))
    return r1, r2


def constraint_kernel(ctx: GhsContext) -> np.ndarray:
    """K[n, m, i, l] in H0 with residuals A_jk K and conj(A_kj) K at U = e_i e_j^T, V = e_k e_l^T."""
    th = ctx.theta.theta_matrix
    f = ctx.f.ops  # (N, d0, d)
    p = ctx.probes  # (N, d)
    thf = np.einsum("ab,mbl->mla", th, np.conj(f))  # theta(F_m e_l)
    left = np.conj(p)[:, None, :, None, None] * thf[None, :, None, :, :]
    right = np.transpose(f, (0, 2, 1))[:, None, :, None, :] * p[None, :, None, :, None]
    return left - right


def _solve_admissible(ctx: GhsContext, rtol: float = 1e-8) -> list:
    """Frobenius-orthonormal basis of the admissible subspace.

    Unknowns are the 2 d^2 real coordinates (Re A_ab, Im A_ab). The residual of
    direction c E_ab only populates the rows with (j, k) = (a, b) in the first
    family and (k, j) = (a, b) in the second, so the real Gram matrix of the
    constraint map is block diagonal with one 2x2 block per entry.
    """
    d = ctx.d
    k = constraint_kernel(ctx).reshape(-1)
    basis_real = []
    for a_idx in range(d):
        for b_idx in range(d):
            cols = []
            for c in (1.0, 1j):
                r1 = c * k  # first family, linear in A
                r2 = np.conj(c) * k  # second family, antilinear in A
                res = np.concatenate([r1, r2])
                cols.append(np.concatenate([res.real, res.imag]))
            r = np.stack(cols, axis=1)
            g = r.T @ r
            w, v = np.linalg.eigh(g)
            smax = float(np.sqrt(max(w[-1], 0.0)))
            cut = rtol * max(1.0, smax)
            for idx in range(2):
                if np.sqrt(max(w[idx], 0.0)) <= cut:
                    e = np.zeros((d, d), dtype=np.complex128)
                    e[a_idx, b_idx] = v[0, idx] + 1j * v[1, idx]
                    basis_real.append(e)
    if not basis_real:
        return []
    stacked = np.stack([e.reshape(-1) for e in basis_real], axis=1)
    u, s, _ = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * s[0]))
    # deterministic orientation: make the largest entry of each basis vector real positive
    out = []
    for j in range(rank):
        col = u[:, j]
        piv = int(np.argmax(np.abs(col)))
        col = col * (np.abs(col[piv]) / col[piv])
        out.append(col.reshape(d, d))
    return out


def admissible_subspace(ctx: GhsContext) -> list:
    return [b.copy() for b in ctx.admissible_basis]


def project_admissible(ctx: GhsContext, a) -> np.ndarray:
    a = _check_square(ctx, a)
    out = np.zeros_like(a)
    for b in ctx.admissible_basis:
        out += np.vdot(b, a) * b
    return out


def random_member(ctx: GhsContext, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    basis = ctx.admissible_basis
    if not basis:
        return np.zeros((ctx.d, ctx.d), dtype=np.complex128)
    c = (rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))) / np.sqrt(2.0)
    out = np.tensordot(c, np.stack(basis), axes=1)
    return scale * out / np.sqrt(ctx.d)


# -- seminorm, inner product, trace -------------------------------------------


def sigma(ctx: GhsContext, a) -> float:
    ap = ctx.probes @ np.asarray(a).T  # rows a p_n
    return float(np.sqrt(np.sum(np.abs(ap) ** 2)))


def ghs_inner(ctx: GhsContext, a, b) -> complex:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape or a.shape != (ctx.d, ctx.d):
        raise DimMismatch("operators must both be d x d")
    ap = ctx.probes @ a.T
    bp = ctx.probes @ b.T
    return complex(np.sum(ap * np.conj(bp)))


def trace(ctx: GhsContext, a) -> complex:
    ap = ctx.probes @ np.asarray(a).T
    return complex(np.sum(ap * np.conj(ctx.probes)))


def pframe_lower_constant(ctx: GhsContext, p: float = 2.0) -> float:
    """A constant a with a ||h|| <= (sum |<h, p_n>|^p)^(1/p) for every h.

    For p = 2 this is the exact optimum, the smallest singular value of the
    analysis matrix. For p > 2 the value N^(1/p - 1/2) times the p = 2 optimum
    is returned; it is valid by Hoelder's inequality but need not be optimal
    (see :func:`pframe_mesh_estimate`).
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    rows = np.conj(ctx.probes)
    if rows.shape[0] < ctx.d:
        return 0.0
    a2 = float(np.linalg.svd(rows, compute_uv=False)[-1])
    if p == 2:
        return a2
    return ctx.n ** (1.0 / p - 0.5) * a2


def pframe_mesh_estimate(ctx: GhsContext, p: float, mesh: int = 256, refine: int = 4, seed: int = 0):
    """(estimate of the optimal p-frame constant, mesh size).

    Minimizes the p-sum over a seeded point set on the unit sphere of C^d and
    polishes the best ``refine`` points locally. The result bounds the
    optimal constant from above.
    """
    d = ctx.d
    rows = np.conj(ctx.probes)

    def value(z):
        h = z[:d] + 1j * z[d:]
        nh = np.linalg.norm(h)
        if nh == 0:
            return np.inf
        return float(np.sum(np.abs(rows @ (h / nh)) ** p) ** (1.0 / p))

    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((mesh, 2 * d))
    vals = np.array([value(z) for z in pts])
    best = float(np.min(vals))
    for idx in np.argsort(vals)[:refine]:
        res = minimize(value, pts[idx], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12})
        best = min(best, float(res.fun))
    return best, mesh


def half_power(a) -> np.ndarray:
    """[A]^{1/2} = ((A^* A)^{1/2})^{1/2}."""
    return sqrt_psd(abs_op(a))


def is_member_trace_class(ctx: GhsContext, a, tol: float | None = None) -> MembershipVerdict:
    """Certificate: [A]^{1/2} lies in the generalized Hilbert-Schmidt class.

    The (*) residual, the first family evaluated at [A]^{1/2}, is reported
    separately; for a self-adjoint operator both families coincide.
    """
    a = _check_square(ctx, a)
    root = half_power(a)
    v = is_member(ctx, root, tol)
    return MembershipVerdict(v.is_member, v.max_residual_cond1, v.max_residual_cond2, v.sigma_value,
                             v.tolerance, star_residual=v.max_residual_cond1)


def tau(ctx: GhsContext, a, tol: float | None = None) -> float:
    v = is_member_trace_class(ctx, a, tol)
    if not v.is_member:
        raise NotTraceClass(f"[A]^(1/2) fails the intertwining conditions (residual "
                            f"{max(v.max_residual_cond1, v.max_residual_cond2):.3e})")
    return float(np.real(trace(ctx, abs_op(a))))


def eigen_operator(ctx: GhsContext, lam) -> np.ndarray:
    """Operator with A p_n = lam_n p_n, zero on the complement of the probes.

    The probes of an orthonormal basis are mutually orthogonal, so this is
    sum_n lam_n p_n p_n^* / ||p_n||^2 over nonzero probes.
    """
    out = np.zeros((ctx.d, ctx.d), dtype=np.complex128)
    for lam_n, pn in zip(np.asarray(lam), ctx.probes):
        nn = float(np.vdot(pn, pn).real)
        if nn > 0:
            out += lam_n * np.outer(pn, np.conj(pn)) / nn
    return out


# -- suites -------------------------------------------------------------------

REF_IDEAL = {
    "homog": "ghs-ideal: sigma(alpha A) = |alpha| sigma(A)",
    "triangle": "ghs-ideal: sigma(A+B) <= sigma(A) + sigma(B)",
    "subspace": "ghs-ideal: class is a complex subspace",
    "adjoint": "ghs-ideal: A* in class and sigma(A*) = sigma(A)",
    "left": "ghs-ideal: TA in class, sigma(TA) <= ||T|| sigma(A)",
    "right": "ghs-ideal: AT in class, sigma(AT) <= ||T|| sigma(A)",
    "pframe": "ghs-ideal: p-frame lower bound gives ||A|| <= sigma(A)/a",
    "order": "ghs-ideal: A*A <= B*B implies sigma(A) <= sigma(B)",
    "modulus": "ghs-ideal: C in class iff [C] in class, sigma(C) = sigma([C])",
    "powers": "ghs-ideal: ||A|| < 1 implies sigma(A^n) <= ||A||^(n-1) sigma(A) -> 0",
    "eigen": "ghs-ideal: eigen-probes give sigma(A)^2 = sum |lam_n|^2 ||x_n||^2",
    "nonmember": "ghs-ideal: sigma(R*) vs sigma(R) for a non-member R (recorded only)",
}

REF_INNER = {
    "positive": "ghs-inner: <A, A> >= 0",
    "definite": "ghs-inner: p-frame lower bound makes <A, A> = 0 force A = 0",
    "linear": "ghs-inner: linear in the first slot",
    "hermitian": "ghs-inner: conj<A, B> = <B, A>",
    "adjoint": "ghs-inner: <A*, B*> = conj<A, B>",
    "shift": "ghs-inner: <TA, B> = <A, T*B> and <AT, B> = <A, BT*>",
    "cauchy": "ghs-inner: |<A, B>| <= sigma(A) sigma(B)",
    "polar": "ghs-inner: polarization through four sigma values",
}

REF_TRACE = {
    "adjoint": "gtrace: Tr(A*) = conj Tr(A)",
    "homog": "gtrace: Tr(alpha A) = alpha Tr(A)",
    "ideal": "gtrace: TA and AT stay trace class",
    "square": "gtrace: Tr(A*A) = sigma(A)^2 = Tr(AA*)",
    "additive": "gtrace: Tr(A+B) = Tr(A) + Tr(B) under the half-power condition",
    "inner": "gtrace: Tr(B*A) = <A, B>",
    "cauchy": "gtrace: |Tr(B*A)| <= Tr(A*A)^(1/2) Tr(B*B)^(1/2)",
    "squarebound": "gtrace: |Tr(A^2)| <= Tr(A*A)",
    "monotone": "gtrace: 0 <= A <= B implies Tr(A) <= Tr(B)",
    "eigen": "gtrace: eigen-probes give Tr(A) = sum lam_n ||x_n||^2",
    "eigenpsd": "gtrace: A >= 0 with eigen-probes and ||x_n|| >= 1 gives sigma(A) <= Tr(A)",
    "cyclic": "gtrace: Tr(TA) = Tr(AT)",
    "modbound": "gtrace: |Tr(T[A])| <= ||T|| tau(A)",
    "taumod": "gtrace: tau([A]) = tau(A)",
    "halfpower": "gtrace: sigma([A]^(1/2))^2 = tau(A)",
}

REF_TAU = {
    "adjoint": "gtau: tau(A*) = tau(A)",
    "homog": "gtau: tau(alpha A) = |alpha| tau(A)",
    "triangle": "gtau: tau(A+B) <= tau(A) + tau(B)",
    "positive": "gtau: tau(A) >= 0",
    "definite": "gtau: p-frame lower bound makes tau(A) = 0 force A = 0",
    "ideal": "gtau: tau(TA), tau(AT) <= ||T|| tau(A)",
    "trace": "gtau: |Tr(A)| <= tau(A)",
    "square": "gtau: sigma(A)^2 <= tau(A*A)",
    "monotone": "gtau: [A] <= [B] implies tau(A) <= tau(B)",
    "powers": "gtau: ||A|| < 1 implies tau(A^n) -> 0",
    "pairing": "gtau: |sum <A p_n, G_n* x_n>| <= tau(A) for a second orthonormal basis G",
}

def _report(rec: Recorder, seed, trials) -> VerificationReport:
    return VerificationReport({"suite": rec.suite, "seed": int(seed), "trials": int(trials)}, rec.records)


_EMPTY = "admissible subspace is {0}; hypothesis has no nonzero instance"


def _cgauss(rng, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _unitary(rng, d) -> np.ndarray:
    return haar_unitary(d, rng)


def ideal_suite(ctx: GhsContext, seed=0, trials: int = 10, rtol: float = 1e-9,
                sigma_fn=None, powers: int = 40) -> VerificationReport:
    """Records for the ideal properties of the generalized Hilbert-Schmidt class.

    ``sigma_fn`` replaces the seminorm, which lets the harness self-test that a
    corrupted seminorm is caught.
    """
    sig = sigma_fn or (lambda a: sigma(ctx, a))
    rec = Recorder("ideal_suite", rtol)
    rng = np.random.default_rng(seed)
    a2 = pframe_lower_constant(ctx, 2.0)
    a4 = pframe_lower_constant(ctx, 4.0)
    trivial = not ctx.admissible_basis
    for t in range(trials):
        a = random_member(ctx, rng)
        b = random_member(ctx, rng)
        tm = _cgauss(rng, ctx.d, ctx.d)
        alpha = complex(_cgauss(rng))
        rec.start(t, a, b, tm, alpha)
        R = REF_IDEAL
        if trivial:
            for key in ("homog", "triangle", "adjoint", "left", "right", "order", "modulus", "powers", "eigen"):
                rec.skip(key, R[key], _EMPTY)
        else:
            sa, sb = sig(a), sig(b)
            rec.identity("homog", R["homog"], sig(alpha * a), abs(alpha) * sa)
            rec.inequality("triangle", R["triangle"], sig(a + b), sa + sb)
            rec.inequality("triangle.collinear", R["triangle"], sig(a + 0.5 * a), sa + sig(0.5 * a))
            rec.flag("subspace", R["subspace"], is_member(ctx, alpha * a + b).is_member)
            rec.flag("adjoint.member", R["adjoint"], is_member(ctx, adjoint(a)).is_member)
            rec.identity("adjoint", R["adjoint"], sig(adjoint(a)), sa)
            nt = operator_norm(tm)
            rec.flag("left.member", R["left"], is_member(ctx, tm @ a).is_member)
            rec.inequality("left", R["left"], sig(tm @ a), nt * sa)
            rec.flag("right.member", R["right"], is_member(ctx, a @ tm).is_member)
            rec.inequality("right", R["right"], sig(a @ tm), nt * sa)
            _order_check(ctx, rec, rng, a, sig)
            _modulus_check(ctx, rec, rng, a, sig)
            _powers_check(rec, a, sig, powers, R["powers"])
            _eigen_sigma_check(ctx, rec, rng, sig)
        for pval, const in ((2, a2), (4, a4)):
            cid = f"pframe.p{pval}"
            if trivial:
                rec.skip(cid, R["pframe"], _EMPTY)
            elif const <= 0:
                rec.skip(cid, R["pframe"], "no positive p-frame lower constant for this context")
            else:
                rec.inequality(cid, R["pframe"], operator_norm(a), sig(a) / const)
        _nonmember_observation(ctx, rec, rng, R["nonmember"])
    return _report(rec, seed, trials)


def _order_check(ctx, rec, rng, a, sig):
    ref = REF_IDEAL["order"]
    c = random_member(ctx, rng)
    b = sqrt_psd(adjoint(a) @ a + adjoint(c) @ c)
    if not is_member(ctx, b).is_member:
        rec.skip("order", ref, "constructed B with B*B = A*A + C*C is not in the class")
        return
    rec.flag("order.hypothesis", ref, bool(np.linalg.eigvalsh(adjoint(b) @ b - adjoint(a) @ a)[0]
                                           >= -rec.tol(operator_norm(b) ** 2)))
    rec.inequality("order", ref, sig(a), sig(b))


def _modulus_check(ctx, rec, rng, a, sig):
    ref = REF_IDEAL["modulus"]
    ma = abs_op(a)
    rec.flag("modulus.member", ref, is_member(ctx, ma).is_member)
    rec.identity("modulus", ref, sig(a), sig(ma))
    r = _cgauss(rng, ctx.d, ctx.d)
    rec.flag("modulus.iff", ref, is_member(ctx, r).is_member == is_member(ctx, abs_op(r)).is_member)


def _powers_check(rec, a, sig, powers, ref):
    na = operator_norm(a)
    if na == 0:
        rec.skip("powers", ref, "zero operator")
        return
    a = a * (0.9 / na)
    s1 = sig(a)
    worst = -np.inf
    p = np.eye(a.shape[0], dtype=np.complex128)
    prev = None
    for k in range(1, powers + 1):
        p_prev = p
        p = p @ a
        excess = sig(p) - operator_norm(p_prev) * s1
        worst = max(worst, excess)
        prev = sig(p)
    rec.inequality("powers.dominated", ref, worst, 0.0, scale=s1)
    rec.inequality("powers.limit", ref, prev, 0.9 ** (powers - 1) * s1, scale=s1)


def _eigen_sigma_check(ctx, rec, rng, sig):
    ref = REF_IDEAL["eigen"]
    lam = _cgauss(rng, ctx.n)
    a = eigen_operator(ctx, lam)
    if not is_member(ctx, a).is_member:
        rec.skip("eigen", ref, "eigen-probe operator is not in the class")
        return
    rhs = float(np.sum(np.abs(lam) ** 2 * np.linalg.norm(ctx.x, axis=1) ** 2))
    rec.identity("eigen", ref, sig(a) ** 2, rhs)


def _nonmember_observation(ctx, rec, rng, ref):
    r = _cgauss(rng, ctx.d, ctx.d)
    if is_member(ctx, r).is_member:
        rec.skip("nonmember", ref, "random operator is a member; no counterexample to search")
        return
    rec.observe("nonmember", ref, sigma(ctx, adjoint(r)), sigma(ctx, r),
                note="non-member: sigma(R*) and sigma(R) need not agree")


def inner_suite(ctx: GhsContext, seed=0, trials: int = 10, rtol: float = 1e-9) -> VerificationReport:
    rec = Recorder("inner_suite", rtol)
    rng = np.random.default_rng(seed)
    a2 = pframe_lower_constant(ctx, 2.0)
    trivial = not ctx.admissible_basis
    R = REF_INNER
    ip = lambda a, b: ghs_inner(ctx, a, b)  # noqa: E731
    for t in range(trials):
        a, b, c = (random_member(ctx, rng) for _ in range(3))
        tm = _cgauss(rng, ctx.d, ctx.d)
        alpha = complex(_cgauss(rng))
        rec.start(t, a, b, c, tm, alpha)
        if trivial:
            zero = np.zeros((ctx.d, ctx.d))
            rec.identity("positive", R["positive"], ip(zero, zero), 0.0)
            for key in ("definite", "linear", "hermitian", "adjoint", "shift", "cauchy", "polar"):
                rec.skip(key, R[key], _EMPTY)
            continue
        sa, sb = sigma(ctx, a), sigma(ctx, b)
        aa = ip(a, a)
        rec.identity("positive.real", R["positive"], aa.imag, 0.0, scale=sa**2)
        rec.inequality("positive", R["positive"], -aa.real, 0.0, scale=sa**2)
        rec.identity("positive.sigma", R["positive"], aa.real, sa**2)
        if a2 > 0:
            rec.inequality("definite", R["definite"], a2**2 * operator_norm(a) ** 2, aa.real, scale=sa**2)
        else:
            rec.skip("definite", R["definite"], "no positive p-frame lower constant for this context")
        sc = (sa + sb + sigma(ctx, c)) ** 2
        rec.identity("linear.add", R["linear"], ip(a + b, c), ip(a, c) + ip(b, c), scale=sc)
        rec.identity("linear.scale", R["linear"], ip(alpha * a, b), alpha * ip(a, b), scale=abs(alpha) * sa * sb)
        rec.identity("hermitian", R["hermitian"], np.conj(ip(a, b)), ip(b, a), scale=sa * sb)
        rec.identity("adjoint", R["adjoint"], ip(adjoint(a), adjoint(b)), np.conj(ip(a, b)), scale=sa * sb)
        nt = operator_norm(tm)
        rec.identity("shift.left", R["shift"], ip(tm @ a, b), ip(a, adjoint(tm) @ b), scale=nt * sa * sb)
        rec.identity("shift.right", R["shift"], ip(a @ tm, b), ip(a, b @ adjoint(tm)), scale=nt * sa * sb)
        rec.inequality("cauchy", R["cauchy"], abs(ip(a, b)), sa * sb)
        rec.identity("polar", R["polar"], 4 * ip(a, b), polarization(ctx, a, b), scale=4 * (sa + sb) ** 2)
    return _report(rec, seed, trials)


def polarization(ctx: GhsContext, a, b) -> complex:
    s = lambda m: sigma(ctx, m) ** 2  # noqa: E731
    return s(a + b) - s(a - b) + 1j * s(a + 1j * b) - 1j * s(a - 1j * b)


def _trace_member(ctx, rng):
    c = random_member(ctx, rng)
    d = random_member(ctx, rng)
    return c @ d


def trace_suite(ctx: GhsContext, seed=0, trials: int = 10, rtol: float = 1e-9) -> VerificationReport:
    rec = Recorder("trace_suite", rtol)
    rng = np.random.default_rng(seed)
    trivial = not ctx.admissible_basis
    R = REF_TRACE
    tr = lambda m: trace(ctx, m)  # noqa: E731
    for t in range(trials):
        a = _trace_member(ctx, rng)
        b = _trace_member(ctx, rng)
        tm = _cgauss(rng, ctx.d, ctx.d)
        alpha = complex(_cgauss(rng))
        rec.start(t, a, b, tm, alpha)
        if trivial:
            for key in R:
                rec.skip(key, R[key], _EMPTY)
            continue
        na, nb, nt = frobenius_norm(a), frobenius_norm(b), operator_norm(tm)
        pn2 = float(np.sum(np.abs(ctx.probes) ** 2))
        sc = (na + nb) * (1 + nt) * pn2
        rec.flag("member", R["ideal"], is_member_trace_class(ctx, a).is_member)
        rec.identity("adjoint", R["adjoint"], tr(adjoint(a)), np.conj(tr(a)), scale=sc)
        rec.identity("homog", R["homog"], tr(alpha * a), alpha * tr(a), scale=abs(alpha) * sc)
        rec.flag("ideal.left", R["ideal"], is_member_trace_class(ctx, tm @ a).is_member)
        rec.flag("ideal.right", R["ideal"], is_member_trace_class(ctx, a @ tm).is_member)
        s2 = sigma(ctx, a) ** 2
        rec.identity("square.left", R["square"], tr(adjoint(a) @ a), s2, scale=s2)
        rec.identity("square.right", R["square"], tr(a @ adjoint(a)), s2, scale=s2)
        star = is_member_trace_class(ctx, a + b)
        if star.star_residual is not None and star.star_residual <= star.tolerance:
            rec.flag("additive.member", R["additive"], star.is_member)
            rec.identity("additive", R["additive"], tr(a + b), tr(a) + tr(b), scale=sc)
        else:
            rec.skip("additive", R["additive"], "half power of A+B fails the intertwining condition")
        rec.identity("inner", R["inner"], tr(adjoint(b) @ a), ghs_inner(ctx, a, b), scale=sc)
        rhs = np.sqrt(max(tr(adjoint(a) @ a).real, 0.0) * max(tr(adjoint(b) @ b).real, 0.0))
        rec.inequality("cauchy", R["cauchy"], abs(tr(adjoint(b) @ a)), rhs, scale=sc)
        rec.inequality("squarebound", R["squarebound"], abs(tr(a @ a)), tr(adjoint(a) @ a).real, scale=sc)
        p = adjoint(a) @ a
        q = p + adjoint(b) @ b
        rec.inequality("monotone", R["monotone"], tr(p).real, tr(q).real, scale=sc)
        lam = _cgauss(rng, ctx.n)
        e = eigen_operator(ctx, lam)
        xn2 = np.linalg.norm(ctx.x, axis=1) ** 2
        rec.identity("eigen", R["eigen"], tr(e), complex(np.sum(lam * xn2)), scale=float(np.sum(np.abs(lam) * xn2)))
        if np.min(xn2) >= 1.0:
            epsd = eigen_operator(ctx, np.abs(lam))
            rec.inequality("eigenpsd", R["eigenpsd"], sigma(ctx, epsd), tr(epsd).real)
        else:
            rec.skip("eigenpsd", R["eigenpsd"], "some ||x_n|| < 1")
        rec.identity("cyclic", R["cyclic"], tr(tm @ a), tr(a @ tm), scale=sc)
        ta = tau(ctx, a)
        rec.inequality("modbound", R["modbound"], abs(tr(tm @ abs_op(a))), nt * ta, scale=nt * ta)
        rec.identity("taumod", R["taumod"], tau(ctx, abs_op(a)), ta)
        rec.identity("halfpower", R["halfpower"], sigma(ctx, half_power(a)) ** 2, ta)
    return _report(rec, seed, trials)


def tau_suite(ctx: GhsContext, seed=0, trials: int = 10, rtol: float = 1e-9,
              powers: int = 40) -> VerificationReport:
    rec = Recorder("tau_suite", rtol)
    rng = np.random.default_rng(seed)
    trivial = not ctx.admissible_basis
    a2 = pframe_lower_constant(ctx, 2.0)
    R = REF_TAU
    tu = lambda m: tau(ctx, m)  # noqa: E731
    for t in range(trials):
        a = _trace_member(ctx, rng)
        b = _trace_member(ctx, rng)
        tm = _cgauss(rng, ctx.d, ctx.d)
        alpha = complex(_cgauss(rng))
        u0 = _unitary(rng, ctx.d)
        rec.start(t, a, b, tm, alpha, u0)
        if trivial:
            zero = np.zeros((ctx.d, ctx.d))
            rec.identity("positive", R["positive"], tu(zero), 0.0)
            for key in R:
                if key != "positive":
                    rec.skip(key, R[key], _EMPTY)
            continue
        ta, tb, nt = tu(a), tu(b), operator_norm(tm)
        rec.identity("adjoint", R["adjoint"], tu(adjoint(a)), ta)
        rec.identity("homog", R["homog"], tu(alpha * a), abs(alpha) * ta)
        if is_member_trace_class(ctx, a + b).is_member:
            rec.inequality("triangle", R["triangle"], tu(a + b), ta + tb)
        else:
            rec.skip("triangle", R["triangle"], "A+B is not certified trace class")
        rec.inequality("positive", R["positive"], -ta, 0.0, scale=ta)
        if a2 > 0:
            # tau(A) = sigma([A]^(1/2))^2 >= a^2 ||[A]^(1/2)||^2 = a^2 ||A||
            rec.inequality("definite", R["definite"], a2**2 * operator_norm(a), ta)
            rec.identity("definite.zero", R["definite"], tu(np.zeros_like(a)), 0.0)
        else:
            rec.skip("definite", R["definite"], "no positive p-frame lower constant for this context")
        rec.inequality("ideal.left", R["ideal"], tu(tm @ a), nt * ta)
        rec.inequality("ideal.right", R["ideal"], tu(a @ tm), nt * ta)
        rec.inequality("trace", R["trace"], abs(trace(ctx, a)), ta)
        rec.inequality("square", R["square"], sigma(ctx, a) ** 2, tu(adjoint(a) @ a))
        # [B] = [A] + P for B = V ([A] + P) with V unitary and P >= 0
        pp = adjoint(b) @ b
        bb = u0 @ (abs_op(a) + pp)
        rec.flag("monotone.hypothesis", R["monotone"],
                 bool(np.linalg.eigvalsh(abs_op(bb) - abs_op(a))[0] >= -rec.tol(operator_norm(bb))))
        rec.inequality("monotone", R["monotone"], ta, tu(bb))
        _tau_powers(ctx, rec, a, powers)
        g = OpSequence(ctx.f.ops @ u0)
        gx = g.adjoint_apply(ctx.x)
        pairing = complex(np.sum((ctx.probes @ a.T) * np.conj(gx)))
        rec.flag("pairing.onb", R["pairing"], classify(g).is_orthonormal_basis)
        rec.inequality("pairing", R["pairing"], abs(pairing), ta)
    return _report(rec, seed, trials)


def _tau_powers(ctx, rec, a, powers):
    ref = REF_TAU["powers"]
    na = operator_norm(a)
    if na == 0:
        rec.skip("powers", ref, "zero operator")
        return
    a = a * (0.9 / na)
    t1 = tau(ctx, a)
    p = np.eye(ctx.d, dtype=np.complex128)
    worst = -np.inf
    last = t1
    for _ in range(powers):
        p_prev = p
        p = p @ a
        last = tau(ctx, p)
        worst = max(worst, last - operator_norm(p_prev) * t1)
    rec.inequality("powers.dominated", ref, worst, 0.0, scale=t1)
    rec.inequality("powers.limit", ref, last, 0.9 ** (powers - 1) * t1, scale=t1)
