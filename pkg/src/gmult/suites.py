"""Per-operation verification suites.

Every suite has the signature ``suite(rng, cfg, rec)``: it draws ``cfg.trials``
seeded instances and appends records to the :class:`~gmult.report.Recorder`.
``cfg`` carries the dimensions, tolerance and generator overrides of a
scenario (see :mod:`gmult.harness`).
"""

from __future__ import annotations

import numpy as np

from . import generators as gen
from . import multiplier as mp
from . import schatten as sc
from .gbessel import (
    OpSequence,
    TailLaw,
    classify,
    complex_gaussian,
    frame_operator,
    from_rows,
    haar_unitary,
    onb_transition_unitary,
    optimal_bessel_bound,
    random_invertible,
    random_onb,
    riesz_transition,
    sqrt_bessel_bound,
)
from .linalg import (
    ConjLinearIsometry,
    abs_op,
    adjoint,
    conj_isometry_apply,
    frobenius_norm,
    inner,
    operator_norm,
    polar_decompose,
    rank_one,
    sqrt_psd,
    trace_norm,
)


def _cg(rng, *shape):
    return complex_gaussian(rng, *shape)


def _alpha(rng) -> complex:
    return complex(_cg(rng))


# -- linalg-kernel ------------------------------------------------------------


def suite_rank_one(rng, cfg, rec):
    ref = "rank-one operator h -> <h, y> x and its bilinearity"
    d = cfg.d
    for t in range(cfg.trials):
        x, y, h = _cg(rng, d), _cg(rng, d), _cg(rng, d)
        al = _alpha(rng)
        rec.start(t, x, y, h, al)
        r = rank_one(x, y)
        sc_ = np.linalg.norm(x) * np.linalg.norm(y)
        rec.matrix_identity("action", ref, r @ h, inner(h, y) * x, scale=sc_ * np.linalg.norm(h))
        rec.matrix_identity("scale.first", ref, rank_one(al * x, y), al * r, scale=abs(al) * sc_)
        rec.matrix_identity("scale.second", ref, rank_one(x, al * y), np.conj(al) * r, scale=abs(al) * sc_)


def _norm_order(rng, cfg, rec, which):
    ref = "singular-value norms: operator <= Frobenius <= trace"
    for t in range(cfg.trials):
        m = gen.random_square(rng, cfg.d, rank=int(rng.integers(0, cfg.d + 1)))
        rec.start(t, m)
        # the Hermitian dilation [[0, M], [M*, 0]] has eigenvalues +-s_i
        z = np.zeros_like(m)
        s = np.clip(np.linalg.eigvalsh(np.block([[z, m], [adjoint(m), z]]))[cfg.d:], 0.0, None)
        oracle = {"operator": float(s.max(initial=0.0)), "frobenius": float(np.sqrt(np.sum(np.abs(m) ** 2))),
                  "trace": float(np.sum(s))}
        got = {"operator": operator_norm(m), "frobenius": frobenius_norm(m), "trace": trace_norm(m)}
        rec.identity(which, f"{which} norm agrees with a Hermitian dilation oracle", got[which], oracle[which])
        rec.inequality("order.low", ref, got["operator"], got["frobenius"], rtol=1e-12)
        rec.inequality("order.high", ref, got["frobenius"], got["trace"], rtol=1e-12)


def suite_operator_norm(rng, cfg, rec):
    _norm_order(rng, cfg, rec, "operator")


def suite_frobenius_norm(rng, cfg, rec):
    _norm_order(rng, cfg, rec, "frobenius")


def suite_trace_norm(rng, cfg, rec):
    _norm_order(rng, cfg, rec, "trace")


def suite_sqrt_psd(rng, cfg, rec):
    ref = "PSD square root: sqrt(R R) = R and sqrt(M)^2 = M"
    for t in range(cfg.trials):
        g = gen.random_square(rng, cfg.d, rank=int(rng.integers(0, cfg.d + 1)))
        r = sqrt_psd(g @ adjoint(g))
        rec.start(t, g)
        rec.matrix_identity("idempotent", ref, sqrt_psd(r @ r), r, rtol=1e-8)
        m = g @ adjoint(g)
        root = sqrt_psd(m)
        rec.matrix_identity("square", ref, root @ root, m)
        rec.flag("psd", ref, bool(np.linalg.eigvalsh(root)[0] >= -rec.tol(operator_norm(root))))


def suite_polar_decompose(rng, cfg, rec):
    ref = "polar decomposition A = W[A] with W a partial isometry"
    d = cfg.d
    for t in range(cfg.trials):
        rank = int(rng.integers(0, d + 1)) if t % 3 else d
        a = gen.random_square(rng, d, rank=rank)
        rec.start(t, a)
        pd = polar_decompose(a)
        w, ma = pd.w, pd.abs_a
        na = operator_norm(a)
        ma_star = abs_op(adjoint(a))
        rec.matrix_identity("factor", ref, w @ ma, a, scale=na)
        rec.matrix_identity("modulus", ref, adjoint(w) @ a, ma, scale=na)
        rec.matrix_identity("adjoint", ref, adjoint(w) @ ma_star, adjoint(a), scale=na)
        rec.matrix_identity("adjoint.modulus", ref, w @ ma @ adjoint(w), ma_star, scale=na)
        rec.matrix_identity("partial.isometry", ref, w @ adjoint(w) @ w, w, scale=1.0)
        rec.matrix_identity("unitary.completion", ref, adjoint(pd.w_unitary) @ pd.w_unitary, np.eye(d), scale=1.0)
        rec.matrix_identity("unitary.factor", ref, pd.w_unitary @ ma, a, scale=na)


def suite_conj_isometry_apply(rng, cfg, rec):
    ref = "conjugate-linear isometry: theta(alpha v + w) = conj(alpha) theta v + theta w"
    d0 = cfg.d0
    for t in range(cfg.trials):
        theta = ConjLinearIsometry(haar_unitary(d0, rng))
        v, w = _cg(rng, d0), _cg(rng, d0)
        al = _alpha(rng)
        rec.start(t, theta.theta_matrix, v, w, al)
        lhs = conj_isometry_apply(theta, al * v + w)
        rhs = np.conj(al) * conj_isometry_apply(theta, v) + conj_isometry_apply(theta, w)
        rec.matrix_identity("antilinear", ref, lhs, rhs, scale=abs(al) * np.linalg.norm(v) + np.linalg.norm(w))
        rec.identity("isometry", ref, np.linalg.norm(conj_isometry_apply(theta, v)), np.linalg.norm(v))


# -- gbessel ------------------------------------------------------------------


def _sequence(rng, cfg) -> OpSequence:
    if cfg.opseq is not None:
        return cfg.opseq
    return OpSequence(_cg(rng, cfg.n, cfg.d0, cfg.d))


def suite_frame_operator(rng, cfg, rec):
    ref = "frame operator: <S h, h> = sum ||A_n h||^2"
    for t in range(cfg.trials):
        a = _sequence(rng, cfg)
        h = _cg(rng, a.d)
        rec.start(t, a.ops, h)
        s = frame_operator(a)
        lhs = inner(s @ h, h)
        rhs = float(np.sum(np.abs(a.ops @ h) ** 2))
        rec.identity("quadratic", ref, lhs, rhs)
        rec.matrix_identity("hermitian", ref, s, adjoint(s))


def suite_optimal_bessel_bound(rng, cfg, rec):
    ref_b = "optimal Bessel bound: sum ||A_n h||^2 <= b ||h||^2"
    ref_s = "sum of Bessel sequences: sqrt bound <= sqrt(a) + sqrt(c)"
    for t in range(cfg.trials):
        a = _sequence(rng, cfg)
        c = OpSequence(_cg(rng, a.n, a.d0, a.d))
        hs = _cg(rng, 20, a.d)
        rec.start(t, a.ops, c.ops, hs)
        b = optimal_bessel_bound(a)
        worst = max(float(np.sum(np.abs(a.ops @ h) ** 2)) - b * float(np.vdot(h, h).real) for h in hs)
        rec.inequality("bessel", ref_b, worst, 0.0, scale=b * float(np.max(np.sum(np.abs(hs) ** 2, axis=1))))
        rec.inequality("sum", ref_s, sqrt_bessel_bound(a + c), sqrt_bessel_bound(a) + sqrt_bessel_bound(c))


def suite_classify(rng, cfg, rec):
    ref_o = "classification: random orthonormal basis is reported as such"
    ref_r = "classification: rows of an invertible operator form a Riesz basis"
    for t in range(cfg.trials):
        f = random_onb(cfg.d0, cfg.n, rng)
        tm = random_invertible(f.d, rng)
        rec.start(t, f.ops, tm)
        cf = classify(f)
        rec.flag("onb", ref_o, cf.is_orthonormal_basis and cf.is_orthonormal_sequence and cf.is_orthogonal)
        r = from_rows(tm, cfg.d0)
        cr = classify(r)
        sv = np.linalg.svd(tm, compute_uv=False)
        if cr.riesz_bounds is None:
            rec.fail("riesz", ref_r, "rows of an invertible operator were not classified as a Riesz basis")
            continue
        rec.identity("riesz.lower", ref_r, cr.riesz_bounds[0], sv[-1] ** 2)
        rec.identity("riesz.upper", ref_r, cr.riesz_bounds[1], sv[0] ** 2)


def suite_random_onb(rng, cfg, rec):
    ref = "seeded orthonormal basis: unitary analysis matrix, reproducible"
    for t in range(cfg.trials):
        seed = int(rng.integers(2**63))
        f = random_onb(cfg.d0, cfg.n, seed)
        rec.start(t, f.ops)
        an = f.analysis()
        rec.matrix_identity("unitary", ref, adjoint(an) @ an, np.eye(f.d), scale=1.0)
        rec.flag("reproducible", ref, f.same_as(random_onb(cfg.d0, cfg.n, seed)))


def suite_onb_transition_unitary(rng, cfg, rec):
    ref = "transition between orthonormal bases is unitary and recovers the planted U0"
    for t in range(cfg.trials):
        b = random_onb(cfg.d0, cfg.n, rng)
        u0 = haar_unitary(b.d, rng)
        a = b.right_multiply(u0)
        rec.start(t, b.ops, u0)
        u = onb_transition_unitary(b, a)
        rec.matrix_identity("unitary", ref, adjoint(u) @ u, np.eye(b.d), scale=1.0, rtol=1e-10)
        rec.matrix_identity("planted", ref, u, u0, scale=1.0, rtol=1e-10)


def suite_riesz_transition(rng, cfg, rec):
    ref = "Riesz transition T with A_n = F_n T recovers the planted T0"
    for t in range(cfg.trials):
        f = random_onb(cfg.d0, cfg.n, rng)
        t0 = random_invertible(f.d, rng)
        rec.start(t, f.ops, t0)
        tt = riesz_transition(f, f.right_multiply(t0))
        rec.matrix_identity("planted", ref, tt, t0)


# -- multiplier ---------------------------------------------------------------


def _spec(rng, cfg, kind="random", **kw) -> mp.MultiplierSpec:
    if kind == "random" and cfg.spec is not None:
        return cfg.spec
    if kind == "random":
        s = gen.random_spec(rng, cfg.d, cfg.d0, cfg.n, **kw)
    elif kind == "orthogonal":
        s = gen.orthogonal_spec(rng, cfg.d, cfg.d0, cfg.n, **kw)
    elif kind == "biorthogonal":
        s = gen.biorthogonal_spec(rng, cfg.d, cfg.d0, cfg.n)
    else:
        raise ValueError(kind)
    if cfg.weights is not None and cfg.weights.n == s.n:
        s = s.with_weights(cfg.weights)
    return s


def suite_assemble(rng, cfg, rec):
    ref = "multiplier action h -> sum lam_n <h, B_n* y_n> A_n* x_n"
    ref_lin = "linearity ledger: scalars and sums in each slot"
    for t in range(cfg.trials):
        s = _spec(rng, cfg)
        hs = _cg(rng, 5, s.d)
        al = _alpha(rng)
        s2 = gen.random_spec(rng, s.d, s.a.d0, s.n)
        rec.start(t, s.lam.values, s.a.ops, s.b.ops, s.x, s.y, hs, al)
        m = mp.assemble(s)
        nm = operator_norm(m)
        for h in hs:
            term = sum(s.lam.values[k] * inner(h, s.v[k]) * s.u[k] for k in range(s.n))
            rec.matrix_identity("action", ref, m @ h, term, scale=nm * np.linalg.norm(h))
        _linearity(rec, ref_lin, s, s2, al, m)


def _linearity(rec, ref, s, s2, al, m):
    lam, a, b, x, y = s.lam, s.a, s.b, s.x, s.y
    asm = mp.assemble
    sc_ = abs(al) * operator_norm(m)
    rec.matrix_identity("scale.lambda", ref, asm(s.with_weights(lam.with_values(al * lam.values))), al * m, scale=sc_)
    rec.matrix_identity("scale.x", ref, asm(s.evolve(x=al * x)), al * m, scale=sc_)
    rec.matrix_identity("scale.B", ref, asm(s.evolve(b=b.scaled(al))), al * m, scale=sc_)
    rec.matrix_identity("scale.A", ref, asm(s.evolve(a=a.scaled(al))), np.conj(al) * m, scale=sc_)
    rec.matrix_identity("scale.y", ref, asm(s.evolve(y=al * y)), np.conj(al) * m, scale=sc_)
    lam_sum = lam.with_values(lam.values + s2.lam.values)
    m2 = asm(s.with_weights(s2.lam))
    big = operator_norm(m) + operator_norm(m2)
    rec.matrix_identity("add.lambda", ref, asm(s.with_weights(lam_sum)), m + m2, scale=big)
    pairs = (("A", "a", s2.a), ("B", "b", s2.b), ("x", "x", s2.x), ("y", "y", s2.y))
    for label, field, other in pairs:
        cur = getattr(s, field)
        summed = cur + other
        part = asm(s.evolve(**{field: other}))
        rec.matrix_identity(f"add.{label}", ref, asm(s.evolve(**{field: summed})), m + part,
                            scale=operator_norm(m) + operator_norm(part))


def suite_existence_bound(rng, cfg, rec):
    ref = "existence bound: ||M|| <= sqrt(b_A b_B) sup|lam| sup||x_n|| ||y_n||"
    for t in range(cfg.trials):
        s = _spec(rng, cfg)
        rec.start(t, s.lam.values, s.a.ops, s.b.ops, s.x, s.y)
        m = mp.assemble(s)
        rec.inequality("bound", ref, operator_norm(m), mp.existence_bound(s), scale=operator_norm(m))


def suite_multiplier_adjoint(rng, cfg, rec):
    ref = "adjoint multiplier: M* = M_{conj lam, B, A, y, x}"
    ref_n = "normality when A = B orthogonal and x = y"
    for t in range(cfg.trials):
        s = _spec(rng, cfg)
        rec.start(t, s.lam.values, s.a.ops, s.b.ops, s.x, s.y)
        m = mp.assemble(s)
        adj = mp.multiplier_adjoint(s)
        rec.matrix_identity("adjoint", ref, mp.assemble(adj), adjoint(m))
        rec.matrix_identity("involution", ref, mp.assemble(mp.multiplier_adjoint(adj)), m)
        sa = mp.MultiplierSpec(s.lam.with_values(s.lam.values.real + 0j), s.a, s.a, s.x, s.x)
        ma = mp.assemble(sa)
        rec.matrix_identity("selfadjoint", ref, ma, adjoint(ma))
        if cfg.n * cfg.d0 <= cfg.d:
            sn = gen.normal_spec(rng, cfg.d, cfg.d0, cfg.n)
            mn = mp.assemble(sn)
            rec.matrix_identity("normal", ref_n, mn @ adjoint(mn), adjoint(mn) @ mn, scale=operator_norm(mn) ** 2)
        else:
            rec.skip("normal", ref_n, "an orthogonal sequence needs n*d0 <= d")


def _reduction(rng, cfg, rec, star_first):
    name = "MM*" if star_first else "M*M"
    ref = f"{name} reduction to a multiplier with derived weights and its PSD square root"
    for t in range(cfg.trials):
        s = _spec(rng, cfg, "orthogonal", b_orthogonal=True)
        rec.start(t, s.lam.values, s.a.ops, s.b.ops, s.x, s.y)
        m = mp.assemble(s)
        if star_first:
            target = m @ adjoint(m)
            w, root = mp.mmstar_reduction(s)
            base = (s.a, s.x)
        else:
            target = adjoint(m) @ m
            w, root = mp.mstarm_reduction(s)
            base = (s.b, s.y)
        seq, vec = base
        mw = mp.assemble(mp.MultiplierSpec(w, seq, seq, vec, vec))
        mr = mp.assemble(mp.MultiplierSpec(root, seq, seq, vec, vec))
        nt = operator_norm(target)
        rec.matrix_identity("product", ref, target, mw, scale=nt)
        rec.matrix_identity("root.square", ref, mr @ mr, target, scale=nt)
        rec.flag("root.psd", ref, bool(np.linalg.eigvalsh(0.5 * (mr + adjoint(mr)))[0] >= -rec.tol(operator_norm(mr))))
        rec.matrix_identity("root", ref, mr, _sqrt_rank_truncated(target), scale=operator_norm(mr))


def _sqrt_rank_truncated(m) -> np.ndarray:
    """PSD square root with roundoff-level eigenvalues set to zero.

    Targets here have rank <= n*d0 < d in general, and sqrt of a 1e-16 noise
    eigenvalue would contribute 1e-8 of pure oracle error.
    """
    h = 0.5 * (m + adjoint(m))
    w, v = np.linalg.eigh(h)
    cut = h.shape[0] * np.finfo(float).eps * max(float(np.max(np.abs(w), initial=0.0)), 1e-300)
    w = np.where(w > cut, w, 0.0)
    return (v * np.sqrt(w)) @ adjoint(v)


def suite_mmstar_reduction(rng, cfg, rec):
    _reduction(rng, cfg, rec, True)


def suite_mstarm_reduction(rng, cfg, rec):
    _reduction(rng, cfg, rec, False)


def _need_biorth(cfg, rec, cid, ref) -> bool:
    if cfg.n > cfg.d:
        rec.skip(cid, ref, "biorthogonal data needs n <= d")
        return False
    return True


def suite_power_formula(rng, cfg, rec):
    ref = "powers of a biorthogonal multiplier in closed form"
    for t in range(cfg.trials):
        rec.start(t)
        if not _need_biorth(cfg, rec, "power", ref):
            continue
        s = _spec(rng, cfg, "biorthogonal")
        rec.start(t, s.lam.values, s.a.ops, s.b.ops, s.x, s.y)
        m = mp.assemble(s)
        for k in range(1, 5):
            mk = np.linalg.matrix_power(m, k)
            rec.matrix_identity(f"power.{k}", ref, mp.power_formula(s, k), mk, scale=operator_norm(m) ** k)


def suite_symbolic_product(rng, cfg, rec):
    ref = "symbolic calculus: M_lam M_mu = M_nu with nu_n = lam_n mu_n <A_n* x_n, B_n* y_n>"
    for t in range(cfg.trials):
        rec.start(t)
        if not _need_biorth(cfg, rec, "product", ref):
            continue
        s = _spec(rng, cfg, "biorthogonal")
        s2 = s.with_weights(gen.random_weights(rng, s.n))
        rec.start(t, s.lam.values, s2.lam.values, s.a.ops, s.b.ops, s.x, s.y)
        m1, m2 = mp.assemble(s), mp.assemble(s2)
        rec.matrix_identity("product", ref, mp.assemble(mp.symbolic_product(s, s2)), m1 @ m2,
                            scale=operator_norm(m1) * operator_norm(m2))


def suite_compose_maps(rng, cfg, rec):
    ref = "composition identities moving T_n or S between slots"
    for t in range(cfg.trials):
        s = _spec(rng, cfg)
        ts = gen.block_operators(rng, s.n, s.a.d0)
        sm = _cg(rng, s.d, s.d)
        rec.start(t, s.lam.values, s.a.ops, s.b.ops, s.x, s.y, ts, sm)
        for site in mp.SITES:
            arg = sm if site in ("BS", "AS") else ts
            lhs, rhs = mp.composition_identity(s, site, arg)
            rec.matrix_identity(site, ref, lhs, rhs)


def suite_product_general(rng, cfg, rec):
    ref = "general product under cross-biorthogonality <C_k* z_k, B_n* y_n> = 0"
    for t in range(cfg.trials):
        rec.start(t)
        if not _need_biorth(cfg, rec, "product", ref):
            continue
        s1, s2 = gen.product_pair(rng, cfg.d, cfg.d0, cfg.n)
        rec.start(t, s1.lam.values, s2.lam.values, s1.a.ops, s1.b.ops, s2.a.ops, s2.b.ops)
        m1, m2 = mp.assemble(s1), mp.assemble(s2)
        rec.matrix_identity("product", ref, mp.product_general(s1, s2), m1 @ m2,
                            scale=operator_norm(m1) * operator_norm(m2))


def _need_orth(cfg, rec, cid, ref) -> bool:
    if cfg.n * cfg.d0 > cfg.d:
        rec.skip(cid, ref, "an orthogonal sequence needs n*d0 <= d")
        return False
    return True


def suite_norm_product_bound(rng, cfg, rec):
    ref = "||M_{lam mu}|| <= min(sup|lam| ||M_mu||, sup|mu| ||M_lam||) for orthogonal A"
    for t in range(cfg.trials):
        rec.start(t)
        if not _need_orth(cfg, rec, "bound", ref):
            continue
        s = _spec(rng, cfg, "orthogonal")
        s_mu = s.with_weights(gen.random_weights(rng, s.n))
        rec.start(t, s.lam.values, s_mu.lam.values, s.a.ops, s.b.ops, s.x, s.y)
        lhs, rhs = mp.norm_product_bound(s, s_mu)
        rec.inequality("bound", ref, lhs, rhs)


def suite_tail_compactness(rng, cfg, rec):
    ref = "tail bound ||M - M_m|| <= sqrt(b_A b_B) sup pair norm sup_{n>m}|lam_n|"
    for t in range(cfg.trials):
        s = _spec(rng, cfg)
        s = s.with_weights(gen.geometric_weights(rng, s.n, 0.5)) if cfg.spec is None else s
        rec.start(t, s.lam.values, s.a.ops, s.b.ops, s.x, s.y)
        prev = np.inf
        mono = True
        for m in range(s.n + 1):
            lhs, rhs = mp.tail_compactness(s, m)
            rec.inequality(f"tail.{m}", ref, lhs, rhs)
            mono = mono and rhs <= prev * (1 + 1e-12)
            prev = rhs
        if s.lam.class_tag == "c0":
            rec.flag("monotone", ref, mono)


def suite_nuclear_bound(rng, cfg, rec):
    ref = "trace norm of M <= sqrt(b_A b_B) sup pair norm ||lam||_1"
    for t in range(cfg.trials):
        s = _spec(rng, cfg, class_tag="l1")
        if s.lam.class_tag != "l1":
            s = s.with_weights(s.lam.with_values(s.lam.values, "l1"))
        rec.start(t, s.lam.values, s.a.ops, s.b.ops, s.x, s.y)
        lhs, rhs = mp.nuclear_bound(s)
        rec.inequality("bound", ref, lhs, rhs)


def suite_hs_bound(rng, cfg, rec):
    ref = "Frobenius bound and exact identity for orthogonal A with square-summable weights"
    for t in range(cfg.trials):
        rec.start(t)
        if not _need_orth(cfg, rec, "bound", ref):
            continue
        s = _spec(rng, cfg, "orthogonal", class_tag="l2")
        rec.start(t, s.lam.values, s.a.ops, s.b.ops, s.x, s.y)
        lhs, rhs = mp.hs_bound(s)
        rec.inequality("bound", ref, lhs, rhs)
        ex_l, ex_r = mp.hs_exact_identity(s)
        rec.identity("identity", ref, ex_l, ex_r)


def suite_convergence_study(rng, cfg, rec, steps: int = 20):
    ref = "continuity in the weights: distance <= constant times weight distance, decreasing"
    for t in range(cfg.trials):
        rec.start(t)
        if not _need_orth(cfg, rec, "hs", ref):
            continue
        s = _spec(rng, cfg, "orthogonal")
        rec.start(t, s.lam.values, s.a.ops, s.b.ops, s.x, s.y)
        e1 = np.zeros(s.n, dtype=np.complex128)
        e1[0] = 1.0
        family = [s.lam.values + e1 / k for k in range(1, steps + 1)]
        for mode in ("operator", "nuclear", "hs"):
            rows = mp.convergence_study(s, family, mode)
            worst = max(dist - const for dist, const in rows)
            rec.inequality(f"{mode}.bound", ref, worst, 0.0, scale=rows[0][1])
            dists = [r[0] for r in rows]
            rec.flag(f"{mode}.decreasing", ref, all(b < a for a, b in zip(dists, dists[1:])))


def _need_onb(cfg, rec, cid, ref) -> bool:
    if cfg.n * cfg.d0 != cfg.d:
        rec.skip(cid, ref, "an orthonormal basis needs d = n*d0")
        return False
    return True


def suite_lower_bound(rng, cfg, rec):
    ref = "lower and upper bounds for a multiplier over an orthonormal and a Riesz basis"
    for t in range(cfg.trials):
        rec.start(t)
        if not _need_onb(cfg, rec, "sandwich", ref):
            continue
        s, t0 = gen.riesz_spec(rng, cfg.d0, cfg.n)
        probes = _cg(rng, 10, cfg.d0)
        rec.start(t, s.lam.values, s.a.ops, t0, s.x, s.y, probes)
        lb = mp.lower_bound(s, probes)
        nm = operator_norm(mp.assemble(s))
        rec.inequality("probe", ref, lb.probe_lower, nm)
        rec.inequality("closed", ref, lb.closed_form_lower, nm)
        rec.inequality("upper", ref, nm, lb.upper)


def suite_recover_lambda(rng, cfg, rec):
    ref = "weights are recovered from the assembled multiplier (injectivity)"
    for t in range(cfg.trials):
        rec.start(t)
        if not _need_onb(cfg, rec, "roundtrip", ref):
            continue
        s, t0 = gen.riesz_spec(rng, cfg.d0, cfg.n)
        rec.start(t, s.lam.values, s.a.ops, t0, s.x, s.y)
        got = mp.recover_lambda(mp.assemble(s), s.a, s.b, s.x, s.y)
        err = np.abs(got.values - s.lam.values) / (1 + np.abs(s.lam.values))
        rec.inequality("roundtrip", ref, float(np.max(err)), 0.0, scale=0.0, rtol=1e-8)


def suite_unbounded_sweep(rng, cfg, rec):
    ref = "sweep over N: ||M^(N)|| = max_{n<=N} |lam_n| for orthonormal data and unit vectors"
    ref_grow = "unbounded weights: truncated multiplier norms grow without bound"
    ref_bdd = "bounded weights: truncated multiplier norms stay uniformly bounded"
    law = cfg.lambda_law or TailLaw("power", 1.0)
    sizes = cfg.sweep_sizes
    for t in range(cfg.trials):
        seed = int(rng.integers(2**63))
        rec.start(t, np.array(sizes, dtype=float), np.array([law.param]))
        unbounded = (law.kind == "power" and law.param > 0) or (law.kind == "geometric" and abs(law.param) > 1)
        for std in (True, False):
            label = "std" if std else "onb"
            rows = mp.unbounded_sweep(law, (cfg.d0, sizes), seed, std=std)
            for n_terms, norm in rows:
                expect = max(abs(law.value(k)) for k in range(1, n_terms + 1))
                rec.identity(f"{label}.{n_terms}", ref, norm, expect)
            norms = [nm for _, nm in rows]
            listing = ", ".join(f"N={n}: {nm:.6g}" for n, nm in rows)
            if unbounded:
                rec.flag(f"{label}.growing", ref_grow, all(b > a for a, b in zip(norms, norms[1:])), note=listing)
            else:
                bound = max(abs(law.value(k)) for k in range(1, max(sizes) + 1))
                rec.inequality(f"{label}.bounded", ref_bdd, max(norms), bound)


# -- schatten-classes operations ----------------------------------------------


def contexts(rng, cfg):
    """[(label, context)]: the override if given, else canonical and a unitary conjugate."""
    if cfg.context is not None:
        return [("ctx", cfg.context)]
    return [("std", sc.std_context(cfg.d)),
            ("conj", sc.unitary_conjugate_context(cfg.d, rng))]


def suite_std_context(rng, cfg, rec):
    ref = "canonical context reduces to Hilbert-Schmidt, matrix trace and trace norm"
    ctx = sc.std_context(cfg.d)
    rec.start(0)
    rec.identity("dimension", ref, len(ctx.admissible_basis), cfg.d**2)
    for t in range(cfg.trials):
        a = _cg(rng, cfg.d, cfg.d)
        rec.start(t, a)
        rec.flag("member", ref, sc.is_member(ctx, a).is_member)
        rec.identity("sigma", ref, sc.sigma(ctx, a), frobenius_norm(a), rtol=1e-10)
        rec.identity("trace", ref, sc.trace(ctx, a), complex(np.trace(a)), rtol=1e-10)
        rec.identity("tau", ref, sc.tau(ctx, a), trace_norm(a), rtol=1e-10)


def suite_is_member(rng, cfg, rec):
    ref = "membership on elementary operators matches random (U, V) evaluation"
    for label, ctx in contexts(rng, cfg):
        zero = np.zeros((ctx.d, ctx.d))
        rec.start(0)
        rec.flag(f"{label}.zero", ref, sc.is_member(ctx, zero).is_member)
        for t in range(cfg.trials):
            a = sc.random_member(ctx, rng) if t % 2 == 0 else _cg(rng, ctx.d, ctx.d)
            rec.start(t, a)
            v = sc.is_member(ctx, a)
            worst = 0.0
            for _ in range(5):
                u, w = _cg(rng, ctx.d, ctx.d), _cg(rng, ctx.d, ctx.d)
                worst = max(worst, *sc.direct_residual(ctx, a, u, w))
            direct_ok = worst <= 100 * v.tolerance * (1 + cfg.d)
            rec.flag(f"{label}.agree", ref, v.is_member == direct_ok,
                     note=f"kernel {v.is_member}, direct residual {worst:.3e}")


def suite_admissible_subspace(rng, cfg, rec):
    ref = "admissible subspace: orthonormal basis of members"
    for label, ctx in contexts(rng, cfg):
        basis = ctx.admissible_basis
        rec.start(0, *basis) if basis else rec.start(0)
        if basis:
            g = np.array([[np.vdot(b1, b2) for b2 in basis] for b1 in basis])
            rec.matrix_identity(f"{label}.orthonormal", ref, g, np.eye(len(basis)), scale=1.0)
            rec.flag(f"{label}.members", ref, all(sc.is_member(ctx, b).is_member for b in basis))
        rec.flag(f"{label}.zero", ref, frobenius_norm(sc.project_admissible(ctx, np.zeros((ctx.d, ctx.d)))) == 0.0)
        for t in range(cfg.trials):
            a = sc.random_member(ctx, rng)
            rec.start(t, a)
            rec.matrix_identity(f"{label}.span", ref, sc.project_admissible(ctx, a), a, scale=frobenius_norm(a))


def suite_sigma(rng, cfg, rec):
    ref = "sigma seminorm: homogeneous, subadditive, sigma(I)^2 = sum ||x_n||^2"
    for label, ctx in contexts(rng, cfg):
        rec.start(0)
        rec.identity(f"{label}.identity", ref, sc.sigma(ctx, np.eye(ctx.d)) ** 2,
                     float(np.sum(np.abs(ctx.x) ** 2)))
        for t in range(cfg.trials):
            a, b = _cg(rng, ctx.d, ctx.d), _cg(rng, ctx.d, ctx.d)
            al = _alpha(rng)
            rec.start(t, a, b, al)
            rec.identity(f"{label}.homog", ref, sc.sigma(ctx, al * a), abs(al) * sc.sigma(ctx, a), rtol=1e-10)
            rec.inequality(f"{label}.triangle", ref, sc.sigma(ctx, a + b), sc.sigma(ctx, a) + sc.sigma(ctx, b),
                           rtol=1e-10)


def suite_ghs_inner(rng, cfg, rec):
    ref = "inner product: <A, A> = sigma(A)^2 and polarization"
    for label, ctx in contexts(rng, cfg):
        for t in range(cfg.trials):
            a, b = _cg(rng, ctx.d, ctx.d), _cg(rng, ctx.d, ctx.d)
            rec.start(t, a, b)
            sa = sc.sigma(ctx, a)
            rec.identity(f"{label}.self", ref, sc.ghs_inner(ctx, a, a), complex(sa**2))
            scale = 4 * (sa + sc.sigma(ctx, b)) ** 2
            rec.identity(f"{label}.polar", ref, 4 * sc.ghs_inner(ctx, a, b), sc.polarization(ctx, a, b), scale=scale)
            if label == "std":
                rec.identity(f"{label}.frobenius", ref, sc.ghs_inner(ctx, a, b),
                             complex(np.trace(adjoint(b) @ a)), scale=scale)


def suite_pframe_lower_constant(rng, cfg, rec):
    ref = "p-frame lower constant: a^2 = lambda_min(sum p_n p_n*) at p = 2"
    for label, ctx in contexts(rng, cfg):
        rec.start(0, ctx.probes)
        a2 = sc.pframe_lower_constant(ctx, 2.0)
        gram = ctx.probes.T @ np.conj(ctx.probes)
        rec.identity(f"{label}.p2", ref, a2**2, float(np.linalg.eigvalsh(gram)[0]) if ctx.n >= ctx.d else 0.0,
                     scale=operator_norm(gram))
        a4 = sc.pframe_lower_constant(ctx, 4.0)
        est, _ = sc.pframe_mesh_estimate(ctx, 4.0, mesh=64, refine=2, seed=int(rng.integers(2**31)))
        rec.inequality(f"{label}.p4", ref, a4, est)


def suite_trace(rng, cfg, rec):
    ref = "generalized trace: Tr(I) = sum ||x_n||^2 and Tr(B*C) = <C, B>"
    for label, ctx in contexts(rng, cfg):
        rec.start(0)
        rec.identity(f"{label}.identity", ref, sc.trace(ctx, np.eye(ctx.d)),
                     complex(np.sum(np.abs(ctx.x) ** 2)))
        for t in range(cfg.trials):
            b, c = sc.random_member(ctx, rng), sc.random_member(ctx, rng)
            rec.start(t, b, c)
            rec.identity(f"{label}.inner", ref, sc.trace(ctx, adjoint(b) @ c), sc.ghs_inner(ctx, c, b),
                         scale=sc.sigma(ctx, b) * sc.sigma(ctx, c))
            if label == "std":
                a = _cg(rng, ctx.d, ctx.d)
                rec.identity(f"{label}.matrix", ref, sc.trace(ctx, a), complex(np.trace(a)))


def suite_is_member_trace_class(rng, cfg, rec):
    ref = "products of two members are certified trace class"
    for label, ctx in contexts(rng, cfg):
        rec.start(0)
        rec.flag(f"{label}.zero", ref, sc.is_member_trace_class(ctx, np.zeros((ctx.d, ctx.d))).is_member)
        for t in range(cfg.trials):
            b, c = sc.random_member(ctx, rng), sc.random_member(ctx, rng)
            rec.start(t, b, c)
            v = sc.is_member_trace_class(ctx, b @ c)
            rec.flag(f"{label}.product", ref, v.is_member)
            rec.flag(f"{label}.finite", ref, bool(np.isfinite(abs(sc.trace(ctx, b @ c)))))


def suite_tau(rng, cfg, rec):
    ref = "tau(A) = Tr([A]) = sigma([A]^(1/2))^2"
    for label, ctx in contexts(rng, cfg):
        for t in range(cfg.trials):
            a = sc.random_member(ctx, rng) @ sc.random_member(ctx, rng)
            rec.start(t, a)
            ta = sc.tau(ctx, a)
            rec.identity(f"{label}.halfpower", ref, sc.sigma(ctx, sc.half_power(a)) ** 2, ta)
            if label == "std":
                rec.identity(f"{label}.tracenorm", ref, ta, trace_norm(a))


def _ghs_suite(fn):
    def run(rng, cfg, rec):
        for label, ctx in contexts(rng, cfg):
            seed = int(rng.integers(2**63))
            rep = fn(ctx, seed=seed, trials=cfg.trials, rtol=cfg.rtol)
            for r in rep.records:
                r.id = f"{label}.{r.id}"
                rec.records.append(r)
    run.__name__ = fn.__name__
    return run


suite_ideal_suite = _ghs_suite(sc.ideal_suite)
suite_inner_suite = _ghs_suite(sc.inner_suite)
suite_trace_suite = _ghs_suite(sc.trace_suite)
suite_tau_suite = _ghs_suite(sc.tau_suite)
