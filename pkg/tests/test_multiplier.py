"""Multiplier assembly, bounds and closed forms against direct matrix oracles."""

import numpy as np
import pytest
from conftest import cgauss

from gmult import generators as gen
from gmult import multiplier as mp
from gmult.errors import (
    BiorthogonalityViolated,
    DimMismatch,
    PreconditionFailed,
    SharedDataMismatch,
    ZeroProbe,
    ZeroVector,
)
from gmult.gbessel import OpSequence, TailLaw, random_onb
from gmult.linalg import adjoint, frobenius_norm, operator_norm, trace_norm
from gmult.multiplier import MultiplierSpec, WeightSeq


def rel(a, b):
    return operator_norm(a - b) / (1 + operator_norm(b))


# -- weights and specs --------------------------------------------------------


def test_weightseq_norms_and_tags():
    w = WeightSeq([3, -4j], "l2")
    assert w.sup_norm() == 4 and w.l1_norm() == 7 and w.l2_norm() == pytest.approx(5)
    g = WeightSeq([0.5, 0.25], "l1", TailLaw("geometric", 0.5))
    assert g.l1_norm() == pytest.approx(1.0)
    assert g.sup_after(2) == pytest.approx(0.125)
    with pytest.raises(ValueError):
        WeightSeq([1.0], "l1", TailLaw("power", -1.0))  # harmonic tail is not summable
    with pytest.raises(ValueError):
        WeightSeq([1.0], "lp")


def test_weightseq_json():
    w = WeightSeq([1 + 2j, 0.5], "c0", TailLaw("power", -2.0))
    back = WeightSeq.from_json(w.to_json())
    np.testing.assert_array_equal(back.values, w.values)
    assert back.class_tag == "c0" and back.tail_law == w.tail_law


def test_spec_dimension_checks(rng):
    a = OpSequence(cgauss(rng, 3, 2, 4))
    with pytest.raises(DimMismatch):
        MultiplierSpec(WeightSeq(np.ones(2)), a, a, np.ones((3, 2)), np.ones((3, 2)))
    with pytest.raises(DimMismatch):
        MultiplierSpec(WeightSeq(np.ones(3)), a, a, np.ones((3, 1)), np.ones((3, 2)))


def test_spec_json_round_trip(rng):
    s = gen.random_spec(rng, 5, 2, 3)
    back = MultiplierSpec.from_json(s.to_json())
    np.testing.assert_array_equal(mp.assemble(back), mp.assemble(s))


# -- assembly and existence bound ---------------------------------------------


def test_assemble_std_diag():
    s = mp.std_spec([2, 3])
    np.testing.assert_allclose(mp.assemble(s), np.diag([2, 3]))
    assert mp.existence_bound(s) == pytest.approx(3.0)
    assert operator_norm(mp.assemble(s)) == pytest.approx(3.0)


def test_assemble_single_term(rng):
    s = gen.random_spec(rng, 6, 2, 3)
    lam = np.zeros(3, complex)
    lam[1] = 2 - 1j
    m = mp.assemble(s.with_weights(WeightSeq(lam)))
    np.testing.assert_allclose(m, lam[1] * np.outer(s.u[1], np.conj(s.v[1])), atol=1e-12)


def test_assemble_termwise_oracle(rng):
    s = gen.random_spec(rng, 6, 2, 3)
    m = mp.assemble(s)
    for _ in range(50):
        h = cgauss(rng, 6)
        direct = sum(s.lam.values[n] * np.vdot(adjoint(s.b[n]) @ s.y[n], h) * (adjoint(s.a[n]) @ s.x[n])
                     for n in range(3))
        assert np.linalg.norm(m @ h - direct) <= 1e-10 * (1 + np.linalg.norm(direct))


def test_existence_bound_random(rng):
    for _ in range(500):
        s = gen.random_spec(rng, int(rng.integers(1, 7)), int(rng.integers(1, 3)), int(rng.integers(1, 5)))
        m = mp.assemble(s)
        assert operator_norm(m) <= mp.existence_bound(s) + 1e-9 * (1 + operator_norm(m))


def test_zero_weights():
    s = mp.std_spec([0, 0])
    assert mp.existence_bound(s) == 0 and not np.any(mp.assemble(s))


# -- adjoint, reductions, powers ----------------------------------------------


def test_adjoint(rng):
    s = gen.random_spec(rng, 5, 2, 3)
    m = mp.assemble(s)
    adj = mp.multiplier_adjoint(s)
    assert operator_norm(mp.assemble(adj) - adjoint(m)) <= 1e-10 * (1 + operator_norm(m))
    np.testing.assert_array_equal(mp.assemble(mp.multiplier_adjoint(adj)), m)
    sa = MultiplierSpec(WeightSeq(rng.standard_normal(3)), s.a, s.a, s.x, s.x)
    ma = mp.assemble(sa)
    assert operator_norm(ma - adjoint(ma)) <= 1e-12 * operator_norm(ma)


def test_mmstar_std_example():
    s = mp.std_spec([2, 3j])
    mu, root = mp.mmstar_reduction(s)
    np.testing.assert_allclose(mu.values, [4, 9])
    np.testing.assert_allclose(mp.assemble(s) @ adjoint(mp.assemble(s)), np.diag([4, 9]))
    np.testing.assert_allclose(root.values, [2, 3])


def test_mmstar_random(rng):
    for _ in range(20):
        s = gen.orthogonal_spec(rng, 6, 2, 3, b_orthogonal=True)
        m = mp.assemble(s)
        mu, root = mp.mmstar_reduction(s)
        m_mu = mp.assemble(MultiplierSpec(mu, s.a, s.a, s.x, s.x))
        m_root = mp.assemble(MultiplierSpec(root, s.a, s.a, s.x, s.x))
        assert operator_norm(m @ adjoint(m) - m_mu) <= 1e-9 * (1 + operator_norm(m) ** 2)
        assert operator_norm(m_root @ m_root - m @ adjoint(m)) <= 1e-9 * (1 + operator_norm(m) ** 2)
        # the positive square root is unique, so PSD plus the squared identity pins it down
        assert operator_norm(m_root - adjoint(m_root)) <= 1e-12 * (1 + operator_norm(m))
        assert np.linalg.eigvalsh(m_root).min() >= -1e-9 * (1 + operator_norm(m))


def test_mstarm_random(rng):
    for _ in range(20):
        s = gen.orthogonal_spec(rng, 6, 2, 3, b_orthogonal=True)
        m = mp.assemble(s)
        gamma, root = mp.mstarm_reduction(s)
        m_g = mp.assemble(MultiplierSpec(gamma, s.b, s.b, s.y, s.y))
        m_root = mp.assemble(MultiplierSpec(root, s.b, s.b, s.y, s.y))
        assert operator_norm(adjoint(m) @ m - m_g) <= 1e-9 * (1 + operator_norm(m) ** 2)
        assert operator_norm(m_root @ m_root - adjoint(m) @ m) <= 1e-9 * (1 + operator_norm(m) ** 2)


def test_reduction_zero_weights(rng):
    s = gen.orthogonal_spec(rng, 6, 2, 3, b_orthogonal=True)
    s0 = s.with_weights(WeightSeq(np.zeros(3)))
    assert not np.any(mp.mmstar_reduction(s0)[0].values)
    assert not np.any(mp.mstarm_reduction(s0)[0].values)


def test_reduction_preconditions(rng):
    s = gen.random_spec(rng, 6, 2, 3)
    with pytest.raises(PreconditionFailed):
        mp.mmstar_reduction(s)
    with pytest.raises(PreconditionFailed):
        mp.mstarm_reduction(s)
    so = gen.orthogonal_spec(rng, 6, 2, 3, b_orthogonal=True)
    x = np.array(so.x)
    x[1] = 0
    with pytest.raises(ZeroVector):
        mp.mmstar_reduction(so.evolve(x=x))
    assert mp.mmstar_reduction(so.evolve(x=x), sqrt=False)[1] is None


def test_power_formula(rng):
    s = mp.std_spec([2, 3])
    np.testing.assert_allclose(mp.power_formula(s, 3), np.diag([8, 27]))
    b = gen.biorthogonal_spec(rng, 6, 2, 3)
    m = mp.assemble(b)
    np.testing.assert_allclose(mp.power_formula(b, 1), m, atol=1e-12)
    m4 = np.linalg.matrix_power(m, 4)
    assert operator_norm(mp.power_formula(b, 4) - m4) <= 1e-8 * (1 + operator_norm(m) ** 4)


def test_power_formula_rejects_non_biorthogonal(rng):
    s = gen.random_spec(rng, 6, 2, 3)
    with pytest.raises(BiorthogonalityViolated) as err:
        mp.power_formula(s, 2)
    assert err.value.max_pairing > 0


def test_symbolic_product(rng):
    b = gen.biorthogonal_spec(rng, 6, 2, 3)
    b2 = b.with_weights(gen.random_weights(rng, 3))
    prod = mp.symbolic_product(b, b2)
    m1, m2 = mp.assemble(b), mp.assemble(b2)
    assert operator_norm(mp.assemble(prod) - m1 @ m2) <= 1e-9 * (1 + operator_norm(m1) * operator_norm(m2))
    s = mp.std_spec([2, 3])
    np.testing.assert_allclose(mp.symbolic_product(s, mp.std_spec([5, 7])).lam.values, [10, 21])
    with pytest.raises(SharedDataMismatch):
        mp.symbolic_product(b, gen.biorthogonal_spec(rng, 6, 2, 3))


def test_symbolic_unit_pairing_case(rng):
    # one term with <A^* x, B^* y> = 1 gives nu = lam mu
    s = gen.biorthogonal_spec(rng, 4, 2, 1)
    pairing = np.vdot(s.v[0], s.u[0])
    s = s.evolve(x=s.x / pairing)
    assert np.vdot(s.v[0], s.u[0]) == pytest.approx(1.0)
    s2 = s.with_weights(WeightSeq([1.5j]))
    nu = mp.symbolic_product(s, s2).lam.values
    assert nu[0] == pytest.approx(s.lam.values[0] * 1.5j)
    ones = s.with_weights(WeightSeq([1.0]))
    assert mp.symbolic_product(s, ones).lam.values[0] == pytest.approx(s.lam.values[0])


@pytest.mark.parametrize("site", mp.SITES)
def test_composition_identities(rng, site):
    for _ in range(20):
        s = gen.random_spec(rng, 6, 2, 3)
        arg = cgauss(rng, 6, 6) if site in ("BS", "AS") else cgauss(rng, 3, 2, 2)
        lhs, rhs = mp.composition_identity(s, site, arg)
        assert operator_norm(lhs - rhs) <= 1e-10 * (1 + operator_norm(rhs))


def test_composition_with_identity(rng):
    s = gen.random_spec(rng, 6, 2, 3)
    ident = np.broadcast_to(np.eye(2), (3, 2, 2))
    for site in ("TB", "TA", "Ty", "Tx"):
        np.testing.assert_allclose(mp.assemble(mp.compose_maps(s, site, ident)), mp.assemble(s), atol=1e-12)
    for site in ("BS", "AS"):
        np.testing.assert_allclose(mp.assemble(mp.compose_maps(s, site, np.eye(6))), mp.assemble(s), atol=1e-12)
    with pytest.raises(DimMismatch):
        mp.compose_maps(s, "TB", np.eye(2))
    with pytest.raises(ValueError):
        mp.compose_maps(s, "XY", np.eye(6))


def test_product_general(rng):
    for _ in range(20):
        s1, s2 = gen.product_pair(rng, 6, 2, 3)
        m1, m2 = mp.assemble(s1), mp.assemble(s2)
        assert operator_norm(mp.product_general(s1, s2) - m1 @ m2) <= 1e-9 * (1 + operator_norm(m1 @ m2))
    s1, s2 = gen.product_pair(rng, 6, 2, 3)
    assert not np.any(mp.product_general(s1.with_weights(WeightSeq(np.zeros(3))), s2))
    b = gen.biorthogonal_spec(rng, 6, 2, 3)
    np.testing.assert_allclose(mp.product_general(b, b), mp.assemble(mp.symbolic_product(b, b)), atol=1e-12)
    with pytest.raises(BiorthogonalityViolated):
        mp.product_general(gen.random_spec(rng, 6, 2, 3), gen.random_spec(rng, 6, 2, 3))


def test_norm_product_bound(rng):
    for _ in range(200):
        s = gen.orthogonal_spec(rng, 6, 2, 3)
        s_mu = s.with_weights(gen.random_weights(rng, 3))
        lhs, rhs = mp.norm_product_bound(s, s_mu)
        assert lhs <= rhs + 1e-9 * (1 + rhs)
    s = gen.orthogonal_spec(rng, 6, 2, 3)
    ones = s.with_weights(WeightSeq(np.ones(3)))
    lhs, rhs = mp.norm_product_bound(s, ones)
    assert lhs == pytest.approx(operator_norm(mp.assemble(s)))
    zero = s.with_weights(WeightSeq(np.zeros(3)))
    assert mp.norm_product_bound(zero, s) == (0.0, 0.0)
    with pytest.raises(PreconditionFailed):
        g = gen.random_spec(rng, 6, 2, 3)
        mp.norm_product_bound(g, g)


def test_linearity_ledger(rng):
    for _ in range(200):
        s = gen.random_spec(rng, 5, 2, 3)
        o = gen.random_spec(rng, 5, 2, 3)
        al = complex(cgauss(rng))
        m = mp.assemble(s)
        tol = 1e-10 * (1 + abs(al) * operator_norm(m))
        assert operator_norm(mp.assemble(s.with_weights(WeightSeq(al * s.lam.values))) - al * m) <= tol
        assert operator_norm(mp.assemble(s.evolve(x=al * s.x)) - al * m) <= tol
        assert operator_norm(mp.assemble(s.evolve(b=s.b.scaled(al))) - al * m) <= tol
        assert operator_norm(mp.assemble(s.evolve(a=s.a.scaled(al))) - np.conj(al) * m) <= tol
        assert operator_norm(mp.assemble(s.evolve(y=al * s.y)) - np.conj(al) * m) <= tol
        for field in ("a", "b", "x", "y"):
            mine, theirs = getattr(s, field), getattr(o, field)
            both = mp.assemble(s.evolve(**{field: mine + theirs}))
            part = mp.assemble(s.evolve(**{field: theirs}))
            assert rel(both, m + part) <= 1e-10
        lam_sum = s.with_weights(WeightSeq(s.lam.values + o.lam.values))
        assert rel(mp.assemble(lam_sum), m + mp.assemble(s.with_weights(o.lam))) <= 1e-10


def test_normality(rng):
    for _ in range(50):
        m = mp.assemble(gen.normal_spec(rng, 6, 2, 3))
        assert operator_norm(m @ adjoint(m) - adjoint(m) @ m) <= 1e-9 * (1 + operator_norm(m) ** 2)


# -- compactness, nuclear and Hilbert-Schmidt bounds --------------------------


def test_tail_compactness(rng):
    s = gen.random_spec(rng, 6, 2, 5)
    s = s.with_weights(gen.geometric_weights(rng, 5, 0.5))
    assert mp.tail_compactness(s, 0)[0] == pytest.approx(operator_norm(mp.assemble(s)))
    prev = np.inf
    for m in range(6):
        lhs, rhs = mp.tail_compactness(s, m)
        assert lhs <= rhs + 1e-9 * (1 + rhs)
        assert rhs <= prev
        prev = rhs
    lhs, rhs = mp.tail_compactness(s, 5)
    assert lhs == 0 and rhs == pytest.approx(mp._bound_constant(s) * 0.5**6)
    untailed = s.with_weights(WeightSeq(s.lam.values))
    assert mp.tail_compactness(untailed, 5) == (0.0, 0.0)


def test_nuclear_bound(rng):
    for _ in range(200):
        s = gen.random_spec(rng, 5, 2, 3, class_tag="l1")
        lhs, rhs = mp.nuclear_bound(s)
        assert lhs <= rhs + 1e-9 * (1 + rhs)
    s = gen.random_spec(rng, 5, 2, 3, class_tag="l1")
    lam = np.zeros(3, complex)
    lam[2] = 1.5
    single = s.with_weights(WeightSeq(lam, "l1"))
    expect = 1.5 * np.linalg.norm(single.u[2]) * np.linalg.norm(single.v[2])
    assert mp.nuclear_bound(single)[0] == pytest.approx(expect, rel=1e-10)
    with pytest.raises(PreconditionFailed):
        mp.nuclear_bound(gen.random_spec(rng, 5, 2, 3))


def test_hs_bound(rng):
    s = mp.std_spec([2, 3]).with_weights(WeightSeq([2, 3], "l2"))
    lhs, _ = mp.hs_bound(s)
    assert lhs == pytest.approx(np.sqrt(13))
    assert mp.hs_exact_identity(s) == pytest.approx((13.0, 13.0))
    for _ in range(100):
        s = gen.orthogonal_spec(rng, 6, 2, 3, class_tag="l2")
        lhs, rhs = mp.hs_bound(s)
        assert lhs <= rhs + 1e-9 * (1 + rhs)
        a, b = mp.hs_exact_identity(s)
        assert a == pytest.approx(b, rel=1e-9)
    with pytest.raises(PreconditionFailed):
        mp.hs_bound(gen.random_spec(rng, 6, 2, 3, class_tag="l2"))


def test_convergence_study(rng):
    s = gen.orthogonal_spec(rng, 6, 2, 3)
    same = [s.lam.values] * 3
    for mode in ("operator", "nuclear", "hs"):
        assert all(d == 0 for d, _ in mp.convergence_study(s, same, mode))
    e1 = np.eye(3)[0]
    fam = [s.lam.values + e1 / k for k in range(1, 11)]
    rows = mp.convergence_study(s, fam, "operator")
    c = mp._bound_constant(s)
    for k, (dist, const) in enumerate(rows, start=1):
        assert const == pytest.approx(c / k)
        assert dist <= const + 1e-12
    std = mp.std_spec([1.0, 2.0])
    rows = mp.convergence_study(std, [std.lam.values + np.array([0.3, 0.4])], "hs")
    assert rows[0][0] == pytest.approx(0.5)
    with pytest.raises(ValueError):
        mp.convergence_study(s, fam, "sup")


# -- lower bounds and recovery ------------------------------------------------


def test_lower_bound_diag_tight():
    s = mp.std_spec([2, -3])
    lb = mp.lower_bound(s)
    assert lb.probe_lower == pytest.approx(3.0) and lb.upper == pytest.approx(3.0)
    assert lb.closed_form_lower == pytest.approx(3.0)
    z = mp.lower_bound(mp.std_spec([0, 0]))
    assert z == (0.0, 0.0, 0.0)


def test_lower_bound_sandwich(rng):
    for _ in range(50):
        s, _ = gen.riesz_spec(rng, 2, 3)
        lb = mp.lower_bound(s, cgauss(rng, 50, 2))
        nm = operator_norm(mp.assemble(s))
        tol = 1e-9 * (1 + nm)
        assert lb.probe_lower <= nm + tol and lb.closed_form_lower <= nm + tol and nm <= lb.upper + tol


def test_lower_bound_errors(rng):
    s, _ = gen.riesz_spec(rng, 2, 3)
    with pytest.raises(ZeroProbe):
        mp.lower_bound(s, [np.zeros(2)])
    with pytest.raises(PreconditionFailed):
        mp.lower_bound(gen.random_spec(rng, 6, 2, 3))


def test_recover_lambda(rng):
    s = mp.std_spec([2, 3j])
    got = mp.recover_lambda(mp.assemble(s), s.a, s.b, s.x, s.y)
    np.testing.assert_allclose(got.values, [2, 3j], atol=1e-14)
    assert not np.any(mp.recover_lambda(np.zeros((2, 2)), s.a, s.b, s.x, s.y).values)
    for _ in range(50):
        s, _ = gen.riesz_spec(rng, 2, 3)
        got = mp.recover_lambda(mp.assemble(s), s.a, s.b, s.x, s.y)
        assert np.all(np.abs(got.values - s.lam.values) <= 1e-8 * (1 + np.abs(s.lam.values)))
    y = np.array(s.y)
    y[0] = 0
    with pytest.raises(ZeroVector):
        mp.recover_lambda(mp.assemble(s), s.a, s.b, s.x, y)


# -- sweep --------------------------------------------------------------------


def test_unbounded_sweep():
    rows = mp.unbounded_sweep(TailLaw("power", 1.0), (1, [2, 4, 8]), std=True)
    assert [r[1] for r in rows] == pytest.approx([2, 4, 8], abs=1e-12)
    rows = mp.unbounded_sweep(TailLaw("power", 0.0), (2, [2, 4, 8]), seed=3)
    assert all(r[1] <= 1 + 1e-12 for r in rows)
    rows = mp.unbounded_sweep(TailLaw("power", -1.0), (2, [2, 5, 9]), seed=3)
    assert max(r[1] for r in rows) <= 1 + 1e-12


def test_sweep_growth_lower_bound():
    # unbounded weights: norms dominate inf_n ||x_n|| ||y_n|| * max |lam_n| = N
    rows = mp.unbounded_sweep(TailLaw("power", 1.0), (2, [3, 6, 12]), seed=9)
    for n, norm in rows:
        assert norm >= n * (1 - 1e-9)


def test_specs_are_immutable(rng):
    s = gen.random_spec(rng, 4, 1, 2)
    with pytest.raises(ValueError):
        s.x[0, 0] = 1.0
    assert isinstance(s.a, OpSequence)
    assert random_onb(1, 2, 0).n == 2
    assert frobenius_norm(mp.assemble(s)) <= trace_norm(mp.assemble(s)) + 1e-12
