"""Operator-valued sequences: Bessel bounds, classification and transitions."""

import numpy as np
import pytest
from conftest import cgauss

from gmult.errors import DimMismatch, NotOrthonormalBasis, NotRieszBasis
from gmult.gbessel import (
    OpSequence,
    TailLaw,
    classify,
    frame_operator,
    from_rows,
    haar_unitary,
    onb_transition_unitary,
    optimal_bessel_bound,
    random_invertible,
    random_onb,
    random_sequence,
    riesz_transition,
    sqrt_bessel_bound,
    std_sequence,
)
from gmult.linalg import adjoint, operator_norm


def test_std_sequence():
    s = std_sequence(2)
    np.testing.assert_allclose(frame_operator(s), np.eye(2))
    assert optimal_bessel_bound(s) == pytest.approx(1.0)
    c = classify(s)
    assert c.is_orthonormal_basis and c.riesz_bounds == pytest.approx((1.0, 1.0))


def test_bessel_bound_is_attained_and_valid(rng):
    a = random_sequence(5, 2, 4, rng)
    b = optimal_bessel_bound(a)
    for _ in range(100):
        h = cgauss(rng, 5)
        assert np.sum(np.abs(a.ops @ h) ** 2) <= b * np.vdot(h, h).real * (1 + 1e-10)
    top = np.linalg.eigh(frame_operator(a))[1][:, -1]
    assert np.sum(np.abs(a.ops @ top) ** 2) == pytest.approx(b, rel=1e-10)


def test_sum_of_bessel_sequences(rng):
    for _ in range(200):
        a = random_sequence(4, 2, 3, rng)
        c = random_sequence(4, 2, 3, rng)
        assert sqrt_bessel_bound(a + c) <= (sqrt_bessel_bound(a) + sqrt_bessel_bound(c)) * (1 + 1e-12)


def test_random_onb_classifies():
    for seed in range(10):
        f = random_onb(2, 3, seed)
        c = classify(f)
        assert c.is_orthogonal and c.is_orthonormal_sequence and c.is_orthonormal_basis
    assert classify(random_onb(1, 3, 5)).is_orthonormal_basis


def test_random_onb_dimension_check():
    with pytest.raises(DimMismatch):
        random_onb(2, 3, 0, d=5)


def test_random_onb_reproducible():
    assert random_onb(2, 3, 11).same_as(random_onb(2, 3, 11))
    assert not random_onb(2, 3, 11).same_as(random_onb(2, 3, 12))


def test_riesz_classification(rng):
    for _ in range(20):
        t = random_invertible(6, rng)
        c = classify(from_rows(t, 2))
        sv = np.linalg.svd(t, compute_uv=False)
        assert c.is_riesz_basis
        assert c.riesz_bounds[0] == pytest.approx(sv[-1] ** 2, rel=1e-9)
        assert c.riesz_bounds[1] == pytest.approx(sv[0] ** 2, rel=1e-9)


def test_orthonormal_sequence_not_basis():
    w = haar_unitary(5, 0)
    s = OpSequence(w[:4].reshape(2, 2, 5))
    c = classify(s)
    assert c.is_orthonormal_sequence and not c.is_orthonormal_basis and not c.is_riesz_basis


def test_non_orthogonal_is_rejected(rng):
    c = classify(random_sequence(4, 1, 4, rng))
    assert not c.is_orthogonal and c.is_riesz_basis


def test_haar_unitary(rng):
    u = haar_unitary(6, rng)
    np.testing.assert_allclose(adjoint(u) @ u, np.eye(6), atol=1e-12)


def test_transition_unitary(rng):
    b = random_onb(2, 3, rng)
    u0 = haar_unitary(6, rng)
    a = b.right_multiply(u0)
    u = onb_transition_unitary(b, a)
    assert operator_norm(adjoint(u) @ u - np.eye(6)) <= 1e-10
    assert operator_norm(u @ adjoint(u) - np.eye(6)) <= 1e-10
    assert operator_norm(u - u0) <= 1e-10
    for n in range(3):
        assert operator_norm(a[n] - b[n] @ u) <= 1e-10
    np.testing.assert_allclose(onb_transition_unitary(b, b), np.eye(6), atol=1e-12)


def test_transition_rejects_non_bases(rng):
    b = random_onb(2, 3, rng)
    with pytest.raises(NotOrthonormalBasis):
        onb_transition_unitary(b, b.scaled(2.0))
    with pytest.raises(DimMismatch):
        onb_transition_unitary(b, random_onb(1, 6, rng))


def test_riesz_transition(rng):
    f = random_onb(2, 3, rng)
    t0 = random_invertible(6, rng)
    a = f.right_multiply(t0)
    t = riesz_transition(f, a)
    assert operator_norm(t - t0) <= 1e-9 * (1 + operator_norm(t0))
    bounds = classify(a).riesz_bounds
    sv = np.linalg.svd(t, compute_uv=False)
    assert bounds == pytest.approx((sv[-1] ** 2, sv[0] ** 2), rel=1e-9)
    np.testing.assert_allclose(riesz_transition(f, f), np.eye(6), atol=1e-12)


def test_riesz_transition_errors(rng):
    f = random_onb(2, 3, rng)
    singular = f.right_multiply(np.diag([1, 1, 1, 1, 1, 0.0]))
    with pytest.raises(NotRieszBasis):
        riesz_transition(f, singular)
    with pytest.raises(NotOrthonormalBasis):
        riesz_transition(f.scaled(3.0), f)


def test_random_invertible_condition(rng):
    for _ in range(20):
        sv = np.linalg.svd(random_invertible(5, rng, 100.0), compute_uv=False)
        assert sv[0] / sv[-1] <= 100.0 * (1 + 1e-9)


def test_opsequence_validation_and_json(rng):
    with pytest.raises(DimMismatch):
        OpSequence(np.ones((2, 3)))
    with pytest.raises(ValueError):
        OpSequence(np.full((1, 1, 1), np.inf))
    s = OpSequence(cgauss(rng, 3, 2, 4), TailLaw("geometric", 0.5))
    back = OpSequence.from_json(s.to_json())
    assert back.same_as(s) and back.tail_law == s.tail_law
    assert s.analysis().shape == (6, 4) and s.synthesis().shape == (4, 6)
    with pytest.raises(ValueError):
        s.ops[0, 0, 0] = 1.0


def test_tail_law():
    assert TailLaw("geometric", 0.5).value(3) == pytest.approx(0.125)
    assert TailLaw("power", -1.0).value(4) == pytest.approx(0.25)
    assert TailLaw().value(7) == 0.0
    with pytest.raises(ValueError):
        TailLaw("cubic", 1.0)


def test_adjoint_apply(rng):
    s = OpSequence(cgauss(rng, 3, 2, 4))
    v = cgauss(rng, 3, 2)
    expect = np.stack([adjoint(s[n]) @ v[n] for n in range(3)])
    np.testing.assert_allclose(s.adjoint_apply(v), expect, atol=1e-14)
