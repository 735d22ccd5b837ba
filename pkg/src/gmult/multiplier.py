"""Multipliers M = sum_n lam_n (A_n^* x_n) (B_n^* y_n)^* and their bounds.

Vectors x_n, y_n are stored as (N, d0) arrays; ``u_n = A_n^* x_n`` and
``v_n = B_n^* y_n`` are the rank-one factors in H.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.special import zeta

from . import kernels
from .errors import (
    BiorthogonalityViolated,
    DimMismatch,
    PreconditionFailed,
    SharedDataMismatch,
    ZeroProbe,
    ZeroVector,
)
from .gbessel import (
    NO_TAIL,
    OpSequence,
    TailLaw,
    classify,
    from_rows,
    optimal_bessel_bound,
    random_onb,
    riesz_transition,
    std_sequence,
)
from .linalg import (
    adjoint,
    frobenius_norm,
    operator_norm,
    trace_norm,
    vector_from_json,
    vector_to_json,
)

CLASS_TAGS = ("linf", "c0", "l1", "l2")
SITES = ("TB", "BS", "TA", "AS", "Ty", "Tx")


# -- weight sequences -------------------------------------------------------


def _tail_sup(law: TailLaw, after: int) -> float:
    """sup_{n > after} |law(n)|."""
    if law.kind == "geometric":
        r = abs(law.param)
        if r <= 1.0:
            return r ** (after + 1)
        return np.inf
    if law.kind == "power":
        if law.param <= 0:
            return float(after + 1) ** law.param
        return np.inf
    return 0.0


def _tail_sum(law: TailLaw, after: int, power: int) -> float:
    """sum_{n > after} |law(n)|**power in closed form (inf when divergent)."""
    if law.kind == "geometric":
        r = abs(law.param) ** power
        if r < 1.0:
            return r ** (after + 1) / (1.0 - r)
        return np.inf
    if law.kind == "power":
        s = law.param * power
        if s < -1.0:
            return float(zeta(-s, after + 1))
        return np.inf
    return 0.0


@dataclass(frozen=True, eq=False)
class WeightSeq:
    values: np.ndarray
    class_tag: str = "linf"
    tail_law: TailLaw = field(default=NO_TAIL)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise ValueError("weights must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if self.class_tag not in CLASS_TAGS:
            raise ValueError(f"unknown class tag {self.class_tag!r}")
        norm = {"linf": self.sup_norm, "c0": self.sup_norm, "l1": self.l1_norm, "l2": self.l2_norm}
        if not np.isfinite(norm[self.class_tag]()):
            raise ValueError(f"weights are not in {self.class_tag}")

    def __len__(self):
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def sup_norm(self) -> float:
        head = float(np.max(np.abs(self.values))) if self.n else 0.0
        return max(head, _tail_sup(self.tail_law, self.n))

    def sup_after(self, m: int) -> float:
        head = float(np.max(np.abs(self.values[m:]))) if m < self.n else 0.0
        return max(head, _tail_sup(self.tail_law, self.n))

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values))) + _tail_sum(self.tail_law, self.n, 1)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) + _tail_sum(self.tail_law, self.n, 2)))

    def with_values(self, values, class_tag: str | None = None) -> "WeightSeq":
        return WeightSeq(values, class_tag or self.class_tag)

    def to_json(self) -> dict:
        return {
            "values": [[float(z.real), float(z.imag)] for z in self.values],
            "classTag": self.class_tag,
            "tailLaw": self.tail_law.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WeightSeq":
        vals = [complex(float(p[0]), float(p[1])) for p in obj["values"]]
        return cls(np.array(vals, dtype=np.complex128), obj.get("classTag", "linf"),
                   TailLaw.from_json(obj.get("tailLaw")))

    @classmethod
    def from_law(cls, law: TailLaw, n_terms: int, class_tag: str = "linf") -> "WeightSeq":
        return cls(np.array([law.value(k) for k in range(1, n_terms + 1)]), class_tag, law)


def _vecs(v, name: str) -> np.ndarray:
    a = np.array(v, dtype=np.complex128)
    if a.ndim != 2:
        raise DimMismatch(f"{name} must be an (N, d0) array of vectors")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class MultiplierSpec:
    lam: WeightSeq
    a: OpSequence
    b: OpSequence
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _vecs(self.x, "x"))
        object.__setattr__(self, "y", _vecs(self.y, "y"))
        n = self.lam.n
        if not (self.a.n == self.b.n == self.x.shape[0] == self.y.shape[0] == n):
            raise DimMismatch(
                f"term counts differ: lambda {n}, A {self.a.n}, B {self.b.n}, "
                f"x {self.x.shape[0]}, y {self.y.shape[0]}")
        if self.a.d != self.b.d:
            raise DimMismatch(f"A acts on dim {self.a.d}, B on dim {self.b.d}")
        if not (self.a.d0 == self.b.d0 == self.x.shape[1] == self.y.shape[1]):
            raise DimMismatch("A, B, x and y disagree on the target dimension d0")

    @property
    def n(self) -> int:
        return self.lam.n

    @property
    def d(self) -> int:
        return self.a.d

    @cached_property
    def bessel_bound_a(self) -> float:
        return optimal_bessel_bound(self.a)

    @cached_property
    def bessel_bound_b(self) -> float:
        return optimal_bessel_bound(self.b)

    @cached_property
    def sup_pair_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.x, axis=1) * np.linalg.norm(self.y, axis=1)))

    @cached_property
    def u(self) -> np.ndarray:
        return self.a.adjoint_apply(self.x)

    @cached_property
    def v(self) -> np.ndarray:
        return self.b.adjoint_apply(self.y)

    def with_weights(self, lam: WeightSeq) -> "MultiplierSpec":
        return MultiplierSpec(lam, self.a, self.b, self.x, self.y)

    def evolve(self, **changes) -> "MultiplierSpec":
        return replace(self, **changes)

    def shares_data(self, other: "MultiplierSpec") -> bool:
        return (self.a.same_as(other.a) and self.b.same_as(other.b)
                and np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y))

    def to_json(self) -> dict:
        return {
            "lambda": self.lam.to_json(),
            "A": self.a.to_json(),
            "B": self.b.to_json(),
            "x": [vector_to_json(v) for v in self.x],
            "y": [vector_to_json(v) for v in self.y],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MultiplierSpec":
        return cls(
            WeightSeq.from_json(obj["lambda"]),
            OpSequence.from_json(obj["A"]),
            OpSequence.from_json(obj["B"]),
            np.stack([vector_from_json(v) for v in obj["x"]]),
            np.stack([vector_from_json(v) for v in obj["y"]]),
        )


# -- assembly and bounds ----------------------------------------------------


def assemble(spec: MultiplierSpec) -> np.ndarray:
    return kernels.rank_one_sum(spec.lam.values, spec.u, spec.v)


def partial_sum(spec: MultiplierSpec, m: int) -> np.ndarray:
    """The first m terms of the multiplier."""
    return kernels.rank_one_sum(spec.lam.values[:m], spec.u[:m], spec.v[:m])


def existence_bound(spec: MultiplierSpec) -> float:
    return float(np.sqrt(spec.bessel_bound_a * spec.bessel_bound_b)
                 * spec.lam.sup_norm() * spec.sup_pair_norm)


def multiplier_adjoint(spec: MultiplierSpec) -> MultiplierSpec:
    lam = WeightSeq(np.conj(spec.lam.values), spec.lam.class_tag, spec.lam.tail_law)
    return MultiplierSpec(lam, spec.b, spec.a, spec.y, spec.x)


def _require(cond: bool, msg: str):
    if not cond:
        raise PreconditionFailed(msg)


def _norms(vecs) -> np.ndarray:
    return np.linalg.norm(vecs, axis=1)


def _derived(values) -> WeightSeq:
    # derived weights are only known on the truncation, so they carry the weakest tag
    return WeightSeq(values, "linf")


def mmstar_reduction(spec: MultiplierSpec, sqrt: bool = True, tol: float | None = None):
    """Weights mu with M M^* = M_{mu,A,A,x,x} and, optionally, its square root."""
    _require(classify(spec.a, tol).is_orthonormal_sequence, "A must be an orthonormal sequence")
    _require(classify(spec.b, tol).is_orthogonal, "B must be orthogonal")
    _require(np.isfinite(spec.lam.sup_norm() * np.max(_norms(spec.y))), "lam_n ||y_n|| must be bounded")
    lam_abs = np.abs(spec.lam.values)
    vn = _norms(spec.v)
    mu = _derived(lam_abs**2 * vn**2)
    if not sqrt:
        return mu, None
    xn = _norms(spec.x)
    if np.any(xn == 0):
        raise ZeroVector(f"x_{int(np.argmin(xn)) + 1} is zero")
    return mu, _derived(lam_abs * vn / xn)


def mstarm_reduction(spec: MultiplierSpec, sqrt: bool = True, tol: float | None = None):
    """Weights gamma with M^* M = M_{gamma,B,B,y,y} and, optionally, its square root."""
    _require(classify(spec.a, tol).is_orthogonal, "A must be orthogonal")
    _require(classify(spec.b, tol).is_orthonormal_sequence, "B must be an orthonormal sequence")
    _require(np.isfinite(spec.lam.sup_norm() * np.max(_norms(spec.x))), "lam_n ||x_n|| must be bounded")
    lam_abs = np.abs(spec.lam.values)
    un = _norms(spec.u)
    gamma = _derived(lam_abs**2 * un**2)
    if not sqrt:
        return gamma, None
    yn = _norms(spec.y)
    if np.any(yn == 0):
        raise ZeroVector(f"y_{int(np.argmin(yn)) + 1} is zero")
    return gamma, _derived(lam_abs * un / yn)


def pairings(left, right) -> np.ndarray:
    """P[k, n] = <left_k, right_n>."""
    return np.asarray(left) @ np.conj(right).T


def check_biorthogonal(left, right, rtol: float = 1e-10) -> np.ndarray:
    """Raise unless <left_k, right_n> = 0 for k != n; returns the diagonal pairings."""
    p = pairings(left, right)
    off = p - np.diag(np.diag(p))
    worst = float(np.max(np.abs(off))) if off.size else 0.0
    scale = float(np.max(_norms(left))) * float(np.max(_norms(right)))
    if worst > max(rtol * scale, 1e-12):
        raise BiorthogonalityViolated(f"off-diagonal pairing {worst:.3e} exceeds tolerance", worst)
    return np.diag(p).copy()


def power_formula(spec: MultiplierSpec, k: int) -> np.ndarray:
    if k < 1:
        raise ValueError("power must be a positive integer")
    diag = check_biorthogonal(spec.u, spec.v)
    w = spec.lam.values**k * diag ** (k - 1)
    return kernels.rank_one_sum(w, spec.u, spec.v)


def symbolic_product(s1: MultiplierSpec, s2: MultiplierSpec) -> MultiplierSpec:
    if not s1.shares_data(s2):
        raise SharedDataMismatch("both multipliers must share A, B, x and y")
    diag = check_biorthogonal(s1.u, s1.v)
    nu = s1.lam.values * s2.lam.values * diag
    return s1.with_weights(WeightSeq(nu, "linf"))


def _as_stack(ts, n: int, d0: int) -> np.ndarray:
    ts = np.asarray(ts, dtype=np.complex128)
    if ts.shape != (n, d0, d0):
        raise DimMismatch(f"expected {n} operators of shape {d0}x{d0}, got {ts.shape}")
    return ts


def _as_square(s, d: int) -> np.ndarray:
    s = np.asarray(s, dtype=np.complex128)
    if s.shape != (d, d):
        raise DimMismatch(f"expected a {d}x{d} operator, got {s.shape}")
    return s


def compose_maps(spec: MultiplierSpec, site: str, arg) -> MultiplierSpec:
    """Spec whose data carries the extra factor named by ``site``.

    TB, TA, Ty, Tx take a stack of N operators on H0; BS and AS take one
    operator on H. The companion :func:`composition_identity` returns the two
    matrices that the corresponding identity equates.
    """
    if site not in SITES:
        raise ValueError(f"unknown site {site!r}; expected one of {SITES}")
    if site in ("BS", "AS"):
        s = _as_square(arg, spec.d)
        if site == "BS":
            return spec.evolve(b=spec.b.right_multiply(s))
        return spec.evolve(a=spec.a.right_multiply(s))
    ts = _as_stack(arg, spec.n, spec.a.d0)
    if site == "TB":
        return spec.evolve(b=spec.b.left_multiply(ts))
    if site == "TA":
        return spec.evolve(a=spec.a.left_multiply(ts))
    if site == "Ty":
        return spec.evolve(y=np.einsum("nab,nb->na", ts, spec.y))
    return spec.evolve(x=np.einsum("nab,nb->na", ts, spec.x))


def composition_identity(spec: MultiplierSpec, site: str, arg) -> tuple[np.ndarray, np.ndarray]:
    """(assembled composite, the identity's right-hand side)."""
    lhs = assemble(compose_maps(spec, site, arg))
    if site == "BS":
        return lhs, assemble(spec) @ _as_square(arg, spec.d)
    if site == "AS":
        return lhs, adjoint(_as_square(arg, spec.d)) @ assemble(spec)
    ts = _as_stack(arg, spec.n, spec.a.d0)
    tsh = np.conj(np.transpose(ts, (0, 2, 1)))
    if site == "TB":
        rhs = spec.evolve(y=np.einsum("nab,nb->na", tsh, spec.y))
    elif site == "TA":
        rhs = spec.evolve(x=np.einsum("nab,nb->na", tsh, spec.x))
    elif site == "Ty":
        rhs = spec.evolve(b=spec.b.left_multiply(tsh))
    else:
        rhs = spec.evolve(a=spec.a.left_multiply(tsh))
    return lhs, assemble(rhs)


def product_general(s1: MultiplierSpec, s2: MultiplierSpec) -> np.ndarray:
    """Closed form of M_{lam,A,B,x,y} M_{mu,C,D,z,v}.

    Needs <C_k^* z_k, B_n^* y_n> = 0 for k != n; the surviving diagonal
    pairing is <C_n^* z_n, B_n^* y_n>.
    """
    if s1.n != s2.n or s1.d != s2.d:
        raise DimMismatch("the two multipliers must have equal N and d")
    diag = check_biorthogonal(s2.u, s1.v)
    w = s1.lam.values * s2.lam.values * diag
    return kernels.rank_one_sum(w, s1.u, s2.v)


def norm_product_bound(spec_lambda: MultiplierSpec, spec_mu: MultiplierSpec,
                       spec_lambda_mu: MultiplierSpec | None = None, tol: float | None = None):
    """(||M_{lam mu}||, min(sup|lam| ||M_mu||, sup|mu| ||M_lam||))."""
    if not spec_lambda.shares_data(spec_mu):
        raise SharedDataMismatch("specs must share A, B, x and y")
    prod = spec_lambda.lam.values * spec_mu.lam.values
    if spec_lambda_mu is None:
        spec_lambda_mu = spec_lambda.with_weights(WeightSeq(prod, "linf"))
    elif not spec_lambda.shares_data(spec_lambda_mu):
        raise SharedDataMismatch("specs must share A, B, x and y")
    elif not np.allclose(spec_lambda_mu.lam.values, prod, rtol=1e-12, atol=1e-12):
        raise PreconditionFailed("third spec must carry the product weights")
    _require(classify(spec_lambda.a, tol).is_orthogonal, "A must be orthogonal")
    lhs = operator_norm(assemble(spec_lambda_mu))
    rhs = min(spec_lambda.lam.sup_norm() * operator_norm(assemble(spec_mu)),
              spec_mu.lam.sup_norm() * operator_norm(assemble(spec_lambda)))
    return lhs, rhs


def _bound_constant(spec: MultiplierSpec) -> float:
    return float(np.sqrt(spec.bessel_bound_a * spec.bessel_bound_b) * spec.sup_pair_norm)


def tail_compactness(spec: MultiplierSpec, m: int) -> tuple[float, float]:
    """(||M - M_m||, sqrt(b_A b_B) sup||x||||y|| sup_{n>m}|lam_n|)."""
    if not 0 <= m <= spec.n:
        raise ValueError(f"m must lie in [0, {spec.n}]")
    tail = assemble(spec) - partial_sum(spec, m)
    return operator_norm(tail), _bound_constant(spec) * spec.lam.sup_after(m)


def nuclear_bound(spec: MultiplierSpec) -> tuple[float, float]:
    _require(spec.lam.class_tag == "l1", "weights must be tagged l1")
    return trace_norm(assemble(spec)), _bound_constant(spec) * spec.lam.l1_norm()


def hs_bound(spec: MultiplierSpec, tol: float | None = None) -> tuple[float, float]:
    _require(spec.lam.class_tag in ("l1", "l2"), "weights must be square summable")
    _require(classify(spec.a, tol).is_orthogonal, "A must be orthogonal")
    return frobenius_norm(assemble(spec)), _bound_constant(spec) * spec.lam.l2_norm()


def hs_exact_identity(spec: MultiplierSpec) -> tuple[float, float]:
    """(sigma(M)^2, sum |lam_n|^2 ||u_n||^2 ||v_n||^2); equal when A is orthogonal."""
    rhs = float(np.sum(np.abs(spec.lam.values) ** 2 * _norms(spec.u) ** 2 * _norms(spec.v) ** 2))
    return frobenius_norm(assemble(spec)) ** 2, rhs


_MODES = {
    "operator": (operator_norm, lambda w: float(np.max(np.abs(w)))),
    "nuclear": (trace_norm, lambda w: float(np.sum(np.abs(w)))),
    "hs": (frobenius_norm, lambda w: float(np.linalg.norm(w))),
}


def convergence_study(spec: MultiplierSpec, family, mode: str, tol: float | None = None):
    """[(distance of M_{lam^(k)} from M_lam, proof-side constant) for each lam^(k)]."""
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "hs":
        _require(classify(spec.a, tol).is_orthogonal, "A must be orthogonal")
    norm, wnorm = _MODES[mode]
    base = assemble(spec)
    c = _bound_constant(spec)
    out = []
    for lam_k in family:
        vals = lam_k.values if isinstance(lam_k, WeightSeq) else np.asarray(lam_k, dtype=np.complex128)
        if vals.shape != spec.lam.values.shape:
            raise DimMismatch("family members must have N weights")
        diff = kernels.rank_one_sum(vals, spec.u, spec.v) - base
        out.append((norm(diff), c * wnorm(vals - spec.lam.values)))
    return out


class LowerBounds(NamedTuple):
    probe_lower: float
    closed_form_lower: float
    upper: float


def lower_bound(spec: MultiplierSpec, probes=(), tol: float | None = None) -> LowerBounds:
    _require(classify(spec.a, tol).is_orthonormal_basis, "A must be an orthonormal basis")
    _require(classify(spec.b, tol).is_riesz_basis, "B must be a Riesz basis")
    t = riesz_transition(spec.a, spec.b, tol)
    t_inv = np.linalg.inv(t)
    probes = [np.asarray(g, dtype=np.complex128) for g in probes]
    for g in probes:
        if g.shape != (spec.a.d0,):
            raise DimMismatch(f"probe of shape {g.shape}, expected ({spec.a.d0},)")
        if not np.any(g):
            raise ZeroProbe("probe vectors must be nonzero")
    cands = probes + [g for g in spec.x if np.any(g)] + [g for g in spec.y if np.any(g)]
    lam = spec.lam.values
    xn, yn = _norms(spec.x), _norms(spec.y)
    best = 0.0
    for g in cands:
        num = np.abs(lam * (np.conj(spec.y) @ g)) * xn  # |lam_n <g, y_n>| ||x_n||
        den = np.linalg.norm(spec.a.adjoint_apply(np.tile(g, (spec.n, 1))) @ t_inv.T, axis=1)
        best = max(best, float(np.max(num / den)))
    tinv_norm = operator_norm(t_inv)
    closed = 0.0
    if np.all(xn > 0):
        closed = max(closed, float(np.max(np.abs(lam * np.sum(spec.x * np.conj(spec.y), axis=1)))) / tinv_norm)
    if np.all(yn > 0):
        closed = max(closed, float(np.max(np.abs(lam) * xn * yn)) / tinv_norm)
    upper = operator_norm(t) * spec.lam.sup_norm() * spec.sup_pair_norm
    return LowerBounds(best, closed, upper)


def recover_lambda(m, a: OpSequence, b: OpSequence, x, y, tol: float | None = None) -> WeightSeq:
    """Read off lam_k = <A_k m T^{-1} A_k^* y_k, x_k> / (||y_k||^2 ||x_k||^2)."""
    x = _vecs(x, "x")
    y = _vecs(y, "y")
    xn, yn = _norms(x), _norms(y)
    if np.any(xn == 0) or np.any(yn == 0):
        raise ZeroVector("x_n and y_n must all be nonzero")
    _require(classify(a, tol).is_orthonormal_basis, "A must be an orthonormal basis")
    _require(classify(b, tol).is_riesz_basis, "B must be a Riesz basis")
    t = riesz_transition(a, b, tol)
    m = np.asarray(m, dtype=np.complex128)
    h = np.linalg.solve(t, a.adjoint_apply(y).T).T  # rows T^{-1} A_k^* y_k
    mh = h @ m.T
    ak_mh = np.einsum("kab,kb->ka", a.ops, mh)
    num = np.sum(ak_mh * np.conj(x), axis=1)
    return WeightSeq(num / (yn**2 * xn**2), "linf")


def unbounded_sweep(law: TailLaw, dims, seed=0, std: bool = False):
    """[(N, ||M^(N)||)] for lam_n = law(n) over orthonormal bases and unit vectors.

    ``dims`` is ``(d0, n_list)``. With ``std=True`` the coordinate sequence
    (d0 = 1) and x_n = y_n = 1 are used instead of random bases.
    """
    d0, n_list = dims
    ss = np.random.SeedSequence(seed)
    out = []
    for n_terms, child in zip(n_list, ss.spawn(len(n_list))):
        lam = WeightSeq(np.array([law.value(k) for k in range(1, n_terms + 1)]), "linf")
        if std:
            a = b = std_sequence(n_terms)
            x = y = np.ones((n_terms, 1))
        else:
            rng = np.random.default_rng(child)
            a = random_onb(d0, n_terms, rng)
            b = random_onb(d0, n_terms, rng)
            x = _unit_rows(rng, n_terms, d0)
            y = _unit_rows(rng, n_terms, d0)
        out.append((n_terms, operator_norm(assemble(MultiplierSpec(lam, a, b, x, y)))))
    return out


def _unit_rows(rng, n, d0) -> np.ndarray:
    z = rng.standard_normal((n, d0)) + 1j * rng.standard_normal((n, d0))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def weights_on(spec: MultiplierSpec, values, class_tag: str = "linf") -> MultiplierSpec:
    return spec.with_weights(WeightSeq(values, class_tag))


def std_spec(values, x=None, y=None) -> MultiplierSpec:
    """Coordinate data: A = B = rows of I, d0 = 1, unit x and y by default."""
    values = np.asarray(values, dtype=np.complex128)
    n = values.shape[0]
    seq = from_rows(np.eye(n), 1)
    x = np.ones((n, 1)) if x is None else x
    y = np.ones((n, 1)) if y is None else y
    return MultiplierSpec(WeightSeq(values), seq, seq, x, y)
