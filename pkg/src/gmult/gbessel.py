"""Finite operator-valued sequences {A_n}, each A_n a d0 x d matrix.

Provides Bessel bounds, classification (orthogonal, orthonormal sequence,
orthonormal basis, Riesz basis), seeded constructors and the transition
operators between bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimMismatch, NotOrthonormalBasis, NotRieszBasis
from .linalg import adjoint, matrix_from_json, matrix_to_json, operator_norm, tolerance

TAIL_KINDS = ("none", "geometric", "power")


@dataclass(frozen=True)
class TailLaw:
    """Symbolic decay law for a sequence beyond its stored terms.

    ``geometric`` means value r**n, ``power`` means n**s (1-based n).
    """

    kind: str = "none"
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in TAIL_KINDS:
            raise ValueError(f"unknown tail law {self.kind!r}")
        if not np.isfinite(self.param):
            raise ValueError("tail law parameter must be finite")

    def value(self, n: int) -> float:
        if self.kind == "geometric":
            return float(self.param) ** n
        if self.kind == "power":
            return float(n) ** float(self.param)
        return 0.0

    def to_json(self) -> dict:
        return {"kind": self.kind, "param": float(self.param)}

    @classmethod
    def from_json(cls, obj) -> "TailLaw":
        if obj is None:
            return cls()
        return cls(str(obj.get("kind", "none")), float(obj.get("param", 0.0)))


NO_TAIL = TailLaw()


@dataclass(frozen=True, eq=False)
class OpSequence:
    ops: np.ndarray  # (N, d0, d)
    tail_law: TailLaw = field(default=NO_TAIL)

    def __post_init__(self):
        ops = np.array(self.ops, dtype=np.complex128)
        if ops.ndim != 3:
            raise DimMismatch(f"ops must have shape (N, d0, d), got {ops.shape}")
        if ops.shape[1] < 1 or ops.shape[2] < 1:
            raise DimMismatch("d and d0 must be positive")
        if not np.all(np.isfinite(ops)):
            raise ValueError("ops has non-finite entries")
        ops.flags.writeable = False
        object.__setattr__(self, "ops", ops)

    @property
    def n(self) -> int:
        return self.ops.shape[0]

    @property
    def d0(self) -> int:
        return self.ops.shape[1]

    @property
    def d(self) -> int:
        return self.ops.shape[2]

    def __len__(self):
        return self.n

    def __getitem__(self, k) -> np.ndarray:
        return self.ops[k]

    def analysis(self) -> np.ndarray:
        """Stacked (N*d0) x d matrix mapping h to (A_1 h, ..., A_N h)."""
        return self.ops.reshape(self.n * self.d0, self.d)

    def synthesis(self) -> np.ndarray:
        """d x (N*d0) matrix [A_1^* | ... | A_N^*]."""
        return adjoint(self.analysis())

    def adjoint_apply(self, vecs) -> np.ndarray:
        """Rows A_n^* v_n for a (N, d0) array of vectors."""
        vecs = np.asarray(vecs, dtype=np.complex128)
        if vecs.shape != (self.n, self.d0):
            raise DimMismatch(f"expected vectors of shape {(self.n, self.d0)}, got {vecs.shape}")
        return kernels.adjoint_apply(self.ops, vecs)

    def map(self, fn) -> "OpSequence":
        return OpSequence(np.stack([fn(k, a) for k, a in enumerate(self.ops)]), self.tail_law)

    def scaled(self, alpha) -> "OpSequence":
        return OpSequence(alpha * self.ops, self.tail_law)

    def right_multiply(self, s) -> "OpSequence":
        """{A_n S}."""
        s = np.asarray(s, dtype=np.complex128)
        if s.shape != (self.d, self.d):
            raise DimMismatch(f"right factor must be {self.d}x{self.d}")
        return OpSequence(self.ops @ s, self.tail_law)

    def left_multiply(self, ts) -> "OpSequence":
        """{T_n A_n} for a (N, d0, d0) stack."""
        ts = np.asarray(ts, dtype=np.complex128)
        if ts.shape != (self.n, self.d0, self.d0):
            raise DimMismatch(f"left factors must have shape {(self.n, self.d0, self.d0)}")
        return OpSequence(ts @ self.ops, self.tail_law)

    def __add__(self, other: "OpSequence") -> "OpSequence":
        if self.ops.shape != other.ops.shape:
            raise DimMismatch(f"cannot add sequences of shapes {self.ops.shape} and {other.ops.shape}")
        return OpSequence(self.ops + other.ops)

    def same_as(self, other: "OpSequence") -> bool:
        return self.ops.shape == other.ops.shape and bool(np.array_equal(self.ops, other.ops))

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "d0": self.d0,
            "ops": [matrix_to_json(a) for a in self.ops],
            "tailLaw": self.tail_law.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OpSequence":
        d, d0 = int(obj["d"]), int(obj["d0"])
        mats = [matrix_from_json(m) for m in obj["ops"]]
        if not mats:
            raise DimMismatch("an operator sequence needs at least one term")
        for k, m in enumerate(mats):
            if m.shape != (d0, d):
                raise DimMismatch(f"ops[{k}] has shape {m.shape}, expected {(d0, d)}")
        return cls(np.stack(mats), TailLaw.from_json(obj.get("tailLaw")))


@dataclass(frozen=True)
class SequenceClassification:
    bessel_bound: float
    is_orthogonal: bool
    is_orthonormal_sequence: bool
    is_orthonormal_basis: bool
    riesz_bounds: tuple[float, float] | None
    residuals: dict

    @property
    def is_riesz_basis(self) -> bool:
        return self.riesz_bounds is not None


def frame_operator(a: OpSequence) -> np.ndarray:
    s = kernels.gram_sum(a.ops)
    return 0.5 * (s + adjoint(s))


def optimal_bessel_bound(a: OpSequence) -> float:
    w = np.linalg.eigvalsh(frame_operator(a))
    return float(max(w[-1], 0.0))


def sqrt_bessel_bound(a: OpSequence) -> float:
    return float(np.sqrt(optimal_bessel_bound(a)))


def classify(a: OpSequence, tol: float | None = None) -> SequenceClassification:
    if tol is None:
        tol = tolerance(operator_norm(a.analysis()))
    s = frame_operator(a)
    w = np.linalg.eigvalsh(s)
    b = float(max(w[-1], 0.0))
    blocks = a.analysis() @ a.synthesis()  # block (n, m) is A_n A_m^*
    nd0 = blocks.shape[0]
    block_res = 0.0
    for i in range(a.n):
        for j in range(a.n):
            blk = blocks[i * a.d0:(i + 1) * a.d0, j * a.d0:(j + 1) * a.d0]
            target = np.eye(a.d0) if i == j else 0.0
            block_res = max(block_res, operator_norm(blk - target))
    frame_res = operator_norm(s - np.eye(a.d))
    orth = block_res <= tol
    onseq = orth and b <= 1.0 + tol
    onb = onseq and frame_res <= tol
    riesz = None
    sv = np.linalg.svd(a.synthesis(), compute_uv=False)
    smin = float(sv[-1]) if nd0 == a.d and sv.size else 0.0
    if nd0 == a.d and smin > tol:
        riesz = (smin**2, float(sv[0]) ** 2)
    residuals = {"orthogonality": block_res, "frame_identity": frame_res, "synthesis_smin": smin}
    return SequenceClassification(b, orth, onseq, onb, riesz, residuals)


# -- constructors -----------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_gaussian(rng: np.random.Generator, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-distributed d x d unitary (QR of a complex Gaussian, phases fixed)."""
    rng = _rng(seed)
    z = complex_gaussian(rng, d, d)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    phases = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return q * phases[None, :]


def from_rows(t, d0: int, tail_law: TailLaw = NO_TAIL) -> OpSequence:
    """Split the rows of a (N*d0) x d matrix into consecutive d0-row blocks."""
    t = np.asarray(t, dtype=np.complex128)
    rows, d = t.shape
    if rows % d0:
        raise DimMismatch(f"{rows} rows do not split into blocks of {d0}")
    return OpSequence(t.reshape(rows // d0, d0, d), tail_law)


def std_sequence(d: int) -> OpSequence:
    """Coordinate functionals e_n^* as 1 x d blocks."""
    return from_rows(np.eye(d), 1)


def random_onb(d0: int, n_terms: int, seed=None, d: int | None = None) -> OpSequence:
    if d0 < 1 or n_terms < 1:
        raise DimMismatch("d0 and nTerms must be positive")
    dim = d0 * n_terms
    if d is not None and d != dim:
        raise DimMismatch(f"an orthonormal basis needs d = nTerms*d0 = {dim}, got d = {d}")
    return from_rows(haar_unitary(dim, seed), d0)


def random_sequence(d: int, d0: int, n_terms: int, seed=None, scale: float = 1.0) -> OpSequence:
    rng = _rng(seed)
    return OpSequence(scale * complex_gaussian(rng, n_terms, d0, d))


def random_invertible(d: int, seed=None, max_cond: float = 100.0) -> np.ndarray:
    """U diag(s) V^* with s log-uniform in [1/sqrt(max_cond), sqrt(max_cond)]."""
    rng = _rng(seed)
    u = haar_unitary(d, rng)
    v = haar_unitary(d, rng)
    half = 0.5 * np.log(max_cond)
    s = np.exp(rng.uniform(-half, half, size=d))
    return (u * s) @ adjoint(v)


# -- transition operators ----------------------------------------------------


def _check_pair(b: OpSequence, a: OpSequence):
    if (b.n, b.d0, b.d) != (a.n, a.d0, a.d):
        raise DimMismatch(f"sequence shapes differ: {b.ops.shape} vs {a.ops.shape}")


def onb_transition_unitary(b: OpSequence, a: OpSequence, tol: float | None = None) -> np.ndarray:
    """The unitary U = sum_n B_n^* A_n, so that A_n = B_n U."""
    _check_pair(b, a)
    for name, seq in (("b", b), ("a", a)):
        if not classify(seq, tol).is_orthonormal_basis:
            raise NotOrthonormalBasis(f"{name} is not an orthonormal basis")
    return np.einsum("nab,nac->bc", np.conj(b.ops), a.ops)


def riesz_transition(f: OpSequence, a: OpSequence, tol: float | None = None) -> np.ndarray:
    """The invertible T = sum_n F_n^* A_n, so that A_n = F_n T."""
    _check_pair(f, a)
    if not classify(f, tol).is_orthonormal_basis:
        raise NotOrthonormalBasis("f is not an orthonormal basis")
    if not classify(a, tol).is_riesz_basis:
        raise NotRieszBasis("a is not a Riesz basis")
    return np.einsum("nab,nac->bc", np.conj(f.ops), a.ops)
