"""Dense complex linear-algebra primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; vectors are 1-D
arrays. The inner product is linear in the first slot and conjugate-linear in
the second, so ``inner(h, y) == np.vdot(y, h)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NotHermitian, NotPSD, NotUnitary

DEFAULT_RTOL = 1e-9
ABS_FLOOR = 1e-12
EPS = np.finfo(np.float64).eps


def tolerance(scale: float = 0.0, rtol: float = DEFAULT_RTOL) -> float:
    """Tolerance relative to ``1 + scale`` with an absolute floor."""
    return max(rtol * (1.0 + abs(scale)), ABS_FLOOR)


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def as_vector(v, name: str = "vector") -> np.ndarray:
    a = np.asarray(v, dtype=np.complex128)
    if a.ndim != 1:
        raise DimMismatch(f"{name} must be 1-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def inner(h: np.ndarray, y: np.ndarray) -> complex:
    """<h, y>, conjugate-linear in ``y``."""
    return complex(np.vdot(y, h))


def rank_one(x, y) -> np.ndarray:
    """The operator h -> <h, y> x, i.e. entries x_i * conj(y_j)."""
    return np.outer(as_vector(x, "x"), np.conj(as_vector(y, "y")))


def singular_values(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def operator_norm(m) -> float:
    s = singular_values(m)
    return float(s[0]) if s.size else 0.0


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def trace_norm(m) -> float:
    return float(np.sum(singular_values(m)))


def hermitian_part_defect(m: np.ndarray) -> float:
    return operator_norm(m - adjoint(m))


def sqrt_psd(m, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """Principal square root of a Hermitian positive semidefinite matrix.

    Small negative eigenvalues (above ``-rtol * ||m||``) are clamped to zero.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimMismatch(f"square matrix required, got {m.shape}")
    scale = operator_norm(m)
    tol = max(rtol * scale, ABS_FLOOR)
    if hermitian_part_defect(m) > tol:
        raise NotHermitian(f"||m - m*|| = {hermitian_part_defect(m):.3e} exceeds {tol:.3e}")
    h = 0.5 * (m + adjoint(m))
    w, v = np.linalg.eigh(h)
    if w.size and w[0] < -tol:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below {-tol:.3e}")
    r = (v * np.sqrt(np.clip(w, 0.0, None))) @ adjoint(v)
    return 0.5 * (r + adjoint(r))


def is_psd(m: np.ndarray, tol: float) -> bool:
    if hermitian_part_defect(m) > tol:
        return False
    w = np.linalg.eigvalsh(0.5 * (m + adjoint(m)))
    return bool(w.size == 0 or w[0] >= -tol)


@dataclass(frozen=True)
class PolarDecomposition:
    """a = w @ abs_a with w a partial isometry and abs_a = (a* a)^{1/2}."""

    w: np.ndarray
    abs_a: np.ndarray
    w_unitary: np.ndarray
    rank: int
    rank_tolerance: float

    @property
    def abs_adjoint(self) -> np.ndarray:
        """(a a*)^{1/2}, recovered as w [a] w*."""
        return self.w @ self.abs_a @ adjoint(self.w)


def polar_decompose(a) -> PolarDecomposition:
    a = as_matrix(a, "a")
    rows, cols = a.shape
    if rows != cols:
        raise DimMismatch(f"polar decomposition needs a square matrix, got {a.shape}")
    u, s, vh = np.linalg.svd(a)
    smax = float(s[0]) if s.size else 0.0
    rank_tol = max(rows, cols) * EPS * smax
    r = int(np.sum(s > rank_tol))
    w = u[:, :r] @ vh[:r, :]
    abs_a = (adjoint(vh) * s) @ vh
    abs_a = 0.5 * (abs_a + adjoint(abs_a))
    # full SVD factors give a deterministic unitary completion of w
    w_unitary = u @ vh
    return PolarDecomposition(w=w, abs_a=abs_a, w_unitary=w_unitary, rank=r, rank_tolerance=rank_tol)


def abs_op(a) -> np.ndarray:
    """[a] = (a* a)^{1/2}."""
    return polar_decompose(a).abs_a


@dataclass(frozen=True)
class ConjLinearIsometry:
    """theta(v) = theta_matrix @ conj(v) with ``theta_matrix`` unitary."""

    theta_matrix: np.ndarray

    def __post_init__(self):
        t = as_matrix(self.theta_matrix, "theta_matrix")
        if t.shape[0] != t.shape[1]:
            raise DimMismatch(f"theta_matrix must be square, got {t.shape}")
        defect = operator_norm(adjoint(t) @ t - np.eye(t.shape[0]))
        if defect > tolerance(1.0):
            raise NotUnitary(f"theta_matrix is not unitary (defect {defect:.3e})")
        t = t.copy()
        t.flags.writeable = False
        object.__setattr__(self, "theta_matrix", t)

    @property
    def dim(self) -> int:
        return self.theta_matrix.shape[0]

    def __call__(self, v) -> np.ndarray:
        return conj_isometry_apply(self, v)

    @classmethod
    def conjugation(cls, dim: int) -> "ConjLinearIsometry":
        return cls(np.eye(dim, dtype=np.complex128))


def conj_isometry_apply(theta: ConjLinearIsometry, v) -> np.ndarray:
    v = as_vector(v, "v")
    if v.shape[0] != theta.dim:
        raise DimMismatch(f"vector of dim {v.shape[0]} for isometry on dim {theta.dim}")
    return theta.theta_matrix @ np.conj(v)


# -- JSON wire format: complex numbers are [re, im] pairs ------------------


def _pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=np.complex128).ravel()]


def _from_pairs(entries, count: int, what: str) -> np.ndarray:
    if len(entries) != count:
        raise DimMismatch(f"{what}: expected {count} entries, got {len(entries)}")
    out = np.empty(count, dtype=np.complex128)
    for k, pair in enumerate(entries):
        if len(pair) != 2:
            raise ValueError(f"{what}: entry {k} is not an [re, im] pair")
        out[k] = complex(float(pair[0]), float(pair[1]))
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{what}: non-finite entries")
    return out


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "entries": _pairs(m)}


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    if rows < 1 or cols < 1:
        raise DimMismatch("rows and cols must be positive")
    return _from_pairs(obj["entries"], rows * cols, "matrix").reshape(rows, cols)


def vector_to_json(v) -> dict:
    v = np.asarray(v, dtype=np.complex128)
    return {"dim": int(v.shape[0]), "entries": _pairs(v)}


def vector_from_json(obj: dict) -> np.ndarray:
    dim = int(obj["dim"])
    if dim < 1:
        raise DimMismatch("dim must be positive")
    return _from_pairs(obj["entries"], dim, "vector")


def complex_to_json(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]
