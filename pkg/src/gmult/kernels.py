"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``GMULT_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("GMULT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "numpy"


def _c(arr) -> np.ndarray:
    return np.ascontiguousarray(arr, dtype=np.complex128)


def rank_one_sum(lam, u, v) -> np.ndarray:
    return _impl.rank_one_sum(_c(lam), _c(u), _c(v))


def gram_sum(ops) -> np.ndarray:
    return _impl.gram_sum(_c(ops))


def adjoint_apply(ops, vecs) -> np.ndarray:
    return _impl.adjoint_apply(_c(ops), _c(vecs))


def membership_residuals(a, theta, fops, probes) -> tuple[float, float]:
    r1, r2 = _impl.membership_residuals(_c(a), _c(theta), _c(fops), _c(probes))
    return float(r1), float(r2)
