"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from gmult import _pykernels

try:
    from gmult import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _cg(rng, *shape):
    return np.ascontiguousarray(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def cases(rng):
    for d, d0, n in ((8, 2, 4), (32, 4, 8), (128, 8, 16)):
        lam, u, v = _cg(rng, n), _cg(rng, n, d), _cg(rng, n, d)
        ops, vecs = _cg(rng, n, d0, d), _cg(rng, n, d0)
        yield f"rank_one_sum d={d} N={n}", "rank_one_sum", (lam, u, v)
        yield f"gram_sum d={d} d0={d0} N={n}", "gram_sum", (ops,)
        yield f"adjoint_apply d={d} d0={d0} N={n}", "adjoint_apply", (ops, vecs)
    for d in (4, 8, 12):
        q, _ = np.linalg.qr(_cg(rng, d, d))
        fops = np.ascontiguousarray(q.reshape(d, 1, d))
        probes = np.ascontiguousarray(fops[:, 0, :].conj())
        theta = np.ones((1, 1), complex)
        yield f"membership_residuals d={d}", "membership_residuals", (_cg(rng, d, d), theta, fops, probes)


def best_time(fn, args, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(lambda: fn(*args), number=1), 1e-7)))
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':42s} {'numpy [us]':>12s} {'cython [us]':>12s} {'speedup':>8s}")
    for label, name, kargs in cases(rng):
        t_py = best_time(getattr(_pykernels, name), kargs, args.repeat)
        if _ckernels is None:
            print(f"{label:42s} {t_py * 1e6:12.1f} {'n/a':>12s} {'':>8s}")
            continue
        t_c = best_time(getattr(_ckernels, name), kargs, args.repeat)
        print(f"{label:42s} {t_py * 1e6:12.1f} {t_c * 1e6:12.1f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
