"""Command line entry point: ``gmult run|demo|sweep|validate``.

Exit status is 0 when the report has no failed records, 1 when it has, and
2 for unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from .errors import ScenarioError
from .gbessel import TailLaw
from .report import VerificationReport, emit_report, merge

_NAMED_LAWS = {"n": TailLaw("power", 1.0), "1/n": TailLaw("power", -1.0), "1": TailLaw("power", 0.0)}


def parse_law(text: str) -> TailLaw:
    """'n', '1/n', '1', 'power:s' (lam_n = n^s) or 'geometric:r' (lam_n = r^n)."""
    text = text.strip()
    if text in _NAMED_LAWS:
        return _NAMED_LAWS[text]
    kind, _, param = text.partition(":")
    if kind in ("power", "geometric") and param:
        try:
            return TailLaw(kind, float(param))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(f"bad law {text!r}; use n, 1/n, 1, power:s or geometric:r")


def parse_sizes(text: str) -> tuple:
    try:
        sizes = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gmult", description="Verify operator-valued multiplier and "
                                "generalized Schatten class identities on seeded instances.")
    sub = p.add_subparsers(dest="command", required=True)

    def output_opts(sp):
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "markdown"), default="json")
        sp.add_argument("--tolerance", type=_positive, help="relative tolerance (overrides GMULT_TOLERANCE)")

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario")
    run.add_argument("--seed", type=int)
    output_opts(run)

    dm = sub.add_parser("demo", help="run a bundled scenario")
    dm.add_argument("name", choices=harness.DEMOS)
    output_opts(dm)

    sw = sub.add_parser("sweep", help="norms of truncated multipliers for a weight law")
    sw.add_argument("--law", type=parse_law, default=_NAMED_LAWS["n"])
    sw.add_argument("--sizes", type=parse_sizes, default=harness.SWEEP_SIZES)
    sw.add_argument("--d0", type=int, default=1)
    sw.add_argument("--seed", type=int, default=harness.DEMO_SEED)
    output_opts(sw)

    va = sub.add_parser("validate", help="check a scenario file without running it")
    va.add_argument("scenario")
    return p


def _emit(report: VerificationReport, args) -> int:
    text = emit_report(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.ok else 1


def _sweep(args) -> VerificationReport:
    cfg = harness.RunConfig(args.sizes[0], args.d0, 1, 1, harness.resolve_tolerance(args.tolerance),
                            lambda_law=args.law, sweep_sizes=args.sizes)
    records = harness.run_suite("unbounded_sweep", cfg, args.seed)
    echo = {"law": args.law.to_json(), "sizes": list(args.sizes), "d0": args.d0, "seed": args.seed}
    return VerificationReport(echo, merge(records))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            s = harness.parse_scenario(args.scenario)
            print(f"ok: {len(s.suites)} suite(s), dims d={s.d} d0={s.d0} n={s.n}, {s.trials} trial(s)")
            return 0
        if args.command == "run":
            s = harness.parse_scenario(args.scenario)
            if args.seed is not None:
                s = s.with_seed(args.seed)
                harness.validate(s)
            s = s.with_tolerance(harness.resolve_tolerance(args.tolerance, s))
            return _emit(harness.run_scenario(s), args)
        if args.command == "demo":
            s = harness.demo_scenario(args.name)
            s = s.with_tolerance(harness.resolve_tolerance(args.tolerance, s))
            return _emit(harness.run_scenario(s), args)
        return _emit(_sweep(args), args)
    except ScenarioError as exc:
        print(f"gmult: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
