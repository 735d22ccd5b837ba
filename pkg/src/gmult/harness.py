"""Scenario parsing, the suite registry and deterministic scenario runs."""

from __future__ import annotations

import json
import os
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import suites
from .errors import GmultError, ParseError, ValidationError
from .gbessel import OpSequence, TailLaw
from .multiplier import MultiplierSpec, WeightSeq
from .report import Recorder, VerificationReport, merge
from .schatten import GhsContext, std_context, unitary_conjugate_context

DEFAULT_TOLERANCE = 1e-9
DEMO_SEED = 0xC0FFEE
SWEEP_SIZES = (2, 4, 8, 16, 32)

# result -> suite that verifies it; checked against the registry at import
RESULT_MAP = {
    "rank-one operators": "rank_one",
    "operator norm": "operator_norm",
    "Hilbert-Schmidt norm": "frobenius_norm",
    "trace norm": "trace_norm",
    "PSD square root": "sqrt_psd",
    "polar decomposition": "polar_decompose",
    "conjugate-linear isometries": "conj_isometry_apply",
    "frame operator": "frame_operator",
    "optimal Bessel bound and sums of Bessel sequences": "optimal_bessel_bound",
    "orthonormal and Riesz basis classification": "classify",
    "seeded orthonormal bases": "random_onb",
    "transition unitary between orthonormal bases": "onb_transition_unitary",
    "Riesz basis transition operator": "riesz_transition",
    "multiplier definition and linearity": "assemble",
    "existence bound": "existence_bound",
    "boundedness characterization": "unbounded_sweep",
    "adjoint, self-adjointness and normality": "multiplier_adjoint",
    "MM* reduction": "mmstar_reduction",
    "M*M reduction": "mstarm_reduction",
    "powers of biorthogonal multipliers": "power_formula",
    "product norm bound": "norm_product_bound",
    "symbolic calculus": "symbolic_product",
    "composition identities": "compose_maps",
    "general product": "product_general",
    "compactness": "tail_compactness",
    "nuclear bound": "nuclear_bound",
    "Hilbert-Schmidt bound": "hs_bound",
    "continuity in the weights": "convergence_study",
    "lower bounds": "lower_bound",
    "injectivity and weight recovery": "recover_lambda",
    "canonical context reductions": "std_context",
    "membership conditions": "is_member",
    "admissible subspace": "admissible_subspace",
    "sigma seminorm": "sigma",
    "inner product and polarization": "ghs_inner",
    "p-frame lower constant": "pframe_lower_constant",
    "generalized Hilbert-Schmidt ideal properties": "ideal_suite",
    "generalized inner product properties": "inner_suite",
    "generalized trace": "trace",
    "trace-class certificate": "is_member_trace_class",
    "tau functional": "tau",
    "generalized trace properties": "trace_suite",
    "tau properties and second-basis pairing": "tau_suite",
}

REGISTRY = {name[len("suite_"):]: fn for name, fn in vars(suites).items()
            if name.startswith("suite_") and callable(fn)}

# suites whose instances need d = n * d0
ONB_SUITES = frozenset({"random_onb", "classify", "onb_transition_unitary", "riesz_transition",
                        "lower_bound", "recover_lambda"})

DEMOS = ("canonical", "sweep", "ghs")


def check_registry(registry=None, result_map=None):
    """Raise unless every mapped result has exactly one registered suite and vice versa."""
    registry = REGISTRY if registry is None else registry
    result_map = RESULT_MAP if result_map is None else result_map
    missing = sorted({s for s in result_map.values() if s not in registry})
    if missing:
        raise RuntimeError(f"results without a registered suite: {missing}")
    unmapped = sorted(set(registry) - set(result_map.values()))
    if unmapped:
        raise RuntimeError(f"registered suites not mapped to any result: {unmapped}")


check_registry()


# -- scenarios ----------------------------------------------------------------

_TOP_KEYS = {"seed", "dims", "trials", "tolerance", "suites", "generatorOverrides", "lambdaLaw"}
_REQUIRED = {"seed", "dims", "trials", "suites"}
_DIM_KEYS = ("d", "d0", "n")
_OVERRIDE_KEYS = {"spec", "weights", "opseq", "context"}


@dataclass(frozen=True)
class Scenario:
    seed: int
    d: int
    d0: int
    n: int
    trials: int
    suites: tuple
    tolerance: float = DEFAULT_TOLERANCE
    generator_overrides: dict = field(default_factory=dict)
    lambda_law: TailLaw | None = None

    def with_tolerance(self, tol: float) -> "Scenario":
        return Scenario(self.seed, self.d, self.d0, self.n, self.trials, self.suites, float(tol),
                        self.generator_overrides, self.lambda_law)

    def with_seed(self, seed: int) -> "Scenario":
        return Scenario(int(seed), self.d, self.d0, self.n, self.trials, self.suites, self.tolerance,
                        self.generator_overrides, self.lambda_law)


def _int(obj, key, where=None):
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError("expected an integer", field=where or key)
    return v


def scenario_from_dict(obj) -> Scenario:
    if not isinstance(obj, dict):
        raise ParseError("scenario must be a JSON object")
    unknown = sorted(set(obj) - _TOP_KEYS)
    if unknown:
        raise ParseError(f"unknown key {unknown[0]!r}", field=unknown[0])
    for key in sorted(_REQUIRED - set(obj)):
        raise ParseError("missing required key", field=key)
    seed = _int(obj, "seed")
    dims = obj["dims"]
    if not isinstance(dims, dict):
        raise ParseError("dims must be an object", field="dims")
    bad = sorted(set(dims) ^ set(_DIM_KEYS))
    if bad:
        raise ParseError("dims must hold exactly d, d0 and n", field=f"dims.{bad[0]}")
    d, d0, n = (_int(dims, k, f"dims.{k}") for k in _DIM_KEYS)
    trials = _int(obj, "trials")
    tol = obj.get("tolerance", DEFAULT_TOLERANCE)
    if isinstance(tol, bool) or not isinstance(tol, (int, float)):
        raise ParseError("expected a number", field="tolerance")
    names = obj["suites"]
    if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
        raise ParseError("suites must be a list of strings", field="suites")
    overrides = obj.get("generatorOverrides") or {}
    if not isinstance(overrides, dict):
        raise ParseError("generatorOverrides must be an object", field="generatorOverrides")
    law = obj.get("lambdaLaw")
    if law is not None:
        if not isinstance(law, dict) or set(law) - {"kind", "param"}:
            raise ParseError("lambdaLaw must be {kind, param}", field="lambdaLaw")
        try:
            law = TailLaw.from_json(law)
        except ValueError as exc:
            raise ValidationError(str(exc), "lambdaLaw") from exc
    s = Scenario(seed, d, d0, n, trials, tuple(names), float(tol), overrides, law)
    validate(s)
    return s


def validate(s: Scenario):
    if not 0 <= s.seed < 2**64:
        raise ValidationError("seed must be a 64-bit unsigned integer", "seed")
    for k in _DIM_KEYS:
        if getattr(s, k) < 1:
            raise ValidationError(f"dims.{k} must be positive", f"dims.{k}")
    if s.trials < 1:
        raise ValidationError("trials must be a positive integer", "trials")
    if not (np.isfinite(s.tolerance) and s.tolerance > 0):
        raise ValidationError("tolerance must be a positive real", "tolerance")
    for name in s.suites:
        if name not in REGISTRY:
            raise ValidationError(f"unknown suite {name!r}", "suites")
    if len(set(s.suites)) != len(s.suites):
        raise ValidationError("suites must not repeat", "suites")
    onb = sorted(set(s.suites) & ONB_SUITES)
    if onb and s.d != s.n * s.d0:
        raise ValidationError(f"suite {onb[0]!r} needs an orthonormal basis, so d must equal n*d0 "
                              f"({s.n}*{s.d0} = {s.n * s.d0}, got d = {s.d})", "dims")
    unknown = sorted(set(s.generator_overrides) - _OVERRIDE_KEYS)
    if unknown:
        raise ValidationError(f"unknown generator override {unknown[0]!r}", "generatorOverrides")
    _decode_overrides(s)


def _decode_overrides(s: Scenario) -> dict:
    out = {}
    decoders = {"spec": MultiplierSpec.from_json, "weights": WeightSeq.from_json,
                "opseq": OpSequence.from_json, "context": GhsContext.from_json}
    for key, payload in s.generator_overrides.items():
        try:
            out[key] = decoders[key](payload)
        except (GmultError, ValueError, KeyError, TypeError) as exc:
            raise ValidationError(f"invalid {key} override: {exc}", f"generatorOverrides.{key}") from exc
    if "spec" in out and (out["spec"].d, out["spec"].a.d0, out["spec"].n) != (s.d, s.d0, s.n):
        raise ValidationError("spec override disagrees with dims", "generatorOverrides.spec")
    if "context" in out and out["context"].d != s.d:
        raise ValidationError("context override disagrees with dims.d", "generatorOverrides.context")
    return out


def parse_scenario(source) -> Scenario:
    """Parse a scenario from a path or from JSON text."""
    text = source
    if isinstance(source, os.PathLike) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read scenario: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return scenario_from_dict(obj)


def scenario_to_dict(s: Scenario) -> dict:
    out = {
        "seed": s.seed,
        "dims": {"d": s.d, "d0": s.d0, "n": s.n},
        "trials": s.trials,
        "tolerance": s.tolerance,
        "suites": list(s.suites),
    }
    if s.generator_overrides:
        out["generatorOverrides"] = s.generator_overrides
    if s.lambda_law is not None:
        out["lambdaLaw"] = s.lambda_law.to_json()
    return out


def serialize_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), sort_keys=True, indent=1)


def resolve_tolerance(flag: float | None, scenario: Scenario | None = None) -> float:
    """CLI flag, then GMULT_TOLERANCE, then the scenario field, then the default."""
    if flag is not None:
        return float(flag)
    env = os.environ.get("GMULT_TOLERANCE", "").strip()
    if env:
        try:
            return float(env)
        except ValueError as exc:
            raise ValidationError(f"GMULT_TOLERANCE is not a number: {env!r}", "GMULT_TOLERANCE") from exc
    if scenario is not None:
        return scenario.tolerance
    return DEFAULT_TOLERANCE


# -- running ------------------------------------------------------------------


@dataclass
class RunConfig:
    d: int
    d0: int
    n: int
    trials: int
    rtol: float
    spec: MultiplierSpec | None = None
    weights: WeightSeq | None = None
    opseq: OpSequence | None = None
    context: GhsContext | None = None
    lambda_law: TailLaw | None = None
    sweep_sizes: tuple = SWEEP_SIZES


def suite_seed(seed: int, name: str) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), zlib.crc32(name.encode())])


def run_suite(name: str, cfg: RunConfig, seed: int) -> list:
    rec = Recorder(name, cfg.rtol)
    rng = np.random.default_rng(suite_seed(seed, name))
    try:
        REGISTRY[name](rng, cfg, rec)
    except Exception as exc:  # internal failures become failed records
        rec.fail("internal", f"suite {name} raised", f"{type(exc).__name__}: {exc}")
    return rec.records


def run_scenario(s: Scenario) -> VerificationReport:
    check_registry()
    t0 = time.perf_counter()
    ov = _decode_overrides(s)
    cfg = RunConfig(s.d, s.d0, s.n, s.trials, s.tolerance, lambda_law=s.lambda_law, **ov)
    records = []
    for name in sorted(s.suites):
        records.extend(run_suite(name, cfg, s.seed))
    return VerificationReport(scenario_to_dict(s), merge(records), time.perf_counter() - t0)


def default_scenario(seed: int = 42) -> Scenario:
    return Scenario(seed, 6, 2, 3, 3, tuple(sorted(REGISTRY)))


def demo_scenario(name: str) -> Scenario:
    if name == "canonical":
        names = ("std_context", "sigma", "ghs_inner", "trace", "tau", "ideal_suite", "inner_suite",
                 "trace_suite", "tau_suite", "assemble", "existence_bound", "hs_bound", "recover_lambda")
        ctx = std_context(4).to_json()
        return Scenario(DEMO_SEED, 4, 1, 4, 5, names, generator_overrides={"context": ctx})
    if name == "sweep":
        return Scenario(DEMO_SEED, 4, 1, 4, 1, ("unbounded_sweep",), lambda_law=TailLaw("power", 1.0))
    if name == "ghs":
        ctx = unitary_conjugate_context(4, DEMO_SEED).to_json()
        names = ("admissible_subspace", "is_member", "sigma", "ghs_inner", "pframe_lower_constant",
                 "ideal_suite", "inner_suite", "trace_suite", "tau_suite")
        return Scenario(DEMO_SEED, 4, 1, 4, 5, names, generator_overrides={"context": ctx})
    raise ValidationError(f"unknown demo {name!r}; expected one of {DEMOS}", "demo")


def demo(name: str) -> VerificationReport:
    return run_scenario(demo_scenario(name))


def report_json(report: VerificationReport) -> str:
    return json.dumps(report.to_json(include_wall_time=False), sort_keys=True, indent=1)
