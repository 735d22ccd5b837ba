"""Scenario parsing, deterministic runs, report rendering and the CLI."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from gmult import cli, harness
from gmult.errors import ParseError, ValidationError
from gmult.report import CheckRecord, Recorder, VerificationReport, emit_report, merge
from gmult.schatten import random_context, std_context

BASE = {"seed": 7, "dims": {"d": 4, "d0": 2, "n": 2}, "trials": 2, "suites": ["assemble", "existence_bound"]}


def scenario_text(**changes):
    obj = json.loads(json.dumps(BASE))
    obj.update(changes)
    return json.dumps(obj)


# -- parsing and validation ----------------------------------------------------


def test_parse_and_round_trip(tmp_path):
    s = harness.parse_scenario(scenario_text(tolerance=1e-8, lambdaLaw={"kind": "power", "param": 1.0}))
    assert (s.seed, s.d, s.d0, s.n, s.trials) == (7, 4, 2, 2, 2)
    assert s.tolerance == 1e-8 and s.lambda_law.kind == "power"
    path = tmp_path / "s.json"
    path.write_text(harness.serialize_scenario(s))
    assert harness.parse_scenario(str(path)) == s
    assert harness.parse_scenario(path) == s


def test_parse_error_location():
    with pytest.raises(ParseError) as err:
        harness.parse_scenario('{"seed": 1,\n  "dims": }')
    assert err.value.line == 2 and err.value.column is not None


@pytest.mark.parametrize("change, field", [
    ({"bogus": 1}, None),
    ({"seed": "x"}, "seed"),
    ({"trials": 1.5}, "trials"),
    ({"dims": {"d": 4, "d0": 2}}, None),
])
def test_parse_rejects_malformed(change, field):
    with pytest.raises(ParseError) as err:
        harness.parse_scenario(scenario_text(**change))
    if field:
        assert err.value.field == field


def test_parse_rejects_missing_key():
    obj = dict(BASE)
    del obj["suites"]
    with pytest.raises(ParseError):
        harness.scenario_from_dict(obj)
    with pytest.raises(ParseError):
        harness.parse_scenario("/nonexistent/scenario.json")


@pytest.mark.parametrize("change, field", [
    ({"seed": -1}, "seed"),
    ({"trials": 0}, "trials"),
    ({"dims": {"d": 0, "d0": 1, "n": 1}}, "dims.d"),
    ({"tolerance": -1.0}, "tolerance"),
    ({"suites": ["nope"]}, "suites"),
    ({"suites": ["assemble", "assemble"]}, "suites"),
    ({"dims": {"d": 5, "d0": 2, "n": 2}, "suites": ["recover_lambda"]}, "dims"),
    ({"generatorOverrides": {"matrix": {}}}, "generatorOverrides"),
    ({"generatorOverrides": {"context": {"theta": 1}}}, "generatorOverrides.context"),
])
def test_validation_errors(change, field):
    with pytest.raises(ValidationError) as err:
        harness.parse_scenario(scenario_text(**change))
    assert err.value.field == field


def test_context_override_must_match_dims():
    ctx = std_context(3).to_json()
    with pytest.raises(ValidationError):
        harness.parse_scenario(scenario_text(generatorOverrides={"context": ctx}))


def test_empty_suite_list():
    rep = harness.run_scenario(harness.parse_scenario(scenario_text(suites=[])))
    assert rep.records == [] and rep.ok and rep.summary["total"] == 0


# -- registry ------------------------------------------------------------------


def test_registry_covers_result_map():
    harness.check_registry()
    assert set(harness.RESULT_MAP.values()) == set(harness.REGISTRY)


def test_registry_mismatch_detected():
    with pytest.raises(RuntimeError, match="without a registered suite"):
        harness.check_registry(harness.REGISTRY, {**harness.RESULT_MAP, "extra": "missing_suite"})
    reg = {**harness.REGISTRY, "orphan": lambda rng, cfg, rec: None}
    with pytest.raises(RuntimeError, match="not mapped"):
        harness.check_registry(reg, harness.RESULT_MAP)


# -- running -------------------------------------------------------------------


def test_default_scenario_passes_and_is_deterministic():
    s = harness.default_scenario(42)
    r1, r2 = harness.run_scenario(s), harness.run_scenario(s)
    assert r1.ok, [(r.suite, r.id) for r in r1.failures()]
    assert harness.report_json(r1) == harness.report_json(r2)
    assert {r.suite for r in r1.records} == set(harness.REGISTRY)


def test_seed_changes_instances():
    s = harness.parse_scenario(scenario_text())
    a = harness.run_scenario(s)
    b = harness.run_scenario(s.with_seed(8))
    assert [r.instance_digest for r in a.records] != [r.instance_digest for r in b.records]


def test_suite_seeds_are_independent():
    # adding a suite must not perturb the records of another
    s1 = harness.parse_scenario(scenario_text(suites=["assemble"]))
    s2 = harness.parse_scenario(scenario_text(suites=["assemble", "hs_bound"]))
    r1 = harness.run_scenario(s1).records
    r2 = [r for r in harness.run_scenario(s2).records if r.suite == "assemble"]
    assert [c.to_json() for c in r1] == [c.to_json() for c in r2]


def test_internal_error_becomes_failed_record(monkeypatch):
    def broken(rng, cfg, rec):
        raise ZeroDivisionError("boom")

    monkeypatch.setitem(harness.REGISTRY, "assemble", broken)
    recs = harness.run_suite("assemble", harness.RunConfig(4, 2, 2, 1, 1e-9), 0)
    assert len(recs) == 1 and recs[0].id == "internal" and not recs[0].passed
    assert "ZeroDivisionError" in recs[0].note


@pytest.mark.parametrize("name", harness.DEMOS)
def test_demos_pass(name):
    rep = harness.demo(name)
    assert rep.ok and rep.summary["passed"] > 0


def test_random_context_override_skips_cleanly():
    ctx = random_context(2, 2, seed=0).to_json()
    s = harness.parse_scenario(scenario_text(suites=["ideal_suite", "tau"], generatorOverrides={"context": ctx}))
    rep = harness.run_scenario(s)
    assert rep.ok and rep.summary["skipped"] > 0


# -- tolerance resolution --------------------------------------------------------


def test_tolerance_precedence(monkeypatch):
    s = harness.parse_scenario(scenario_text(tolerance=1e-7))
    monkeypatch.delenv("GMULT_TOLERANCE", raising=False)
    assert harness.resolve_tolerance(None) == harness.DEFAULT_TOLERANCE
    assert harness.resolve_tolerance(None, s) == 1e-7
    monkeypatch.setenv("GMULT_TOLERANCE", "1e-6")
    assert harness.resolve_tolerance(None, s) == 1e-6
    assert harness.resolve_tolerance(1e-5, s) == 1e-5
    monkeypatch.setenv("GMULT_TOLERANCE", "loose")
    with pytest.raises(ValidationError):
        harness.resolve_tolerance(None, s)


# -- reports ---------------------------------------------------------------------


def _sample_report():
    rec = Recorder("demo", 1e-9)
    rec.start(0, np.eye(2))
    rec.identity("eq", "a = a", 1.0, 1.0)
    rec.inequality("le|pipe", "x | y bound", 2.0, 1.0)
    rec.skip("sk", "skipped result", "no instance")
    rec.observe("obs", "recorded only", 3.0, 4.0, note="not a check")
    return VerificationReport({"seed": 1}, rec.records, 0.5)


def test_report_json_round_trip():
    rep = _sample_report()
    text = emit_report(rep)
    back = VerificationReport.from_json(json.loads(text))
    assert back == rep
    assert emit_report(back) == text
    assert rep.summary == {"total": 4, "passed": 2, "failed": 1, "skipped": 1}


def test_report_summary_tamper_detected():
    obj = json.loads(emit_report(_sample_report()))
    obj["summary"]["failed"] = 0
    with pytest.raises(ValueError):
        VerificationReport.from_json(obj)


def test_nonfinite_values_serialize():
    rec = CheckRecord("x", "s", 0, "r", "", float("inf"), float("nan"), 0.0, "observation", True)
    obj = json.loads(json.dumps(rec.to_json()))
    assert obj["lhs"] == "inf" and obj["rhs"] == "nan"
    back = CheckRecord.from_json(obj)
    assert back.lhs == np.inf and np.isnan(back.rhs)


def test_markdown_lists_failure_with_ref():
    md = emit_report(_sample_report(), "markdown")
    assert "## Failures" in md and "x \\| y bound" in md and "demo/le|pipe" in md
    assert "failed: 1" in md
    with pytest.raises(ValueError):
        emit_report(_sample_report(), "xml")


def test_slack_sign():
    recs = _sample_report().records
    assert recs[0].slack > 0 and recs[1].slack < 0 and recs[2].slack is None and recs[3].slack is None


def test_merge_is_canonical():
    recs = [CheckRecord(str(i), s, t, "r", "", 0, 0, 0, "identity", True)
            for i, (s, t) in enumerate([("b", 0), ("a", 1), ("a", 0), ("b", 0)])]
    assert [(r.suite, r.trial, r.id) for r in merge(recs)] == [("a", 0, "2"), ("a", 1, "1"), ("b", 0, "0"),
                                                                ("b", 0, "3")]


# -- CLI -------------------------------------------------------------------------


def test_cli_validate_and_run(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(scenario_text())
    assert cli.main(["validate", str(path)]) == 0
    assert "ok:" in capsys.readouterr().out
    out = tmp_path / "r.json"
    assert cli.main(["run", str(path), "--out", str(out), "--seed", "3"]) == 0
    rep = json.loads(out.read_text())
    assert rep["scenario"]["seed"] == 3 and rep["summary"]["failed"] == 0


def test_cli_bad_input_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert cli.main(["validate", str(path)]) == 2
    assert "line 1" in capsys.readouterr().err
    path.write_text(scenario_text(trials=0))
    assert cli.main(["run", str(path)]) == 2
    path.write_text(scenario_text())
    assert cli.main(["run", str(path), "--seed", "-4"]) == 2


def test_cli_failures_exit_1(tmp_path, monkeypatch):
    def failing(rng, cfg, rec):
        rec.inequality("x", "always broken", 2.0, 1.0)

    monkeypatch.setitem(harness.REGISTRY, "assemble", failing)
    path = tmp_path / "s.json"
    path.write_text(scenario_text(suites=["assemble"]))
    out = tmp_path / "r.md"
    assert cli.main(["run", str(path), "--format", "markdown", "--out", str(out)]) == 1
    assert "always broken" in out.read_text()


def test_cli_sweep(capsys):
    assert cli.main(["sweep", "--law", "n", "--sizes", "2,4,8"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["scenario"]["sizes"] == [2, 4, 8] and rep["summary"]["failed"] == 0
    assert cli.main(["sweep", "--law", "geometric:0.5", "--sizes", "3,6"]) == 0


def test_cli_law_parsing():
    assert cli.parse_law("1/n").param == -1.0
    assert cli.parse_law("power:2").param == 2.0
    with pytest.raises(Exception):
        cli.parse_law("exp:1")
    with pytest.raises(SystemExit):
        cli.main(["sweep", "--sizes", "0,2"])


def test_cli_demo_markdown(capsys):
    assert cli.main(["demo", "sweep", "--format", "markdown", "--tolerance", "1e-10"]) == 0
    assert capsys.readouterr().out.startswith("# Verification report")


def test_module_entry_point(tmp_path):
    env = dict(os.environ)
    res = subprocess.run([sys.executable, "-m", "gmult", "demo", "sweep"], capture_output=True, text=True,
                         env=env, timeout=60)
    assert res.returncode == 0 and json.loads(res.stdout)["summary"]["failed"] == 0
