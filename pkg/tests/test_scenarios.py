import math

import pytest
from pydantic import ValidationError

from cgmlab.config import DEFAULT_SAMPLES, REPORT_KEYS
from cgmlab.scenarios import run_scenario
from cgmlab.schemas import CheckResult, Report, ScenarioConfig, ScenarioName

COVERING_CHECKS = [
    "closed_gram",
    "numeric_gram",
    "differential_closed_vs_ambient",
    "differential_vs_numeric",
    "frame_identities",
    "r_independence",
    "hopf_projection_and_antipodes",
    "rho_group_laws",
]


def _errors(report: Report) -> dict:
    return {ch.name: ch.max_abs_error for ch in report.checks}


# ---------- configuration ----------

def test_config_defaults():
    cfg = ScenarioConfig(scenario="sphere-isometry", c=8.0)
    assert cfg.m == pytest.approx(3.0)
    assert cfg.samples == DEFAULT_SAMPLES["sphere-isometry"]
    assert cfg.seed == 7 and cfg.r == 0.0


def test_berger_config_derives_m():
    cfg = ScenarioConfig(scenario="berger-isometry", c=4.0, epsilon=0.5)
    assert cfg.m == pytest.approx(0.0)
    assert ScenarioConfig(scenario="berger-isometry", c=4.0, epsilon=2.0).m == pytest.approx(4.0)


@pytest.mark.parametrize(
    "fields",
    [
        {"scenario": "berger-isometry", "c": 4.0},
        {"scenario": "berger-isometry", "c": 2.0, "epsilon": 0.5},
        {"scenario": "sphere-isometry", "c": 0.0},
        {"scenario": "sphere-isometry", "c": 1.0, "samples": 0},
        {"scenario": "sphere-isometry", "c": 1.0, "tol": -1.0},
        {"scenario": "no-such-scenario", "c": 1.0},
    ],
)
def test_config_rejects_bad_fields(fields):
    with pytest.raises(ValidationError):
        ScenarioConfig(**fields)


def test_oracle_samples_default_to_samples():
    cfg = ScenarioConfig(scenario="positivity-sample", c=1.0, samples=30)
    assert cfg.oracle_samples == 30
    assert ScenarioConfig(scenario="positivity-sample", c=1.0, samples=30, oracle_samples=4).oracle_samples == 4
    assert cfg.echo()["oracle_samples"] == 30


@pytest.mark.parametrize("tol", [math.inf, math.nan])
def test_config_rejects_non_finite_tol(tol):
    with pytest.raises(ValidationError):
        ScenarioConfig(scenario="sphere-isometry", c=1.0, tol=tol)


def test_tol_overrides_every_family():
    cfg = ScenarioConfig(scenario="sphere-isometry", c=4.0, samples=2, tol=0.5)
    for family in ("closed", "numeric", "curvature", "sanity", "flat", "order", "sweep"):
        assert cfg.threshold(family) == 0.5
    report = run_scenario(cfg)
    assert {ch.threshold for ch in report.checks} == {0.5}


# ---------- report models ----------

def test_check_result_maps_nan_to_inf():
    check = CheckResult.evaluate("x", math.nan, 1e-6, 3)
    assert check.max_abs_error == math.inf and not check.passed


def test_check_result_writes_non_finite_error_as_null():
    check = CheckResult.evaluate("x", math.inf, 1e-6, 3)
    assert check.model_dump(mode="json")["max_abs_error"] is None
    assert check.model_dump()["max_abs_error"] == math.inf
    assert CheckResult.evaluate("y", 2.5e-12, 1e-6, 3).model_dump(mode="json")["max_abs_error"] == 2.5e-12


def test_check_result_pass_flag_must_match():
    with pytest.raises(ValidationError):
        CheckResult(name="x", max_abs_error=1.0, threshold=1e-6, passed=True, samples_used=1)


def test_report_pass_flag_must_match():
    good = CheckResult.evaluate("a", 0.0, 1e-6, 1)
    bad = CheckResult.evaluate("b", 1.0, 1e-6, 1)
    with pytest.raises(ValidationError):
        Report(scenario=ScenarioName.oracle_sanity, params={}, checks=[good, bad], passed=True, wall_ms=0.0)
    report = Report(scenario=ScenarioName.oracle_sanity, params={}, checks=[good, bad], passed=False, wall_ms=0.0)
    assert not report.passed


# ---------- covering scenarios ----------

def test_sphere_isometry_passes():
    report = run_scenario(ScenarioConfig(scenario="sphere-isometry", c=4.0, samples=3))
    assert [ch.name for ch in report.checks] == COVERING_CHECKS
    assert report.passed
    assert tuple(report.model_dump()) == REPORT_KEYS
    assert report.params["m"] == 2.0 and report.params["samples"] == 3


def test_sphere_isometry_fails_for_wrong_m():
    report = run_scenario(ScenarioConfig(scenario="sphere-isometry", c=4.0, m=0.0, samples=3))
    assert not report.passed
    assert _errors(report)["closed_gram"] == pytest.approx(3.0, abs=1e-10)
    # frame identities do not involve the metric
    assert _errors(report)["frame_identities"] <= 1e-10


def test_hyperbolic_immersion_passes():
    report = run_scenario(ScenarioConfig(scenario="hyperbolic-immersion", c=2.0, samples=3))
    assert [ch.name for ch in report.checks] == COVERING_CHECKS
    assert report.passed


def test_berger_isometry_closed_checks():
    report = run_scenario(ScenarioConfig(scenario="berger-isometry", c=4.0, epsilon=0.5, samples=2))
    errors = _errors(report)
    assert list(errors) == ["closed_gram", "numeric_gram", "berger_sectional_vs_oracle", "berger_vs_lift_plane_table"]
    assert errors["closed_gram"] <= 1e-10
    assert errors["numeric_gram"] <= 1e-6
    assert errors["berger_vs_lift_plane_table"] <= 1e-10


def test_runs_are_reproducible():
    cfg = ScenarioConfig(scenario="sphere-isometry", c=9.0, samples=3, seed=11)
    assert _errors(run_scenario(cfg)) == _errors(run_scenario(cfg))


# ---------- oracle scenarios ----------

def test_oracle_sanity_passes():
    report = run_scenario(ScenarioConfig(scenario="oracle-sanity", c=1.0, samples=2))
    assert [ch.name for ch in report.checks] == [
        "sphere_sectional",
        "embedded_sphere_sectional",
        "hyperbolic_sectional",
        "flat_riemann",
        "convergence_order",
        "first_bianchi",
    ]
    assert report.passed


def test_oversized_step_fails_checks_instead_of_raising():
    report = run_scenario(ScenarioConfig(scenario="oracle-sanity", c=1.0, samples=1, fd_step=0.09))
    assert not report.passed
    assert _errors(report)["flat_riemann"] == math.inf


@pytest.mark.slow
def test_berger_isometry_passes():
    assert run_scenario(ScenarioConfig(scenario="berger-isometry", c=4.0, epsilon=0.5, samples=1)).passed


@pytest.mark.slow
def test_constant_curvature_t1_passes():
    report = run_scenario(ScenarioConfig(scenario="constant-curvature-T1", c=2.0, samples=1))
    assert [ch.name for ch in report.checks] == ["sectional_equals_c_over_4"]
    assert report.passed


@pytest.mark.slow
def test_curvature_closed_vs_oracle_passes():
    report = run_scenario(ScenarioConfig(scenario="curvature-closed-vs-oracle", c=1.0, m=1.0, r=0.5, samples=1))
    assert [ch.name for ch in report.checks] == [
        "sectional_HH_vs_oracle",
        "sectional_HV_e_vs_oracle",
        "sectional_HV_f_vs_oracle",
        "gauss_equation_vs_oracle",
        "sectional_T1_vs_oracle",
        "hh_plus_3hv_equals_c",
        "levi_civita_vs_oracle",
    ]
    assert report.passed


@pytest.mark.slow
def test_positivity_sample_in_positive_regime():
    report = run_scenario(ScenarioConfig(scenario="positivity-sample", c=1.0, m=1.0, samples=1))
    assert [ch.name for ch in report.checks] == ["sampled_minimum_consistent", "lift_planes_consistent"]
    assert report.passed


def test_covering_checks_use_every_requested_sample():
    report = run_scenario(ScenarioConfig(scenario="sphere-isometry", c=4.0, samples=250))
    assert report.passed
    assert {ch.samples_used for ch in report.checks} == {250}


def test_hyperbolic_numeric_checks_use_every_requested_sample():
    report = run_scenario(ScenarioConfig(scenario="hyperbolic-immersion", c=2.0, samples=240))
    assert report.passed
    used = {ch.name: ch.samples_used for ch in report.checks}
    assert used["numeric_gram"] == used["differential_vs_numeric"] == 240


def test_oracle_checks_follow_oracle_samples():
    report = run_scenario(ScenarioConfig(scenario="berger-isometry", c=4.0, epsilon=2.0, samples=3, oracle_samples=1))
    used = {ch.name: ch.samples_used for ch in report.checks}
    assert used["closed_gram"] == used["numeric_gram"] == 3
    assert used["berger_sectional_vs_oracle"] == 1
    assert report.params["oracle_samples"] == 1


@pytest.mark.slow
def test_sphere_isometry_at_full_sample_count_is_fast():
    report = run_scenario(ScenarioConfig(scenario="sphere-isometry", c=9.0, r=5.0, samples=1000))
    assert report.passed
    assert {ch.samples_used for ch in report.checks} == {1000}
    assert report.wall_ms < 5000.0
