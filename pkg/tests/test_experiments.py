"""Experiment-layer checks: estimators, CSV plumbing, and small-N runs of
every experiment module asserting the structural invariants each one promises."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfspace_lpp.experiments.stats import (
    CENSOR_MIN,
    BoundCheck,
    Estimate,
    binomial_stderr,
    fit_log_linear,
)
from halfspace_lpp.experiments.io import (
    CENSORED,
    CSV_HEADER,
    data_dir,
    format_cell,
    sidecar_path,
    write_csv,
    write_sidecar,
)
from halfspace_lpp.experiments.comparisons import check_comparisons
from halfspace_lpp.experiments.covariance import restart_variance, two_time_covariance
from halfspace_lpp.experiments.crossing import crossing_probability
from halfspace_lpp.experiments.localization import localization_profile
from halfspace_lpp.experiments.modulus import modulus_of_continuity
from halfspace_lpp.experiments.ordered import (
    constant_gap_exact_case,
    ordered_increment_samples,
    ordered_rv_bound,
)
from halfspace_lpp.experiments.tails import (
    _shape_exponent,
    diagonal_lower_tail_check,
    lpp_tail_shape,
    rw_bound_check,
    surcharge_bound_check,
)
from halfspace_lpp.scaling import ScalingFrame


# ---------------------------------------------------------------- stats

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@given(st.lists(finite_floats, min_size=2, max_size=60))
def test_estimate_matches_numpy(values):
    est = Estimate.from_samples(values, seed0=3)
    assert est.n == len(values)
    assert est.seed0 == 3
    assert est.mean == pytest.approx(np.mean(values), rel=1e-12, abs=1e-9)
    assert est.variance == pytest.approx(np.var(values, ddof=1), rel=1e-9, abs=1e-9)
    assert est.stderr == pytest.approx(math.sqrt(est.variance / est.n))


def test_estimate_needs_two_samples():
    with pytest.raises(ValueError):
        Estimate.from_samples([1.0], seed0=0)
    with pytest.raises(ValueError):
        Estimate.from_samples([], seed0=0)


def test_estimate_constant_samples_zero_variance():
    est = Estimate.from_samples([2.5] * 50, seed0=0)
    assert est.variance == 0.0
    assert est.stderr == 0.0


def test_binomial_stderr_values():
    assert binomial_stderr(0.5, 100) == pytest.approx(0.05)
    assert binomial_stderr(0.0, 100) == 0.0
    assert binomial_stderr(1.0, 7) == 0.0


def test_bound_check_censoring_and_slack():
    n = 1000
    # counts: 9 is censored (< CENSOR_MIN); 40 tests the 3 sigma slack edge.
    check = BoundCheck.from_counts(
        abscissae=(1.0, 2.0, 3.0),
        counts=(40, 9, 12),
        n=n,
        bound=(0.03, 0.0, 0.02),
    )
    assert check.censored == (False, True, False)
    assert check.n == n
    # 0.04 <= 0.03 + 3*stderr(0.04) holds; the censored point never counts.
    se = binomial_stderr(0.04, n)
    assert 0.04 <= 0.03 + 3.0 * se
    assert check.satisfied

    violated = BoundCheck.from_counts(
        abscissae=(1.0,), counts=(400,), n=n, bound=(0.1,)
    )
    assert not violated.satisfied


def test_bound_check_rejects_length_mismatch():
    with pytest.raises((ValueError, TypeError)):
        BoundCheck.from_counts(
            abscissae=(1.0, 2.0), counts=(15, 11), n=100, bound=(1.0,)
        )


def test_fit_log_linear_exact_two_points():
    # ln p = -2 x + 1 reproduced exactly from two uncensored points.
    x = (1.0, 2.0, 3.0)
    p = (math.exp(-1.0), math.exp(-3.0), 0.5)
    fit = fit_log_linear(x, p, censored=(False, False, True))
    assert fit.n_used == 2
    assert fit.slope == pytest.approx(-2.0, abs=1e-12)
    assert fit.intercept == pytest.approx(1.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_log_linear_needs_two_uncensored():
    with pytest.raises(ValueError):
        fit_log_linear((1.0, 2.0), (0.5, 0.25), censored=(False, True))


def test_fit_log_linear_noisy_r2_below_one():
    rng = np.random.default_rng(5)
    x = np.linspace(1.0, 4.0, 12)
    p = np.exp(-1.3 * x + rng.normal(0.0, 0.05, size=x.size))
    fit = fit_log_linear(tuple(x), tuple(p), censored=(False,) * x.size)
    assert fit.n_used == 12
    assert fit.slope == pytest.approx(-1.3, abs=0.1)
    assert 0.9 < fit.r_squared < 1.0


# ---------------------------------------------------------------- io

def test_format_cell_cases():
    assert format_cell(None) == ""
    assert format_cell(True) == "1"
    assert format_cell(False) == "0"
    assert format_cell(7) == "7"
    assert format_cell(0.1) == repr(0.1)
    assert float(format_cell(1.0 / 3.0)) == 1.0 / 3.0
    assert format_cell("censored") == "censored"


@pytest.mark.parametrize("bad", ["a,b", "a\nb", 'say "hi"'])
def test_format_cell_rejects_structural_characters(bad):
    with pytest.raises(ValueError):
        format_cell(bad)


def test_write_csv_bytes(tmp_path):
    out = tmp_path / "rows.csv"
    rows = [("comparisons", 10, 1.0, 0.0, "p", 0.5, None, 100, 0)]
    header = ("experiment", "N", "tau", "delta", "param", "value", "stderr", "n", "seed0")
    write_csv(out, rows, header=header)
    data = out.read_bytes()
    assert data == (
        b"experiment,N,tau,delta,param,value,stderr,n,seed0\n"
        b"comparisons,10,1.0,0.0,p,0.5,,100,0\n"
    )


def test_write_csv_rejects_ragged_rows(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "x.csv", [("a", 1)], header=("one",))


def test_sidecar_path_variants(tmp_path):
    assert sidecar_path(tmp_path / "run.csv").name == "run.json"
    assert sidecar_path(tmp_path / "run.dat").name == "run.dat.json"


def test_write_sidecar_round_trip(tmp_path):
    target = tmp_path / "run.csv"
    meta = {"seed": 1, "grid": [1.0, 2.0]}
    path = write_sidecar(target, meta)
    loaded = json.loads(path.read_text())
    assert loaded == meta
    assert path.read_text().endswith("\n")


def test_data_dir_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("LPP_DATA_DIR", str(tmp_path))
    assert data_dir() == tmp_path
    monkeypatch.delenv("LPP_DATA_DIR")
    assert data_dir().resolve() == data_dir().resolve()  # stable without the env


# ---------------------------------------------------------------- comparisons

def _row_widths_ok(rows):
    return all(len(r) == len(CSV_HEADER) for r in rows)


def test_comparisons_small_run_no_violations():
    frame = ScalingFrame(N=40, delta=0.0, kappa=2.0)
    report = check_comparisons(frame, n_replicas=30, n_pairs=4, seed0=11)
    assert report.invariant_failures == ()
    names = [f.name for f in report.families]
    assert names == [
        "pp_le_stat_plus",
        "stat_minus_le_stat_plus",
        "stat_minus_le_avoiding",
        "full_square_le_pp_rate1",
        "crossed:stat_minus_le_pp",
        "crossed_off_diagonal:pp_le_stat_minus",
    ]
    for f in report.families[:4]:
        assert f.checked == 30 * 4
        assert f.violations == 0
    # conditional families only check the replicas where their event fired
    crossed = report.families[4]
    assert 0 <= crossed.checked <= 30 * 4
    assert _row_widths_ok(report.csv_rows())


def test_comparisons_rejects_negative_kappa():
    frame = ScalingFrame(N=40, delta=0.0, kappa=-1.0)
    with pytest.raises(ValueError, match="kappa"):
        check_comparisons(frame, n_replicas=5)


def test_comparisons_rejects_tiny_levels():
    frame = ScalingFrame(N=40, kappa=1.0)
    with pytest.raises(ValueError, match="anti-diagonal"):
        check_comparisons(frame, n_replicas=5, levels=(0.01, 1.0))


# ---------------------------------------------------------------- crossing

def test_crossing_small_run_structure():
    frame = ScalingFrame(N=40, delta=0.0, kappa=0.0)
    report = crossing_probability(
        frame, gaps=(1.0, 3.0), u1=0.0, u2=0.25, n_replicas=200, seed0=2
    )
    assert report.invariant_failures == ()
    assert len(report.results) == 2
    for r, p in zip(report.results, report.p_cross()):
        assert 0 <= r.n_crossed <= 200
        assert r.n_touched <= r.n_crossed  # touching the diagonal implies a crossing
        assert p == r.n_crossed / 200
    assert _row_widths_ok(report.csv_rows())


def test_crossing_input_validation():
    frame = ScalingFrame(N=40)
    with pytest.raises(ValueError, match="u1"):
        crossing_probability(frame, u1=0.3, u2=0.2, n_replicas=10)
    with pytest.raises(ValueError, match="positive"):
        crossing_probability(frame, gaps=(0.0, 1.0), n_replicas=10)


# ---------------------------------------------------------------- localization

def test_localization_small_run_structure():
    frame = ScalingFrame(N=40, tau=0.5, delta=0.0, kappa=0.0)
    report = localization_profile(
        frame, m_values=(0.25, 0.5, 1.0), n_replicas=400, seed0=4
    )
    assert report.invariant_failures == ()
    # larger threshold catches a subset of excursions, so counts can only drop
    for per_model in report.counts:
        assert all(a >= b for a, b in zip(per_model, per_model[1:]))
    assert report.pp_below_stationary.n == 400
    assert _row_widths_ok(report.csv_rows())


def test_localization_needs_interior_tau():
    with pytest.raises(ValueError, match="tau"):
        localization_profile(ScalingFrame(N=40, tau=1.0), n_replicas=10)


def test_localization_thresholds_must_clear_endpoint():
    frame = ScalingFrame.from_config(
        {"N": 40, "tau": 0.5, "m1_tilde": 2.0}
    )
    with pytest.raises(ValueError, match="m1"):
        localization_profile(frame, m_values=(0.1,), n_replicas=10)


# ---------------------------------------------------------------- covariance

@pytest.mark.parametrize("model", ["stationary", "pp"])
def test_covariance_identity_small_run(model):
    frame = ScalingFrame(N=50, tau=0.5, delta=0.5, kappa=0.5)
    report = two_time_covariance(frame, model=model, n_replicas=1000, seed0=6)
    assert report.identity_residual <= 1e-12
    assert report.invariant_failures == ()
    assert report.mean_tau.n == 1000
    # Cov = (Var_tau + Var_1 - Var_diff) / 2 holds on the reported numbers too
    recon = 0.5 * (report.var_tau.mean + report.var_1.mean - report.var_diff.mean)
    assert report.cov.mean == pytest.approx(recon, rel=1e-10, abs=1e-12)
    assert _row_widths_ok(report.csv_rows())


def test_covariance_refuses_small_n():
    frame = ScalingFrame(N=50, tau=0.5)
    with pytest.raises(ValueError, match="refuses"):
        two_time_covariance(frame, n_replicas=999)


def test_covariance_needs_two_times():
    with pytest.raises(ValueError, match="tau"):
        two_time_covariance(ScalingFrame(N=50, tau=1.0), n_replicas=1000)
    with pytest.raises(ValueError, match="model"):
        two_time_covariance(
            ScalingFrame(N=50, tau=0.5), model="exact", n_replicas=1000
        )


def test_restart_report_prediction_scaling():
    frame = ScalingFrame(N=50, tau=0.5)
    report = restart_variance(frame, n_replicas=1000, seed0=6)
    assert report.n_prime == 25
    factor = (1.0 - frame.tau) ** (2.0 / 3.0)
    assert report.prediction == pytest.approx(factor * report.var_rescaled.mean)
    assert _row_widths_ok(report.csv_rows())


# ---------------------------------------------------------------- tails

def test_rw_bound_small_run_satisfied():
    frame = ScalingFrame(N=100, delta=1.0, kappa=2.0)
    report = rw_bound_check(frame, length=1.0, xi_grid=(1.0, 2.0), n_replicas=20_000, seed0=8)
    assert report.satisfied
    for check in (report.lower, report.upper, report.sup):
        assert len(check.empirical) == 2
        bound_1 = 2.0 * math.exp(-1.0 / 4.0)
        assert check.bound[0] in (pytest.approx(bound_1), pytest.approx(bound_1 / 2.0))
    assert _row_widths_ok(report.csv_rows())


def test_rw_bound_rejects_empty_walk():
    with pytest.raises(ValueError):
        rw_bound_check(ScalingFrame(N=100), length=0.0, n_replicas=10)


def test_surcharge_small_run_satisfied():
    frame = ScalingFrame(N=100, delta=1.0, kappa=2.0)
    report = surcharge_bound_check(frame, u=1.0, s_grid=(2.0, 3.0), n_replicas=20_000, seed0=8)
    assert report.satisfied
    assert _row_widths_ok(report.csv_rows())


def test_surcharge_needs_ordered_densities():
    with pytest.raises(ValueError, match="kappa"):
        surcharge_bound_check(ScalingFrame(N=100, kappa=0.0), n_replicas=10)
    with pytest.raises(ValueError, match="u"):
        surcharge_bound_check(ScalingFrame(N=100, kappa=1.0), u=0.0, n_replicas=10)


def test_tail_shape_small_run_decays():
    frame = ScalingFrame(N=60, delta=0.0, kappa=0.0)
    report = lpp_tail_shape(frame, s_grid=(0.25, 0.75, 1.25), n_replicas=4000, seed0=9)
    decays = report.decays()
    assert set(report.counts) == {(m, s) for m in report.MODELS for s in report.SIDES}
    # upper tails at these S have plenty of mass; both should show decay
    assert decays[("stationary", "upper")]
    assert decays[("pp", "upper")]
    for per_s in report.counts.values():
        assert all(a >= b for a, b in zip(per_s, per_s[1:]))
    assert _row_widths_ok(report.csv_rows())


def test_shape_exponent_values():
    assert _shape_exponent(1.0) == pytest.approx(8.0 / 3.0 - 2.0 + 2.0 / 3.0)
    assert _shape_exponent(4.0) == pytest.approx(8.0 / 3.0 - 8.0 + 16.0 / 3.0)


def test_diagonal_lower_tail_validation():
    frame = ScalingFrame(N=60)
    with pytest.raises(ValueError, match="anchor"):
        diagonal_lower_tail_check(frame, anchor=(-9.0, 1.0), n_replicas=100)
    with pytest.raises(ValueError, match="negative"):
        diagonal_lower_tail_check(frame, w_grid=(1.0,), anchor=(1.0, 1.0), n_replicas=100)
    with pytest.raises(ValueError, match="mu"):
        diagonal_lower_tail_check(
            frame, mu_grid=(5.0,), anchor=(-1.0, 5.0), n_replicas=100
        )


def test_diagonal_lower_tail_censored_anchor_raises():
    # 60 replicas cannot put CENSOR_MIN hits on the anchor probability here
    frame = ScalingFrame(N=60)
    with pytest.raises(ValueError, match="censored"):
        diagonal_lower_tail_check(
            frame, w_grid=(-2.0,), mu_grid=(0.5,), anchor=(-2.0, 0.5), n_replicas=60
        )


def test_diagonal_lower_tail_small_run():
    frame = ScalingFrame(N=60)
    report = diagonal_lower_tail_check(
        frame,
        w_grid=(-0.5, -1.0),
        mu_grid=(1.0, 2.0),
        anchor=(-0.5, 1.0),
        n_replicas=4000,
        seed0=10,
    )
    assert report.c_fitted > 0.0
    assert set(report.checks) == {-0.5, -1.0}
    assert _row_widths_ok(report.csv_rows())


# ---------------------------------------------------------------- ordered

def test_ordered_bound_on_coupled_increments():
    frame = ScalingFrame(N=60, delta=0.0, kappa=2.0)
    a, b = ordered_increment_samples(frame, u1=0.1, u2=0.6, n_replicas=2000, seed0=12)
    assert a.shape == b.shape == (2000,)
    assert np.all(a >= 0.0)
    assert np.all(a <= b)  # the coupling theorem, pathwise
    report = ordered_rv_bound(a, b, one_minus_tau=0.5, seed0=12)
    assert report.satisfied
    assert report.rhs_closed_form is not None
    assert report.lhs <= report.rhs_closed_form * (1.0 + 1e-12)
    assert _row_widths_ok(report.csv_rows(frame))


def test_ordered_bound_custom_r_has_no_closed_form():
    report = ordered_rv_bound(
        np.array([0.0, 1.0, 2.0]), np.array([1.0, 2.0, 3.0]),
        one_minus_tau=0.25, r_value=2.0,
    )
    assert report.rhs_closed_form is None
    assert report.r_value == 2.0


def test_ordered_bound_input_validation():
    good = np.array([0.0, 1.0])
    with pytest.raises(ValueError, match="equal-length"):
        ordered_rv_bound(good, np.array([1.0]), 0.5)
    with pytest.raises(ValueError, match="nonnegative"):
        ordered_rv_bound(np.array([-1.0, 0.0]), good, 0.5)
    with pytest.raises(ValueError, match="1 of 2"):
        ordered_rv_bound(np.array([2.0, 0.0]), np.array([1.0, 1.0]), 0.5)
    with pytest.raises(ValueError, match="tau"):
        ordered_rv_bound(good, good, 1.5)
    with pytest.raises(ValueError, match="R"):
        ordered_rv_bound(good, good, 0.5, r_value=-1.0)


def test_ordered_samples_need_gap():
    with pytest.raises(ValueError, match="kappa"):
        ordered_increment_samples(ScalingFrame(N=60, kappa=0.0), n_replicas=10)


def test_constant_gap_exact_case_is_rational_and_holds():
    result = constant_gap_exact_case(gap=4, t=Fraction(1, 2))
    assert result.holds
    assert result.lhs == 16
    assert result.rhs == result.closed_form
    assert isinstance(result.rhs, Fraction)
    assert result.one_minus_tau == Fraction(1, 2) ** 15
    # the documented margin: 16 against 1048577/4096
    assert result.rhs == Fraction(1048577, 4096)


def test_constant_gap_rejects_non_square_gap():
    with pytest.raises(ValueError):
        constant_gap_exact_case(gap=3)
    with pytest.raises(ValueError, match="t must"):
        constant_gap_exact_case(gap=4, t=Fraction(3, 2))


# ---------------------------------------------------------------- modulus

def test_modulus_small_run_monotone_in_window():
    frame = ScalingFrame(N=60, delta=0.0)
    report = modulus_of_continuity(
        frame,
        m_span=0.5,
        window_grid=(0.5, 0.25),
        eps_grid=(0.25, 1.0),
        n_replicas=300,
        seed0=13,
    )
    for eps in report.eps_grid:
        assert report.non_increasing_in_window(eps)
        # larger eps is a rarer event at fixed window, again pathwise
    for w in report.window_grid:
        assert report.probabilities[(0.25, w)] >= report.probabilities[(1.0, w)]
    assert _row_widths_ok(report.csv_rows())


def test_modulus_input_validation():
    frame = ScalingFrame(N=60)
    with pytest.raises(ValueError, match="positive"):
        modulus_of_continuity(frame, m_span=0.0, n_replicas=10)
    with pytest.raises(ValueError, match="exceed"):
        modulus_of_continuity(frame, m_span=0.25, window_grid=(0.5,), n_replicas=10)
    with pytest.raises(ValueError, match="lattice step"):
        modulus_of_continuity(
            frame, m_span=0.5, window_grid=(1e-4,), n_replicas=10
        )
