"""End-to-end acceptance checks.

Each test prints a single [PASS]/[FAIL] line naming the property under
test, then asserts it. The heavy Monte Carlo runs are module-scoped
fixtures shared by the tests that read them; every run is seeded, so the
whole file is deterministic.
"""
import math

import numpy as np
import pytest
from conftest import make_random_setup

from twrsync import (
    CovX,
    RngSpec,
    Scenario,
    SweepSpec,
    covx_dense,
    covx_inv_apply,
    crlb_alpha_tau,
    default_config,
    estimate_alpha1,
    estimate_empirical,
    estimate_mle,
    generic_spd_inverse,
    ideal_observations,
    run_sweep,
    run_trials,
    toa_crlb,
)
from twrsync.cli import main as cli_main

TRIALS = 10_000
SETUPS = 100
SETUP_SEED = 20260819
NOISE_GRID = (1e-11, 1e-10, 1e-9)
SPAN_GRID = (1e-4, 1e-3, 1e-2)
REPLY_GRID = (2, 4, 8, 16)
BAND = (0.93, 1.07)

ALL_NAMES = ("alpha1", "alpha2", "tau1", "tau2", "gamma11", "gamma12", "gamma21", "gamma22")


def report(capsys, label: str, ok: bool) -> None:
    with capsys.disabled():
        print(("[PASS] " if ok else "[FAIL] ") + label)
    assert ok, label


def stds(table, name: str) -> list[float]:
    return [row.stats.columns[name].std for row in table.rows]


@pytest.fixture(scope="module")
def base_scenario():
    cfg = default_config()
    return Scenario(
        clock=cfg.clock, config=cfg.protocol, noise=cfg.noise,
        trials=TRIALS, rng=RngSpec(seed=0),
    )


@pytest.fixture(scope="module")
def defaults_stats(base_scenario):
    return run_trials(base_scenario)


@pytest.fixture(scope="module")
def arrival_noise_sweep(base_scenario):
    return run_sweep(SweepSpec(axis="sigma_a", grid=NOISE_GRID, base=base_scenario))


@pytest.fixture(scope="module")
def return_noise_sweep(base_scenario):
    return run_sweep(SweepSpec(axis="sigma_r", grid=NOISE_GRID, base=base_scenario))


@pytest.fixture(scope="module")
def span_sweep(base_scenario):
    return run_sweep(SweepSpec(axis="delta_n_max", grid=SPAN_GRID, base=base_scenario))


@pytest.fixture(scope="module")
def reply_sweep(base_scenario):
    return run_sweep(SweepSpec(axis="n_replies", grid=REPLY_GRID, base=base_scenario))


def test_01_time_of_arrival_bound_anchors(capsys):
    lo = math.sqrt(toa_crlb(10.0, 45.14e9))
    hi = math.sqrt(toa_crlb(1000.0, 45.14e9))
    ok = (
        abs(lo - 7.0e-12) <= 0.02 * 7.0e-12
        and abs(hi - 0.70e-12) <= 0.02 * 0.70e-12
    )
    report(capsys, "time-of-arrival deviation floor is 7.0 ps at 10 dB and 0.70 ps at 30 dB for 45.14 GHz rms bandwidth", ok)


def test_02_noiseless_recovery(capsys):
    rng = np.random.default_rng(SETUP_SEED)
    ok = True
    for _ in range(SETUPS):
        clock, config, noise = make_random_setup(rng)
        obs = ideal_observations(config, clock)
        emp = estimate_empirical(obs, noise)
        mle = estimate_mle(obs, noise)
        ok = ok and not mle.degenerate
        for alpha_hat in (emp.alpha1, mle.alpha2):
            ok = ok and abs(alpha_hat - clock.alpha) <= 1e-12 * clock.alpha
        for tau_hat in (emp.tau1, mle.tau2):
            ok = ok and abs(tau_hat - config.tau) <= 1e-12 * config.tau
        for gamma_hat in (emp.gamma11, emp.gamma12, mle.gamma21, mle.gamma22):
            ok = ok and abs(gamma_hat - clock.gamma) <= 1e-15
    report(capsys, "noiseless exchanges recover drift and delay to 1e-12 relative and offsets to 1e-15 s across 100 random setups", ok)


def test_03_drift_spread_matches_bound(capsys, defaults_stats):
    ratio = defaults_stats.columns["alpha2"].std / defaults_stats.pred_std["alpha2"]
    ok = BAND[0] <= ratio <= BAND[1]
    report(capsys, "MLE drift spread over 10000 trials sits within 7% of the predicted bound", ok)


def test_04_delay_spread_matches_bound(capsys, defaults_stats):
    ratio = defaults_stats.columns["tau2"].std / defaults_stats.pred_std["tau2"]
    ok = BAND[0] <= ratio <= BAND[1]
    report(capsys, "MLE delay spread over 10000 trials sits within 7% of the predicted bound", ok)


def test_05_weighted_drift_variance_equals_bound(capsys):
    rng = np.random.default_rng(SETUP_SEED)
    ok = True
    for _ in range(SETUPS):
        clock, config, noise = make_random_setup(rng)
        obs = ideal_observations(config, clock)
        _, var = estimate_alpha1(obs, noise)
        bound = crlb_alpha_tau(clock.alpha, config.tau, config.delays, noise).c_alpha
        ok = ok and abs(var - bound) <= 1e-9 * bound
    report(capsys, "weighted-ratio drift variance matches the analytic bound to 1e-9 across 100 random setups", ok)


def test_06_structured_inverse_matches_generic(capsys):
    rng = np.random.default_rng(SETUP_SEED)
    ok = True
    for _ in range(SETUPS):
        n = int(rng.integers(2, 65))
        sigma_a2 = float(10.0 ** rng.uniform(-22, -18))
        sigma_r2 = float(10.0 ** rng.uniform(-22, -18))
        cov = CovX(sigma_a2=sigma_a2, sigma_r2=sigma_r2, n=n)
        inv_generic = generic_spd_inverse(covx_dense(cov))
        q = sigma_a2 / (sigma_r2 + n * sigma_a2)
        analytic = (np.eye(n) - q) / sigma_r2
        ok = ok and np.abs(inv_generic - analytic).max() <= 1e-10 * np.abs(analytic).max()
        x = rng.standard_normal(n)
        y_struct = covx_inv_apply(cov, x)
        ok = ok and np.abs(y_struct - inv_generic @ x).max() <= 1e-10 * np.abs(y_struct).max()
    report(capsys, "structured covariance inverse agrees with a generic SPD inverse to 1e-10 for up to 64 replies", ok)


def test_07_drift_bound_ignores_arrival_noise(capsys, arrival_noise_sweep):
    rows = arrival_noise_sweep.rows
    ok = len(rows) == len(NOISE_GRID) and not arrival_noise_sweep.failed
    for name in ("alpha1", "alpha2"):
        preds = [row.stats.pred_std[name] for row in rows]
        ok = ok and len(set(preds)) == 1
        for row in rows:
            ratio = row.stats.columns[name].std / row.stats.pred_std[name]
            ok = ok and BAND[0] <= ratio <= BAND[1]
    report(capsys, "drift bound is unchanged by arrival noise and simulated spreads track it across three decades", ok)


def test_08_spread_trends(capsys, arrival_noise_sweep, return_noise_sweep, span_sweep, reply_sweep):
    def strictly_increasing(seq):
        return all(a < b for a, b in zip(seq, seq[1:]))

    grows_with_arrival = all(
        strictly_increasing(stds(arrival_noise_sweep, name))
        for name in ("tau1", "tau2", "gamma11", "gamma12", "gamma21", "gamma22")
    )
    grows_with_return = all(
        strictly_increasing(stds(return_noise_sweep, name))
        for name in ("alpha1", "alpha2")
    )
    slope = np.polyfit(np.log10(SPAN_GRID), np.log10(stds(span_sweep, "alpha2")), 1)[0]
    inverse_in_span = abs(slope + 1.0) <= 0.02
    replies_never_hurt = all(
        all(b <= a for a, b in zip(col, col[1:]))
        for col in (stds(reply_sweep, name) for name in ALL_NAMES)
    )
    ok = grows_with_arrival and grows_with_return and inverse_in_span and replies_never_hurt
    report(capsys, "spread trends: delay/offset grow with arrival noise, drift grows with return noise, drift falls inversely with schedule span, nothing degrades with more replies", ok)


def test_09_biases_within_three_standard_errors(capsys, defaults_stats):
    ok = True
    for name in ALL_NAMES:
        col = defaults_stats.columns[name]
        ok = ok and col.failures == 0
        ok = ok and abs(col.bias) <= 3.0 * col.std / math.sqrt(defaults_stats.trials)
    report(capsys, "all eight estimator biases stay within three standard errors over 10000 trials", ok)


def test_10_cli_reruns_are_byte_identical(capsys, tmp_path):
    text = (
        "[run]\ntrials = 300\nseed = 7\n"
        '[sweep]\naxis = "sigma_a"\nvalues = [1e-11, 1e-10]\n'
    )
    cfg_path = tmp_path / "run.toml"
    cfg_path.write_text(text, encoding="utf-8")
    ok = True
    for cmd in ("simulate", "estimate", "crlb", "sweep"):
        first = tmp_path / f"{cmd}_a.out"
        second = tmp_path / f"{cmd}_b.out"
        for out in (first, second):
            ok = ok and cli_main([cmd, "--config", str(cfg_path), "--out", str(out)]) == 0
        ok = ok and first.read_bytes() == second.read_bytes() and len(first.read_bytes()) > 0
    report(capsys, "every subcommand writes byte-identical output when rerun with the same configuration and seed", ok)
