"""Shared helpers for the test suite."""
import numpy as np

from twrsync import ClockParams, NoiseModel, ProtocolConfig


def make_random_setup(rng: np.random.Generator) -> tuple[ClockParams, ProtocolConfig, NoiseModel]:
    """One random well-conditioned scenario.

    Ranges keep the exact-recovery floor of the closed-form estimators well
    below the tolerances asserted on them: tau at least delta_max/300 (the
    delay is extracted from timestamps of magnitude ~delta_max, so the
    relative rounding error scales with delta_max/tau), departure times of
    the same magnitude as the schedule, and noise ratios within a decade.
    """
    delta_max = 10.0 ** rng.uniform(-4, -2)
    n = int(rng.integers(2, 17))
    base = delta_max * (np.arange(1, n + 1) / n)
    jitter = rng.uniform(-0.3, 0.3, n) * (delta_max / n)
    clock = ClockParams(nu_ppm=rng.uniform(-100.0, 100.0), gamma=rng.uniform(-1e-5, 1e-5))
    config = ProtocolConfig(
        tau=rng.uniform(delta_max / 300.0, delta_max / 10.0),
        delays=base + jitter,
        t_d_prime=rng.uniform(0.0, 2.0 * delta_max),
    )
    sigma_r = 10.0 ** rng.uniform(-11, -9)
    noise = NoiseModel(sigma_a=sigma_r * 10.0 ** rng.uniform(-1, 1), sigma_r=sigma_r)
    return clock, config, noise
