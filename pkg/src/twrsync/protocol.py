"""Two-way timing exchange between a perfect-clock and an imperfect-clock side.

One exchange: the imperfect side transmits at local time t_d_prime; the
perfect side estimates the arrival time t_a_hat, then transmits N replies,
the n-th after waiting delay_n; the imperfect side records each return
timestamp t_r_hat_n on its own clock. The arrival estimate carries one shared
Gaussian error (std sigma_a), each return timestamp an independent Gaussian
error (std alpha*sigma_r since it is taken on the drifting clock).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .model import ClockParams, NoiseModel, ProtocolConfig, true_from_local

__all__ = [
    "ObservationSet",
    "RngSpec",
    "MissingToaError",
    "run_exchange",
    "ideal_observations",
    "linear_delays",
]


class MissingToaError(ValueError):
    """Offset estimation requested but the observation set has no arrival estimate."""


@dataclass(frozen=True)
class ObservationSet:
    """Raw material of every estimator: the arrival estimate (optional), the
    return timestamps, and the exchange parameters both sides know."""

    t_a_hat: float | None
    t_r_hat: np.ndarray
    t_d_prime: float
    delays: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t_r_hat, dtype=float)
        d = np.asarray(self.delays, dtype=float)
        object.__setattr__(self, "t_r_hat", t)
        object.__setattr__(self, "delays", d)
        if t.ndim != 1 or t.shape != d.shape:
            raise ValueError(f"return timestamps {t.shape} do not match delays {d.shape}")
        if d.size < 2 or not np.all(np.diff(d) > 0.0):
            raise ValueError("delays must hold at least 2 strictly increasing values")

    @property
    def n(self) -> int:
        return int(self.delays.size)


@dataclass(frozen=True)
class RngSpec:
    """Deterministic noise source: one counter-based substream per trial.

    The key is derived from (seed, stream); trial index t starts the Philox
    counter at t * 2^128 so trials never overlap and results do not depend on
    execution order or parallelism.
    """

    seed: int
    stream: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError(f"seed must fit in 64 bits, got {self.seed!r}")
        object.__setattr__(self, "stream", tuple(int(s) for s in self.stream))

    def generator(self, trial: int) -> Generator:
        if trial < 0:
            raise ValueError(f"trial index must be >= 0, got {trial}")
        return Generator(Philox(counter=trial << 128, key=_philox_key(self.seed, self.stream)))


@lru_cache(maxsize=128)
def _philox_key(seed: int, stream: tuple[int, ...]) -> np.ndarray:
    # length suffix keeps distinct streams from colliding: SeedSequence
    # ignores trailing zero words, so (s,) and (s, 0) would otherwise match
    return SeedSequence((seed, *stream, len(stream))).generate_state(2, np.uint64)


def _assemble(
    config: ProtocolConfig, clock: ClockParams, eps_a: float, eps_r: np.ndarray
) -> ObservationSet:
    # t_a_hat = (t_d' - gamma)/alpha + tau + eps_a
    # t_r_hat_n = t_d' + alpha*(2*tau + delay_n) + alpha*eps_a + eps_r_n
    t_a_hat = true_from_local(config.t_d_prime, clock) + config.tau + eps_a
    t_r_hat = (
        config.t_d_prime
        + clock.alpha * (2.0 * config.tau + config.delays)
        + clock.alpha * eps_a
        + eps_r
    )
    return ObservationSet(
        t_a_hat=t_a_hat, t_r_hat=t_r_hat, t_d_prime=config.t_d_prime, delays=config.delays
    )


def run_exchange(
    config: ProtocolConfig,
    clock: ClockParams,
    noise: NoiseModel,
    rng: RngSpec,
    trial: int,
) -> ObservationSet:
    """Run one noisy exchange: one arrival error shared by all N returns,
    N independent return errors with the exact std alpha*sigma_r."""
    z = rng.generator(trial).standard_normal(config.n + 1)
    eps_a = noise.sigma_a * z[0]
    eps_r = (clock.alpha * noise.sigma_r) * z[1:]
    return _assemble(config, clock, eps_a, eps_r)


def ideal_observations(config: ProtocolConfig, clock: ClockParams) -> ObservationSet:
    """The error-free exchange (both noise terms identically zero)."""
    return _assemble(config, clock, 0.0, np.zeros(config.n))


def linear_delays(n: int, delta_max: float) -> np.ndarray:
    """Evenly spaced schedule delta_k = k*delta_max/n, k = 1..n."""
    if int(n) != n or n < 2:
        raise ValueError(f"need at least 2 replies, got n={n}")
    if not (np.isfinite(delta_max) and delta_max > 0.0):
        raise ValueError(f"delta_max must be > 0, got {delta_max!r}")
    # k/n first so the last element is exactly delta_max for every n
    return delta_max * (np.arange(1, int(n) + 1) / int(n))
