"""Clock and exchange parameter types shared by every other module.

All times are seconds stored as 64-bit floats. With departure times below
~10 s and noise levels down to 0.1 ps, double precision leaves at least
three digits of headroom.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ClockParams",
    "ProtocolConfig",
    "NoiseModel",
    "local_from_true",
    "true_from_local",
]


@dataclass(frozen=True)
class ClockParams:
    """Linear clock model t' = alpha*t + gamma of the imperfect transceiver.

    nu_ppm is the rate error in parts per million; alpha = 1 + nu_ppm*1e-6
    exactly. nu_ppm may be negative, but alpha must stay positive.
    """

    nu_ppm: float
    gamma: float

    def __post_init__(self) -> None:
        for name in ("nu_ppm", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.alpha <= 0.0:
            raise ValueError(f"drift factor must be positive, got alpha={self.alpha!r}")

    @property
    def alpha(self) -> float:
        return 1.0 + self.nu_ppm * 1e-6

    @property
    def nu(self) -> float:
        return self.nu_ppm * 1e-6


@dataclass(frozen=True, eq=False)
class ProtocolConfig:
    """Reply schedule and ground truth of one two-way exchange.

    delays holds the N wait durations (strictly increasing, positive); tau is
    the true one-way propagation delay; t_d_prime is the departure time on the
    imperfect clock (default 0; every estimator uses only differences against
    it, so the choice is unobservable).
    """

    tau: float
    delays: np.ndarray
    t_d_prime: float = 0.0

    def __post_init__(self) -> None:
        d = np.asarray(self.delays, dtype=float)
        object.__setattr__(self, "delays", d)
        if d.ndim != 1 or d.size < 2:
            raise ValueError(f"need at least 2 reply delays, got shape {d.shape}")
        if not np.all(np.isfinite(d)) or d[0] <= 0.0:
            raise ValueError("reply delays must be finite and positive")
        if not np.all(np.diff(d) > 0.0):
            raise ValueError("reply delays must be strictly increasing")
        if not (math.isfinite(self.tau) and self.tau >= 0.0):
            raise ValueError(f"tau must be finite and >= 0, got {self.tau!r}")
        if not math.isfinite(self.t_d_prime):
            raise ValueError("t_d_prime must be finite")

    @property
    def n(self) -> int:
        return int(self.delays.size)

    def __eq__(self, other: object) -> bool:
        # the array field rules out the generated dataclass comparison
        if not isinstance(other, ProtocolConfig):
            return NotImplemented
        return (
            self.tau == other.tau
            and self.t_d_prime == other.t_d_prime
            and np.array_equal(self.delays, other.delays)
        )


@dataclass(frozen=True)
class NoiseModel:
    """Timestamp error levels: sigma_a for the arrival estimate at the
    perfect-clock side, sigma_r for each return timestamp.

    Zero values are legal here so a noiseless exchange can be simulated;
    anything that forms a covariance from this model requires sigma_r > 0
    and checks it there.
    """

    sigma_a: float
    sigma_r: float

    def __post_init__(self) -> None:
        for name in ("sigma_a", "sigma_r"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")


def local_from_true(t: float, clock: ClockParams) -> float:
    """Map a true time to the imperfect clock: alpha*t + gamma."""
    return clock.alpha * t + clock.gamma


def true_from_local(t_prime: float, clock: ClockParams) -> float:
    """Invert the clock map: (t' - gamma)/alpha."""
    return (t_prime - clock.gamma) / clock.alpha
