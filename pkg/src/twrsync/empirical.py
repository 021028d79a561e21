"""Empirical estimators built from per-reply ratios and averages.

Drift: each reply pair gives a ratio estimate; the combination weights are
the inverse-covariance row sums of those ratios (minimum-variance linear
combination, variance 1/A). Delay: plain average of the per-reply solutions.
Offset: two forms, one averaging over replies, one using only the departure
and arrival times.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import NoiseModel
from .protocol import MissingToaError, ObservationSet

__all__ = [
    "EmpiricalEstimate",
    "estimate_alpha1",
    "estimate_tau1",
    "estimate_gamma_empirical",
    "estimate_empirical",
]


@dataclass(frozen=True)
class EmpiricalEstimate:
    alpha1: float
    alpha1_var: float
    tau1: float
    gamma11: float | None
    gamma12: float | None


def estimate_alpha1(obs: ObservationSet, noise: NoiseModel) -> tuple[float, float]:
    """Weighted drift estimate and its predicted variance 1/A.

    The n-th ratio is (t_r_hat_{n+1} - t_r_hat_1)/(delay_{n+1} - delay_1);
    with gaps d the weights reduce to d_n*(d_n - sum(d)/N), and
    A = (sum(d^2) - sum(d)^2/N)/sigma_r^2.
    """
    if noise.sigma_r <= 0.0:
        raise ValueError("sigma_r must be > 0 to weight the ratio estimates")
    d = obs.delays[1:] - obs.delays[0]
    n = obs.n
    ratios = (obs.t_r_hat[1:] - obs.t_r_hat[0]) / d
    s = d.sum()
    a_sig2 = float((d * d).sum() - s * s / n)  # A * sigma_r^2, > 0 for non-constant delays
    alpha1 = float((d * (d - s / n) * ratios).sum() / a_sig2)
    return alpha1, noise.sigma_r**2 / a_sig2


def estimate_tau1(obs: ObservationSet, alpha1: float) -> float:
    """Average of the per-reply delay solutions (t_r_hat_n - t_d' - alpha1*delay_n)/(2*alpha1)."""
    if not alpha1 > 0.0:
        raise ValueError(f"alpha1 must be > 0, got {alpha1!r}")
    per_reply = (obs.t_r_hat - obs.t_d_prime - alpha1 * obs.delays) / (2.0 * alpha1)
    return float(per_reply.mean())


def estimate_gamma_empirical(
    obs: ObservationSet, alpha1: float, tau1: float
) -> tuple[float, float]:
    """Both offset forms; requires the arrival estimate in the observations."""
    if obs.t_a_hat is None:
        raise MissingToaError("offset estimation needs t_a_hat in the observation set")
    per_reply = obs.t_r_hat - alpha1 * (obs.t_a_hat + obs.delays + tau1)
    gamma11 = float(per_reply.mean())
    gamma12 = float(obs.t_d_prime - alpha1 * (obs.t_a_hat - tau1))
    return gamma11, gamma12


def estimate_empirical(obs: ObservationSet, noise: NoiseModel) -> EmpiricalEstimate:
    """All empirical estimates for one observation set. Offsets are None when
    the arrival estimate is absent."""
    alpha1, var = estimate_alpha1(obs, noise)
    tau1 = estimate_tau1(obs, alpha1)
    if obs.t_a_hat is None:
        gamma11 = gamma12 = None
    else:
        gamma11, gamma12 = estimate_gamma_empirical(obs, alpha1, tau1)
    return EmpiricalEstimate(alpha1=alpha1, alpha1_var=var, tau1=tau1, gamma11=gamma11, gamma12=gamma12)
