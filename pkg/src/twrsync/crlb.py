"""Fisher information and Cramer-Rao bounds for (drift, delay), plus the
arrival-accuracy-from-SNR mapping.

Closed forms with T = sigma_r^2 + N*sigma_a^2 and V = N*sum((delta-mean)^2):
  B = N/T, D = sum(delta)/T, F = (sigma_r^2*sum(delta^2) + sigma_a^2*V)/(sigma_r^2*T)
  f_aa = 4*tau^2*B + 4*tau*D + F,  f_tt = 4*alpha^2*B,  f_at = 2*alpha*(2*tau*B + D)
  c_alpha = N*sigma_r^2/V          (no sigma_a dependence)
  c_tau = (sigma_r^2*sum((2*tau+delta)^2) + sigma_a^2*V)/(4*alpha^2*V)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import NoiseModel

__all__ = ["CrlbReport", "SingularInformationError", "fim", "crlb_alpha_tau", "toa_crlb"]


class SingularInformationError(ValueError):
    """The information matrix is singular (constant reply schedule)."""


@dataclass(frozen=True)
class CrlbReport:
    c_alpha: float
    c_tau: float
    fim: np.ndarray  # 2x2, (alpha, tau) ordering


def _check(delta: np.ndarray, noise: NoiseModel) -> np.ndarray:
    delta = np.asarray(delta, dtype=float)
    if delta.ndim != 1 or delta.size < 2:
        raise ValueError(f"need at least 2 delays, got shape {delta.shape}")
    if noise.sigma_r <= 0.0:
        raise ValueError("sigma_r must be > 0 to form an information matrix")
    return delta


def fim(alpha: float, tau: float, delta: np.ndarray, noise: NoiseModel) -> np.ndarray:
    """2x2 Fisher information for (alpha, tau) from the return timestamps."""
    delta = _check(delta, noise)
    s2 = noise.sigma_r**2
    q2 = noise.sigma_a**2
    n = delta.size
    t = s2 + n * q2
    v = n * float(((delta - delta.mean()) ** 2).sum())
    b = n / t
    d = float(delta.sum()) / t
    f = (s2 * float((delta * delta).sum()) + q2 * v) / (s2 * t)
    f_aa = 4.0 * tau * tau * b + 4.0 * tau * d + f
    f_tt = 4.0 * alpha * alpha * b
    f_at = 2.0 * alpha * (2.0 * tau * b + d)
    return np.array([[f_aa, f_at], [f_at, f_tt]])


def crlb_alpha_tau(alpha: float, tau: float, delta: np.ndarray, noise: NoiseModel) -> CrlbReport:
    """Variance bounds for unbiased (drift, delay) estimates.

    c_alpha is computed in its sigma_a-free form so it is bit-identical
    across sigma_a values; equality with B/(B*F - D^2) is a tested identity.
    """
    delta = _check(delta, noise)
    s2 = noise.sigma_r**2
    q2 = noise.sigma_a**2
    n = delta.size
    v = n * float(((delta - delta.mean()) ** 2).sum())
    if v <= 0.0:
        raise SingularInformationError(
            "constant reply schedule carries no drift information (B*F - D^2 = 0)"
        )
    c_alpha = n * s2 / v
    c_tau = (s2 * float(((2.0 * tau + delta) ** 2).sum()) + q2 * v) / (4.0 * alpha * alpha * v)
    return CrlbReport(c_alpha=c_alpha, c_tau=c_tau, fim=fim(alpha, tau, delta, noise))


def toa_crlb(snr: float, beta: float) -> float:
    """Arrival-time variance bound 1/(snr*beta^2) for linear SNR and effective
    bandwidth beta (Hz, quoted with the 2*pi factor folded in)."""
    if not (math.isfinite(snr) and snr > 0.0):
        raise ValueError(f"snr must be > 0, got {snr!r}")
    if not (math.isfinite(beta) and beta > 0.0):
        raise ValueError(f"beta must be > 0, got {beta!r}")
    return 1.0 / (snr * beta * beta)
