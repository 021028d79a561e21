"""Joint maximum-likelihood estimation of (drift, delay) from the return
timestamps, with first-order predicted variances and the matching offset
estimators.

With X = t_r_hat - t_d'*ones and the five quadratic forms B..F of the
inverse covariance, the stationarity system
    C - 2*a*t*B - a*D = 0,  E - 2*a*t*D - a*F = 0
solves to alpha2 = (B*E - C*D)/(B*F - D^2) and
tau2 = (C*F - D*E)/(2*(B*E - C*D)).
"""
from __future__ import annotations

from dataclasses import dataclass

from .crlb import crlb_alpha_tau
from .model import NoiseModel, ProtocolConfig
from .numerics import CovX, quad_forms
from .protocol import MissingToaError, ObservationSet

__all__ = ["MleEstimate", "DEGENERATE_REL_TOL", "estimate_mle", "predicted_variances", "estimate_gamma_mle"]

# |B*E - C*D| below this fraction of |C*F - D*E| means the drift estimate is
# numerically zero and the delay ratio is undefined. A relative tolerance
# rather than an exact-zero test keeps the failure path reachable.
DEGENERATE_REL_TOL = 1e-30


@dataclass(frozen=True)
class MleEstimate:
    alpha2: float
    tau2: float | None
    alpha2_var: float
    tau2_var: float | None
    gamma21: float | None
    gamma22: float | None
    degenerate: bool


def estimate_mle(obs: ObservationSet, noise: NoiseModel) -> MleEstimate:
    """Joint (drift, delay) MLE plus offsets when the arrival estimate exists.

    A degenerate trial (see DEGENERATE_REL_TOL) still carries alpha2 and its
    variance but reports tau2 and the offsets as None.
    """
    x = obs.t_r_hat - obs.t_d_prime
    cov = CovX(sigma_a2=noise.sigma_a**2, sigma_r2=noise.sigma_r**2, n=obs.n)
    b, c, d, e, f = quad_forms(cov, obs.delays, x)
    be_cd = b * e - c * d
    bf_d2 = b * f - d * d
    cf_de = c * f - d * e
    alpha2 = be_cd / bf_d2
    alpha2_var = crlb_alpha_tau(1.0, 0.0, obs.delays, noise).c_alpha  # c_alpha needs neither estimate
    if abs(be_cd) < DEGENERATE_REL_TOL * abs(cf_de):
        return MleEstimate(
            alpha2=alpha2, tau2=None, alpha2_var=alpha2_var,
            tau2_var=None, gamma21=None, gamma22=None, degenerate=True,
        )
    tau2 = cf_de / (2.0 * be_cd)
    tau2_var = crlb_alpha_tau(alpha2, tau2, obs.delays, noise).c_tau
    if obs.t_a_hat is None:
        gamma21 = gamma22 = None
    else:
        gamma21, gamma22 = estimate_gamma_mle(obs, alpha2, tau2)
    return MleEstimate(
        alpha2=alpha2, tau2=tau2, alpha2_var=alpha2_var,
        tau2_var=tau2_var, gamma21=gamma21, gamma22=gamma22, degenerate=False,
    )


def predicted_variances(
    config: ProtocolConfig, noise: NoiseModel, alpha_hat: float, tau_hat: float
) -> tuple[float, float]:
    """First-order variances of the joint MLE, evaluated at the estimates."""
    report = crlb_alpha_tau(alpha_hat, tau_hat, config.delays, noise)
    return report.c_alpha, report.c_tau


def estimate_gamma_mle(obs: ObservationSet, alpha2: float, tau2: float) -> tuple[float, float]:
    """Offset estimators using the MLE drift and delay."""
    if obs.t_a_hat is None:
        raise MissingToaError("offset estimation needs t_a_hat in the observation set")
    per_reply = obs.t_r_hat - alpha2 * (obs.t_a_hat + obs.delays + tau2)
    gamma21 = float(per_reply.mean())
    gamma22 = float(obs.t_d_prime - alpha2 * (obs.t_a_hat - tau2))
    return gamma21, gamma22
