"""Structured covariance algebra for the return-timestamp vector.

The covariance of the return timestamps is sigma_r^2*I + sigma_a^2*ones*ones'
(every reply shares one arrival error). Its inverse application is a rank-one
downdate, so the fast path is O(N) and never materializes a matrix. A dense
Cholesky inverse exists solely as a cross-checking oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import lapack

__all__ = [
    "CovX",
    "QuadForms",
    "NotSpdError",
    "covx_inv_apply",
    "covx_dense",
    "quad_forms",
    "generic_spd_inverse",
    "alpha1_cov",
]


@dataclass(frozen=True)
class CovX:
    """Implicit N x N covariance sigma_r2*I + sigma_a2*ones*ones'."""

    sigma_a2: float
    sigma_r2: float
    n: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma_a2) and self.sigma_a2 >= 0.0):
            raise ValueError(f"sigma_a2 must be finite and >= 0, got {self.sigma_a2!r}")
        if not (math.isfinite(self.sigma_r2) and self.sigma_r2 > 0.0):
            raise ValueError(
                f"sigma_r2 must be > 0 (zero collapses the covariance to singular), got {self.sigma_r2!r}"
            )
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")


class QuadForms(NamedTuple):
    """The five scalars ones'Wv and delta'Wv with W the inverse covariance."""

    b: float  # ones' W ones
    c: float  # ones' W x
    d: float  # ones' W delta
    e: float  # delta' W x
    f: float  # delta' W delta


class NotSpdError(ValueError):
    """Cholesky factorization hit a nonpositive pivot; matrix is not SPD."""

    def __init__(self, pivot: int):
        self.pivot = pivot  # 1-based index of the failing leading minor
        super().__init__(f"matrix is not positive definite: leading minor {pivot} is not positive")


def covx_inv_apply(cov: CovX, v: np.ndarray) -> np.ndarray:
    """Apply the inverse covariance: (v - (sigma_a2/(sigma_r2 + N*sigma_a2)) * sum(v) * ones) / sigma_r2."""
    v = np.asarray(v, dtype=float)
    if v.shape != (cov.n,):
        raise ValueError(f"vector shape {v.shape} does not match dimension {cov.n}")
    t = cov.sigma_r2 + cov.n * cov.sigma_a2
    return (v - (cov.sigma_a2 / t) * v.sum()) / cov.sigma_r2


def covx_dense(cov: CovX) -> np.ndarray:
    """Materialize the covariance (oracle/test path only)."""
    m = np.full((cov.n, cov.n), cov.sigma_a2)
    m[np.diag_indices(cov.n)] += cov.sigma_r2
    return m


def quad_forms(cov: CovX, delta: np.ndarray, x: np.ndarray) -> QuadForms:
    """All five quadratic forms of (ones, delta, x) under the inverse covariance."""
    delta = np.asarray(delta, dtype=float)
    w1 = covx_inv_apply(cov, np.ones(cov.n))
    wd = covx_inv_apply(cov, delta)
    x = np.asarray(x, dtype=float)
    if x.shape != (cov.n,):
        raise ValueError(f"vector shape {x.shape} does not match dimension {cov.n}")
    return QuadForms(
        b=float(w1.sum()),
        c=float(w1 @ x),
        d=float(w1 @ delta),
        e=float(wd @ x),
        f=float(wd @ delta),
    )


def generic_spd_inverse(m: np.ndarray) -> np.ndarray:
    """Dense SPD inverse via Cholesky (LAPACK dpotrf/dpotri).

    Input must be exactly symmetric. Raises NotSpdError with the 1-based
    failing pivot index when the matrix is not positive definite.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix is not symmetric")
    chol, info = lapack.dpotrf(a, lower=1)
    if info > 0:
        raise NotSpdError(info)
    if info < 0:
        raise ValueError(f"illegal value in argument {-info} of dpotrf")
    inv, info = lapack.dpotri(chol, lower=1)
    if info != 0:
        raise ValueError(f"dpotri failed with info={info}")
    low = np.tril(inv)
    return low + np.tril(inv, -1).T


def alpha1_cov(d: np.ndarray, sigma_r: float) -> np.ndarray:
    """Covariance of the per-reply drift ratios.

    d holds the N-1 gaps (delay_{n+1} - delay_1). With u = 1/d the matrix is
    sigma_r^2 * (u u' + diag(u^2)): the shared first timestamp correlates all
    ratios, the diagonal doubles from the second timestamp in each ratio.
    """
    d = np.asarray(d, dtype=float)
    if d.ndim != 1 or d.size < 1:
        raise ValueError(f"need at least one gap, got shape {d.shape}")
    if np.any(d <= 0.0) or np.unique(d).size != d.size:
        raise ValueError("gaps must be positive and distinct")
    if not (math.isfinite(sigma_r) and sigma_r > 0.0):
        raise ValueError(f"sigma_r must be > 0, got {sigma_r!r}")
    u = 1.0 / d
    m = np.outer(u, u)
    m[np.diag_indices(d.size)] += u * u
    return (sigma_r * sigma_r) * m
