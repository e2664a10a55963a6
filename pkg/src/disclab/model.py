"""Core parameter set of the singular-metric model and shared fit result type.

The metric is ds^2 = sigma^(-2*gamma) |dx|^2 on a bounded domain with Euclidean
boundary distance sigma; all derived constants below are simple functions of
(N, gamma) and are exposed as properties so every module computes them from one
place.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, ParameterError


@dataclass(frozen=True)
class ModelParams:
    """Dimension N, singularity exponent gamma, angular mode n, spectral shift a.

    Invariants: N integer >= 2, 0 <= N*gamma < 1, a >= 0.  Only |n| enters any
    radial formula; n itself is kept for provenance.
    """

    gamma: float
    N: int = 2
    n: int = 0
    a: float = 0.0

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 2:
            raise ParameterError(f"N must be an integer >= 2, got {self.N!r}")
        if not isinstance(self.n, (int, np.integer)):
            raise ParameterError(f"angular mode n must be an integer, got {self.n!r}")
        if not 0.0 <= self.N * self.gamma < 1.0:
            raise ParameterError(
                f"constraint 0 <= N*gamma < 1 violated: N={self.N}, gamma={self.gamma}"
            )
        if self.a < 0:
            raise ParameterError(f"shift a must be nonnegative, got {self.a}")

    # -- derived constants ---------------------------------------------------

    @property
    def t_max(self) -> float:
        """Length 1/(1-gamma) of the transformed radial interval."""
        return 1.0 / (1.0 - self.gamma)

    @property
    def hardy_c(self) -> float:
        """Strong Hardy constant 2(1-gamma)/(1+(N-2)gamma) of the convex model."""
        return 2.0 * (1.0 - self.gamma) / (1.0 + (self.N - 2) * self.gamma)

    @property
    def mink_dim(self) -> float:
        """Interior Minkowski dimension (N-1)/(1-gamma) of the boundary."""
        return (self.N - 1) / (1.0 - self.gamma)

    @property
    def collar_exponent(self) -> float:
        """Collar-volume exponent N - mink_dim."""
        return self.N - self.mink_dim

    @property
    def rate_exp(self) -> float:
        """Eigenvalue convergence exponent 2/c = (1+(N-2)gamma)/(1-gamma)."""
        return 2.0 / self.hardy_c

    @property
    def decay_exp(self) -> float:
        """Boundary mass-decay exponent 2 + 2/c."""
        return 2.0 + self.rate_exp


@dataclass(frozen=True)
class RateFit:
    """Result of an ordinary least-squares fit of log(y) against log(x)."""

    exponent: float
    intercept: float
    stderr: float
    r2: float
    points_used: int

    def __post_init__(self):
        if self.points_used < 3:
            raise InsufficientDataError(
                f"a rate fit needs at least 3 points, got {self.points_used}"
            )
        if not 0.0 <= self.r2 <= 1.0:
            raise ParameterError(f"r2 out of [0,1]: {self.r2}")


def fit_power_law(x, y) -> RateFit:
    """OLS slope of log y vs log x; x, y must be positive with distinct x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise ParameterError("x and y must have the same length")
    if x.size < 3:
        raise InsufficientDataError(f"need >= 3 points for a power-law fit, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ParameterError("power-law fit requires strictly positive data")
    lx, ly = np.log(x), np.log(y)
    if np.unique(lx).size < x.size:
        raise ParameterError("degenerate grid: repeated x values")
    n = x.size
    mx, my = lx.mean(), ly.mean()
    sxx = np.sum((lx - mx) ** 2)
    slope = np.sum((lx - mx) * (ly - my)) / sxx
    intercept = my - slope * mx
    resid = ly - (intercept + slope * lx)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((ly - my) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    stderr = np.sqrt(ss_res / (n - 2) / sxx) if n > 2 else 0.0
    return RateFit(
        exponent=float(slope),
        intercept=float(intercept),
        stderr=float(stderr),
        r2=float(min(r2, 1.0)),
        points_used=int(n),
    )
