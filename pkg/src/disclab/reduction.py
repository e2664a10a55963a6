"""Change of variables between the radial problem on (0,1) and its
Schroedinger form -h'' + V h on (0, t_max).

The warp r = warp(t) = 1 - (1 - t/t_max)^t_max maps t in (0, t_max) onto
r in (0, 1); transported functions pick up the factor sqrt(a(t)) with
a = warp/warp'.  Everything here is evaluated in expm1/log1p form so that the
quadratic vanishing of 1 - (1-t/t_max)^t_max at t = 0 never cancels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, ParameterError


@dataclass(frozen=True)
class RadialProblem:
    """Disc (N=2) radial reduction parameters: exponent gamma and angular mode n."""

    gamma: float
    n: int = 0

    def __post_init__(self):
        if not 0.0 <= self.gamma < 0.5:
            raise ParameterError(
                f"the disc reduction needs 0 <= gamma < 1/2, got {self.gamma}"
            )
        if not isinstance(self.n, (int, np.integer)):
            raise ParameterError(f"angular mode must be an integer, got {self.n!r}")

    @property
    def t_max(self) -> float:
        return 1.0 / (1.0 - self.gamma)

    @property
    def boundary_coeff(self) -> float:
        """Leading potential coefficient (2*gamma - gamma^2)/(4*(1-gamma)^2) at t_max."""
        g = self.gamma
        return (2 * g - g * g) / (4 * (1 - g) ** 2)

    @property
    def origin_coeff(self) -> float:
        """Leading potential coefficient n^2 - 1/4 at the origin."""
        return self.n * self.n - 0.25


def _check_open_interval(t, t_max):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or np.any(t >= t_max):
        raise DomainError(f"t must lie strictly inside (0, {t_max})")
    return t


def warp(t, problem: RadialProblem):
    """r = 1 - (1 - t/t_max)^t_max, strictly increasing, warp(0)=0, warp(t_max)=1."""
    t = _check_open_interval(t, problem.t_max)
    al = problem.t_max
    return -np.expm1(al * np.log1p(-t / al))


def warp_d1(t, problem: RadialProblem):
    t = _check_open_interval(t, problem.t_max)
    al = problem.t_max
    return np.exp((al - 1.0) * np.log1p(-t / al))


def warp_d2(t, problem: RadialProblem):
    t = _check_open_interval(t, problem.t_max)
    al = problem.t_max
    return -problem.gamma * np.exp((al - 2.0) * np.log1p(-t / al))


def warp_d3(t, problem: RadialProblem):
    t = _check_open_interval(t, problem.t_max)
    al, g = problem.t_max, problem.gamma
    return g * (2 * g - 1.0) * np.exp((al - 3.0) * np.log1p(-t / al))


def warp_inverse(r, problem: RadialProblem):
    """t with warp(t) = r; used to tie the two radial coordinates together."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > 1):
        raise DomainError("r must lie in [0, 1]")
    al = problem.t_max
    # t = t_max * (1 - (1-r)^(1/t_max))
    return -al * np.expm1(np.log1p(-r) / al)


def stretch(t, problem: RadialProblem):
    """a(t) = warp(t)/warp'(t); the transported-function factor is sqrt(a)."""
    return warp(t, problem) / warp_d1(t, problem)


def log_derivative_match(t: float, problem: RadialProblem) -> float:
    """d/dt log( t^... ) of the regular transported solution at small t.

    Equals a'/(2a) + |n| * warp'/warp; used as the matched boundary coefficient
    when a mesh is truncated at t = t_lo > 0 instead of reaching the origin.
    """
    t = float(t)
    if not 0 < t < problem.t_max:
        raise DomainError("matching point must lie inside (0, t_max)")
    al, g = problem.t_max, problem.gamma
    u = 1.0 - t / al
    w = -np.expm1(al * np.log1p(-t / al))
    wp = np.exp((al - 1.0) * np.log1p(-t / al))
    a = w / wp
    ap = 1.0 + g * w / u**al
    return ap / (2.0 * a) + abs(problem.n) * wp / w


def potential_closed(t, problem: RadialProblem):
    """V(t) from its closed form: boundary_coeff/(t_max-t)^2 plus the angular term."""
    t = _check_open_interval(t, problem.t_max)
    al = problem.t_max
    lu = np.log1p(-t / al)
    one_minus_ua = -np.expm1(al * lu)
    angular = problem.origin_coeff * np.exp(2 * problem.gamma * al * lu) / one_minus_ua**2
    return problem.boundary_coeff / (al - t) ** 2 + angular


def potential_derivative_form(t, problem: RadialProblem):
    """V(t) rebuilt from warp derivatives: (3/4)(w''/w')^2 - w'''/(2w') + (n^2-1/4)(w'/w)^2."""
    t = _check_open_interval(t, problem.t_max)
    w = warp(t, problem)
    w1 = warp_d1(t, problem)
    w2 = warp_d2(t, problem)
    w3 = warp_d3(t, problem)
    return 0.75 * (w2 / w1) ** 2 - w3 / (2.0 * w1) + problem.origin_coeff * (w1 / w) ** 2


def potential_centrifugal_gap(t, problem: RadialProblem):
    """V(t) - (n^2 - 1/4)/t^2, evaluated without cancellation.

    This is the part of the potential left after removing the exact origin
    singularity; it stays bounded as t -> 0 and is what the form-faithful
    weighted discretization consumes.
    """
    t = _check_open_interval(t, problem.t_max)
    al, g = problem.t_max, problem.gamma
    w = warp(t, problem)
    w1 = warp_d1(t, problem)
    # w'/w - 1/t = (t w' - w)/(t w); series for small t where the two cancel
    small = t < 1e-4
    t_s = np.where(small, t, 1.0)
    series = -(g * t_s**2 / 2.0) * (1.0 - (2.0 / 3.0) * (2 * g - 1.0) * t_s)
    twp_minus_w = np.where(small, series, t * w1 - w)
    diff = twp_minus_w / (t * w)
    total = w1 / w + 1.0 / t
    return problem.boundary_coeff / (al - t) ** 2 + problem.origin_coeff * diff * total


@dataclass(frozen=True)
class PotentialAsymptotics:
    """Leading endpoint coefficients of V with stated correction exponents and
    the numerically observed limits/orders."""

    coeff_origin: float
    coeff_boundary: float
    correction_order_origin: float      # V - coeff_origin/t^2 = O(t^-1): gain of one power
    correction_order_boundary: float    # V - coeff_boundary/(t_max-t)^2 = O((t_max-t)^order)
    observed_origin_limit: float
    observed_boundary_limit: float
    observed_order_origin: float
    observed_order_boundary: float


def potential_asymptotics(problem: RadialProblem,
                          n_points: int = 10, t_ref: float = 0.05) -> PotentialAsymptotics:
    """Verify the endpoint limits t^2 V -> n^2-1/4 and (t_max-t)^2 V -> boundary_coeff.

    Correction orders come from two-point ratio tests on dyadic sequences,
    which are robust for pure power corrections.
    """
    al = problem.t_max
    g = problem.gamma
    ts = t_ref * al * 0.5 ** np.arange(n_points)
    v0 = potential_closed(ts, problem)
    origin_vals = ts**2 * v0
    taus = t_ref * al * 0.5 ** np.arange(n_points)
    vb = potential_closed(al - taus, problem)
    boundary_vals = taus**2 * vb

    d_origin = np.abs(origin_vals - problem.origin_coeff)
    # correction on V at the boundary, per the stated expansion
    d_boundary = np.abs(vb - problem.boundary_coeff / taus**2)

    def observed_order(devs, floor=1e-13):
        ok = devs > floor
        if ok.sum() < 3:
            return np.inf  # correction vanished identically (e.g. gamma = 0 cases)
        r = devs[ok][:-1] / devs[ok][1:]
        return float(np.log2(np.median(r)))

    return PotentialAsymptotics(
        coeff_origin=problem.origin_coeff,
        coeff_boundary=problem.boundary_coeff,
        correction_order_origin=1.0,
        correction_order_boundary=2.0 * g / (1.0 - g),
        observed_origin_limit=float(origin_vals[-1]),
        observed_boundary_limit=float(boundary_vals[-1]),
        observed_order_origin=observed_order(d_origin),
        observed_order_boundary=observed_order(d_boundary * taus**0),
    )


def transport_eigenfunction(g_values, r_nodes, problem: RadialProblem, t_nodes):
    """h(t) = g(warp(t)) * sqrt(a(t)) with cubic interpolation of g on its r-mesh.

    The substitution is an isometry from the weighted radial norm onto the
    plain L2 norm on (0, t_max); callers check that numerically.
    """
    g_values = np.asarray(g_values, dtype=float)
    r_nodes = np.asarray(r_nodes, dtype=float)
    t_nodes = np.asarray(t_nodes, dtype=float)
    if g_values.shape != r_nodes.shape:
        raise ParameterError("g_values and r_nodes must align")
    r_of_t = warp(t_nodes, problem)
    if r_of_t.min() < r_nodes[0] - 1e-14 or r_of_t.max() > r_nodes[-1] + 1e-14:
        raise DomainError("t_nodes map outside the coverage of the r-mesh")
    spline = CubicSpline(r_nodes, g_values)
    return spline(np.clip(r_of_t, r_nodes[0], r_nodes[-1])) * np.sqrt(stretch(t_nodes, problem))
