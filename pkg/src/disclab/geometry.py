"""Exact and numerical geometry of the singular metric on the unit disc and the
N-dimensional radial model: boundary distances, collar volumes, Minkowski
dimension, geodesic cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.integrate import quad
from scipy.sparse.csgraph import dijkstra

from .errors import DomainError, ParameterError
from .model import ModelParams, RateFit, fit_power_law

# 8-stencil: axis + diagonal moves; 16-stencil adds the knight moves, which cuts
# the worst-direction chamfer overestimate from ~8% to ~2.8%
_OFFSETS_8 = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))
_OFFSETS_16 = _OFFSETS_8 + ((2, 1), (2, -1), (-2, 1), (-2, -1),
                            (1, 2), (1, -2), (-1, 2), (-1, -2))


def sigma_disc(x) -> float:
    """Euclidean distance 1 - |x| from a point of the closed unit disc to its boundary."""
    x = np.asarray(x, dtype=float)
    if x.shape != (2,):
        raise ParameterError(f"expected a point in R^2, got shape {x.shape}")
    r = float(np.hypot(x[0], x[1]))
    if r > 1.0:
        raise DomainError(f"point lies outside the closed unit disc: |x| = {r}")
    return 1.0 - r


def riem_dist_to_boundary(sigma, gamma: float):
    """d = sigma^(1-gamma)/(1-gamma); the metric distance to the boundary."""
    if gamma >= 1.0:
        raise ParameterError(f"gamma must be < 1, got {gamma}")
    if gamma < 0.0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma < 0):
        raise DomainError("sigma must be nonnegative")
    out = sigma ** (1.0 - gamma) / (1.0 - gamma)
    return float(out) if out.ndim == 0 else out


def sigma_from_riem_dist(d, gamma: float):
    """Inverse of riem_dist_to_boundary: sigma = ((1-gamma) d)^(1/(1-gamma))."""
    if not 0.0 <= gamma < 1.0:
        raise ParameterError(f"gamma must lie in [0, 1), got {gamma}")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("d must be nonnegative")
    out = ((1.0 - gamma) * d) ** (1.0 / (1.0 - gamma))
    return float(out) if out.ndim == 0 else out


def _sphere_area(N: int) -> float:
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def collar_volume(eps: float, params: ModelParams) -> float:
    """Riemannian volume of the collar {x : dist(x, boundary) < eps} of the unit ball.

    The collar is sigma < s0 with s0 = ((1-gamma) eps)^(1/(1-gamma)).  For the
    disc the antiderivative of (1-r)^(-2 gamma) r is closed-form; other N use
    adaptive quadrature on the radial profile (weight integrable since
    N*gamma < 1).
    """
    if eps <= 0:
        raise DomainError(f"collar width must be positive, got {eps}")
    g = params.gamma
    s0 = sigma_from_riem_dist(eps, g)
    if s0 >= 1.0:
        raise DomainError(
            f"collar threshold sigma = {s0:g} reaches the domain size; eps too large"
        )
    if params.N == 2:
        # 2*pi * int_0^s0 s^(-2g) (1 - s) ds
        return 2.0 * math.pi * (s0 ** (1 - 2 * g) / (1 - 2 * g)
                                - s0 ** (2 - 2 * g) / (2 - 2 * g))
    area = _sphere_area(params.N)
    val, err = quad(lambda s: s ** (-params.N * g) * (1.0 - s) ** (params.N - 1),
                    0.0, s0, epsabs=0.0, epsrel=1e-10, limit=200)
    return area * val


def minkowski_fit(eps_grid, params: ModelParams) -> RateFit:
    """Slope of log collar_volume vs log eps; estimates N - (N-1)/(1-gamma)."""
    eps_grid = np.asarray(eps_grid, dtype=float)
    if eps_grid.size < 4:
        raise ParameterError(f"need >= 4 collar widths, got {eps_grid.size}")
    if np.unique(eps_grid).size != eps_grid.size:
        raise ParameterError("degenerate grid: repeated eps values")
    vols = np.array([collar_volume(e, params) for e in eps_grid])
    return fit_power_law(eps_grid, vols)


@dataclass(frozen=True)
class GeodesicField:
    """Shortest-path distance-to-boundary field on a grid graph over the disc."""

    grid_size: int
    gamma: float
    stencil: int
    x: np.ndarray          # coordinates of interior nodes
    y: np.ndarray
    sigma: np.ndarray
    d_exact: np.ndarray
    d_graph: np.ndarray
    seeded: np.ndarray     # nodes given the closed-form value directly

    @property
    def rel_error(self) -> np.ndarray:
        return self.d_graph / self.d_exact - 1.0

    def error_stats(self) -> dict:
        r = self.rel_error[~self.seeded]
        return {
            "mean": float(np.mean(r)),
            "median": float(np.median(r)),
            "p99": float(np.percentile(r, 99)),
            "max": float(np.max(r)),
            "min": float(np.min(r)),
            "nodes": int(r.size),
        }

    def rows(self):
        """CSV rows x,y,sigma,d_exact,d_graph in deterministic node order."""
        for i in range(self.x.size):
            yield (self.x[i], self.y[i], self.sigma[i], self.d_exact[i], self.d_graph[i])


def geodesic_field(grid_size: int, gamma: float, stencil: int = 16) -> GeodesicField:
    """Multi-source shortest path to the boundary on a grid graph over the disc.

    Edge weight = Euclidean edge length times the trapezoidal average of
    sigma^(-gamma) at its endpoints; nodes within one cell (diagonal) of the
    boundary are seeded with the closed-form distance of their sigma.  Graph
    paths are admissible curves, so the field can only overestimate:
    d_graph >= d_exact up to roundoff.
    """
    if grid_size < 64:
        raise ParameterError(f"grid_size must be >= 64, got {grid_size}")
    if stencil not in (8, 16):
        raise ParameterError(f"stencil must be 8 or 16, got {stencil}")
    if not 0.0 <= gamma < 1.0:
        raise ParameterError(f"gamma must lie in [0, 1), got {gamma}")

    xs = np.linspace(-1.0, 1.0, grid_size)
    dx = xs[1] - xs[0]
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    sigma = 1.0 - np.hypot(X, Y)
    inside = sigma > 0.0
    n_in = int(inside.sum())
    index = -np.ones((grid_size, grid_size), dtype=np.int64)
    index[inside] = np.arange(n_in)
    weight = np.where(inside, sigma, 1.0) ** (-gamma)

    offsets = _OFFSETS_16 if stencil == 16 else _OFFSETS_8
    rows, cols, vals = [], [], []
    for di, dj in offsets:
        elen = math.hypot(di, dj) * dx
        i0, i1 = max(0, -di), grid_size - max(0, di)
        j0, j1 = max(0, -dj), grid_size - max(0, dj)
        src = index[i0:i1, j0:j1].ravel()
        dst = index[i0 + di:i1 + di, j0 + dj:j1 + dj].ravel()
        keep = (src >= 0) & (dst >= 0)
        ws = weight[i0:i1, j0:j1].ravel()[keep]
        wd = weight[i0 + di:i1 + di, j0 + dj:j1 + dj].ravel()[keep]
        rows.append(src[keep])
        cols.append(dst[keep])
        vals.append(elen * 0.5 * (ws + wd))

    sigma_in = sigma[inside]
    d_exact = riem_dist_to_boundary(sigma_in, gamma)
    seeded = sigma_in < math.sqrt(2.0) * dx
    # virtual super-source -> every seed, edge weight = exact distance there
    rows.append(np.full(int(seeded.sum()), n_in, dtype=np.int64))
    cols.append(np.flatnonzero(seeded))
    vals.append(d_exact[seeded])

    graph = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_in + 1, n_in + 1),
    )
    dist = dijkstra(graph, directed=False, indices=n_in)
    d_graph = dist[:n_in]
    if not np.all(np.isfinite(d_graph)):
        raise DomainError("grid graph is disconnected; grid too coarse for the stencil")
    return GeodesicField(
        grid_size=grid_size, gamma=gamma, stencil=stencil,
        x=X[inside], y=Y[inside], sigma=sigma_in,
        d_exact=d_exact, d_graph=d_graph, seeded=seeded,
    )
