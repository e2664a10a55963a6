"""One-dimensional node sets, possibly geometrically graded toward singular endpoints.

All constructors return immutable node arrays; ``refine`` bisects every element,
so refined meshes are nested in the coarse ones (this nesting is what makes
discrete Rayleigh-quotient suprema monotone under refinement).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MeshError

GRADINGS = ("uniform", "geometric-toward-left", "geometric-toward-right",
            "double-graded", "log-graded")


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray
    grading: str = "uniform"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        nodes.setflags(write=False)
        if nodes.ndim != 1 or nodes.size < 3:
            raise MeshError("a mesh needs at least 3 nodes")
        if not np.all(np.diff(nodes) > 0):
            raise MeshError("mesh nodes must be strictly increasing")
        if self.grading not in GRADINGS:
            raise MeshError(f"unknown grading {self.grading!r}")

    @property
    def lo(self) -> float:
        return float(self.nodes[0])

    @property
    def hi(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def h_min(self) -> float:
        return float(self.sizes.min())

    @property
    def h_max(self) -> float:
        return float(self.sizes.max())

    def refine(self) -> "Mesh":
        """Bisect every element (nested refinement; halves every element size)."""
        mids = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        out = np.empty(2 * self.nodes.size - 1)
        out[0::2] = self.nodes
        out[1::2] = mids
        return Mesh(out, self.grading)

    # -- constructors ----------------------------------------------------

    @staticmethod
    def uniform(lo: float, hi: float, n_elements: int) -> "Mesh":
        _check_interval(lo, hi, n_elements)
        return Mesh(np.linspace(lo, hi, n_elements + 1), "uniform")

    @staticmethod
    def geometric(lo: float, hi: float, n_elements: int, ratio: float = 0.85,
                  toward: str = "left") -> "Mesh":
        """Element sizes in geometric progression, smallest next to `toward` end."""
        _check_interval(lo, hi, n_elements)
        _check_ratio(ratio)
        if toward not in ("left", "right"):
            raise MeshError(f"toward must be 'left' or 'right', got {toward!r}")
        # sizes from the graded end outward: h0 * (1/ratio)^k
        g = 1.0 / ratio
        sizes = g ** np.arange(n_elements)
        sizes *= (hi - lo) / sizes.sum()
        if toward == "right":
            sizes = sizes[::-1]
        nodes = lo + np.concatenate([[0.0], np.cumsum(sizes)])
        nodes[-1] = hi
        return Mesh(nodes, f"geometric-toward-{toward}")

    @staticmethod
    def double_graded(lo: float, hi: float, n_elements: int, ratio: float = 0.9,
                      h_min: float = 1e-8) -> "Mesh":
        """Geometric sections of smallest size h_min at both ends, uniform middle."""
        _check_interval(lo, hi, n_elements)
        _check_ratio(ratio)
        length = hi - lo
        h_uni = length / n_elements
        if h_min >= h_uni:
            return Mesh.uniform(lo, hi, n_elements)
        g = 1.0 / ratio
        n_geo = int(np.ceil(np.log(h_uni / h_min) / np.log(g)))
        left = h_min * g ** np.arange(n_geo)
        n_mid = n_elements - 2 * n_geo
        mid_len = length - 2.0 * left.sum()
        if n_mid < 1 or mid_len <= 0:
            raise MeshError(
                f"double grading to h_min={h_min:g} needs more than {n_elements} elements"
            )
        sizes = np.concatenate([left, np.full(n_mid, mid_len / n_mid), left[::-1]])
        nodes = lo + np.concatenate([[0.0], np.cumsum(sizes)])
        nodes[-1] = hi
        return Mesh(nodes, "double-graded")

    @staticmethod
    def log_graded(lo: float, hi: float, n_elements: int, s_min: float) -> "Mesh":
        """First node at lo + s_min, then log-uniform up to hi.

        Covers every scale in [s_min, hi-lo] with constant relative node spacing;
        used for sharp-constant studies where the maximizer concentrates at lo.
        """
        _check_interval(lo, hi, n_elements)
        length = hi - lo
        if not 0 < s_min < length / 4:
            raise MeshError(f"s_min must lie in (0, {length / 4:g}), got {s_min:g}")
        inner = np.geomspace(s_min, length, n_elements)
        nodes = lo + np.concatenate([[0.0], inner])
        nodes[-1] = hi
        return Mesh(nodes, "log-graded")


def _check_interval(lo, hi, n_elements):
    if not hi > lo:
        raise MeshError(f"empty interval ({lo}, {hi})")
    if n_elements < 2:
        raise MeshError("need at least 2 elements")


def _check_ratio(ratio):
    if not 0.5 < ratio < 1.0:
        raise MeshError(f"geometric grading ratio must lie in (0.5, 1), got {ratio}")
