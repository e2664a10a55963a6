"""Exact and near-exact element integrals of power weights.

Two complementary evaluation branches per element [a, b]:

* closed-form antiderivatives of s^e, written as p^(e+1)*expm1((e+1)*log1p(h/p))
  so that nearby endpoints never cancel; valid arbitrarily close to the
  singular point s = 0;
* fixed 12-point Gauss-Legendre, exact to machine precision once the weight is
  analytic on the element (relative element size h/a small), which is where the
  closed-form combinations for products like (1-s)*s^e lose digits instead.

Assemblers pick the branch per element with NEAR_FACTOR.
"""
from __future__ import annotations

import numpy as np

# elements with a < NEAR_FACTOR*h count as adjacent to the singularity at 0
NEAR_FACTOR = 20.0

_GX, _GW = np.polynomial.legendre.leggauss(12)


def gauss_elements(f, a, b):
    """12-point Gauss of callable f over each element [a_i, b_i] (vectorized)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    total = 0.0
    for x, w in zip(_GX, _GW):
        total = total + w * f(mid + half * x)
    return total * half


def power_moment(p, q, e: float):
    """integral of s^e over [p, q], elementwise; p may contain zeros (needs e > -1 there).

    Stable for q/p near 1 via expm1/log1p.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    zero = p == 0.0
    ps = np.where(zero, q, p)  # masked lanes are overwritten below
    if e == -1.0:
        out = np.log1p((q - ps) / ps)
        if np.any(zero):
            out = np.where(zero, np.inf, out)
        return out
    k = e + 1.0
    out = ps**k * np.expm1(k * np.log1p((q - ps) / ps)) / k
    if np.any(zero):
        out = np.where(zero, q**k / k if k > 0 else np.inf, out)
    return out
