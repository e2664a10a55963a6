"""Generalized Sturm-sequence bisection for symmetric tridiagonal pencils.

The pencil is K v = lam M v with K symmetric tridiagonal and M either a
positive diagonal or a positive-definite symmetric tridiagonal.  The inertia
count comes from the LDL^T recurrence of K - lam*M; by Sylvester's law the
number of negative pivots equals the number of pencil eigenvalues below lam.
The recurrence divides as (e/d)*e rather than e*e/d so that strongly graded
meshes (entries spanning ~1e60) never overflow.

Eigenvalue accuracy note: this path keeps entrywise-relative stability, which
an explicit congruence M^(-1/2) K M^(-1/2) followed by a dense/LAPACK solve
loses on graded meshes (absolute error there scales with the matrix norm).
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

from .errors import NumericalError, ParameterError

_TINY = 1e-300


def _sturm_count_impl(kd, ke, md, me, lam):
    n = kd.shape[0]
    count = 0
    d = kd[0] - lam * md[0]
    if d == 0.0:
        d = -_TINY
    if d < 0.0:
        count += 1
    for i in range(1, n):
        e = ke[i - 1] - lam * me[i - 1]
        d = (kd[i] - lam * md[i]) - (e / d) * e
        if d == 0.0:
            d = -_TINY
        if d < 0.0:
            count += 1
    return count


try:  # hot path: ~n flops per count, called a few thousand times per solve
    from numba import njit

    _sturm_count_jit = njit(cache=True, fastmath=False)(_sturm_count_impl)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    _sturm_count_jit = _sturm_count_impl
    HAVE_NUMBA = False

_ZEROS_CACHE: dict[int, np.ndarray] = {}


def _me_or_zeros(ke, me):
    if me is not None:
        return np.ascontiguousarray(me, dtype=float)
    z = _ZEROS_CACHE.get(ke.shape[0])
    if z is None:
        z = np.zeros(ke.shape[0])
        _ZEROS_CACHE[ke.shape[0]] = z
    return z


def sturm_count(kd, ke, md, lam: float, me=None) -> int:
    """Number of eigenvalues of (K, M) strictly below lam."""
    kd = np.ascontiguousarray(kd, dtype=float)
    ke = np.ascontiguousarray(ke, dtype=float)
    md = np.ascontiguousarray(md, dtype=float)
    if kd.size == 0:
        return 0
    if ke.size != kd.size - 1:
        raise ParameterError("off-diagonal length must be n-1")
    return int(_sturm_count_jit(kd, ke, md, _me_or_zeros(ke, me), float(lam)))


def spectrum_upper_bound(kd, ke, md, me=None) -> float:
    """Cheap upper bound for all pencil eigenvalues (verified by a Sturm count)."""
    n = kd.size
    off = np.zeros(n)
    off[:-1] += np.abs(ke)
    off[1:] += np.abs(ke)
    if me is None:
        denom = md
    else:
        moff = np.zeros(n)
        moff[:-1] += np.abs(me)
        moff[1:] += np.abs(me)
        denom = md - moff
        if np.any(denom <= 0):  # fall back to count-doubling from 1
            return _grow_bound(kd, ke, md, me, n)
    hi = float(np.max((kd + off) / denom)) * (1 + 1e-12) + 1e-300
    if sturm_count(kd, ke, md, hi, me) < n:
        hi = _grow_bound(kd, ke, md, me, n, start=abs(hi) + 1.0)
    return hi


def _grow_bound(kd, ke, md, me, want, start=1.0):
    hi = start
    for _ in range(4000):
        if sturm_count(kd, ke, md, hi, me) >= want:
            return hi
        hi *= 8.0
    raise NumericalError("could not bracket the spectrum from above")


def bisect_eigenvalues(kd, ke, md, k: int, me=None, lo=None, hi=None,
                       tol: float = 1e-12, maxit: int = 260) -> np.ndarray:
    """k smallest pencil eigenvalues by Sturm-count bisection to width ~tol.

    tol is an absolute interval width; iteration also stops at floating-point
    resolution of the bracket.
    """
    n = kd.size
    if not 1 <= k <= n:
        raise ParameterError(f"k must lie in [1, {n}], got {k}")
    if hi is None:
        hi = 1.0
        while sturm_count(kd, ke, md, hi, me) < k:
            hi *= 8.0
            if hi > 1e306:
                raise NumericalError("bisection failed to bracket from above")
    if lo is None:
        lo = 0.0 if sturm_count(kd, ke, md, 0.0, me) == 0 else -1.0
        while sturm_count(kd, ke, md, lo, me) > 0:
            lo *= 8.0
            if lo < -1e306:
                raise NumericalError("bisection failed to bracket from below")
    if sturm_count(kd, ke, md, hi, me) < k:
        raise NumericalError("upper bracket does not contain k eigenvalues")
    out = np.empty(k)
    for idx in range(k):
        a, b = lo, hi
        for _ in range(maxit):
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            if sturm_count(kd, ke, md, mid, me) > idx:
                b = mid
            else:
                a = mid
            if b - a <= tol:
                break
        out[idx] = 0.5 * (a + b)
        lo = a  # eigenvalues are returned in ascending order
    return out


def inverse_iteration(kd, ke, md, lam: float, me=None, iters: int = 4,
                      seed: int = 7135, ortho_against=None, m_dot=None):
    """One eigenvector of the pencil near lam via shifted inverse iteration.

    ortho_against: optional list of vectors to M-orthogonalize against each
    sweep (for numerically close eigenvalues).  m_dot(x, y) evaluates the
    M-inner product; required when ortho_against is given.
    """
    n = kd.size
    shift = lam * (1.0 + 1e-9) + 1e-300
    ab = np.zeros((3, n))
    if me is None:
        ab[1] = kd - shift * md
        ab[0, 1:] = ke
        ab[2, :-1] = ke
    else:
        ab[1] = kd - shift * md
        ab[0, 1:] = ke - shift * me
        ab[2, :-1] = ke - shift * me
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    for _ in range(iters):
        if me is None:
            rhs = md * x
        else:
            rhs = md * x
            rhs[:-1] += me * x[1:]
            rhs[1:] += me * x[:-1]
        try:
            x = solve_banded((1, 1), ab, rhs)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise NumericalError(f"inverse iteration solve failed at lam={lam}") from exc
        if ortho_against:
            for v in ortho_against:
                x = x - m_dot(v, x) * v
        nrm = np.linalg.norm(x)
        if not np.isfinite(nrm) or nrm == 0:
            raise NumericalError(f"inverse iteration diverged at lam={lam}")
        x /= nrm
    return x
