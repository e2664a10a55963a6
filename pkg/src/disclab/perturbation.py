"""Domain-truncation spectra, convergence-rate fitting, the cutoff variational
bound, boundary-decay estimates, and the discrete operator-norm inequality.

Truncation is always imposed by moving the Dirichlet node on one fixed fine
mesh: the pair (lambda_n, lambda_{n,eps}) then lives on a single
discretization, eigenvalue interlacing makes every gap nonnegative exactly,
and gaps of order 1e-5 remain meaningful.  The achieved truncation distances
(after snapping to mesh nodes) are recorded and used by all fits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .errors import (InsufficientDataError, MeshError, NumericalError,
                     ParameterError)
from .eigensolver import (Spectrum, TridiagonalPencil, assemble_radial,
                          eigenvalues_sturm, radial_mesh)
from .geometry import riem_dist_to_boundary, sigma_from_riem_dist
from .meshes import Mesh
from .model import ModelParams, RateFit, fit_power_law
from .moments import gauss_elements
from .reduction import RadialProblem


@dataclass(frozen=True)
class HardyBoundConstants:
    """All constants of the decay and eigenvalue bounds derived from (c, a)."""

    c: float
    a: float

    def __post_init__(self):
        if self.c < 1.0:
            raise ParameterError(
                f"the bounds require c >= 1 (the fractional-power step fails below), got {self.c}"
            )
        if self.a < 0.0:
            raise ParameterError(f"a must be nonnegative, got {self.a}")

    @property
    def rate_exp(self) -> float:
        return 2.0 / self.c

    @property
    def decay_exp(self) -> float:
        return 2.0 + 2.0 / self.c

    @property
    def c1(self) -> float:
        """Gradient-decay constant c^(2/c) + c^(2/c) (1+c)^(2+2/c)."""
        return self.c ** (2.0 / self.c) * (1.0 + (1.0 + self.c) ** (2.0 + 2.0 / self.c))

    @property
    def c_prime(self) -> float:
        """Eigenvalue-bound constant 2 (c1 + c^(2+2/c))."""
        return 2.0 * (self.c1 + self.c ** (2.0 + 2.0 / self.c))


def bound_constants(c: float, a: float = 0.0) -> HardyBoundConstants:
    return HardyBoundConstants(c=float(c), a=float(a))


def cutoff_mu(d, eps: float):
    """Piecewise-linear cutoff: 0 on d <= eps, (d-eps)/eps on eps < d <= 2 eps, else 1."""
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ParameterError("d must be nonnegative")
    out = np.clip((d - eps) / eps, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def closed_form_eigenvalue_bound(lam: float, eps: float,
                                 constants: HardyBoundConstants) -> float:
    """(lam + c' eps^(2/c) (lam+a)^(1+1/c)) / (1 - c^(1+1/c) eps^(1+1/c) (lam+a)^((1+1/c)/2)).

    Returns nan when the denominator is nonpositive (eps not small enough)."""
    c, a = constants.c, constants.a
    one = 1.0 + 1.0 / c
    denom = 1.0 - c**one * eps**one * (lam + a) ** (one / 2.0)
    if denom <= 0.0:
        return float("nan")
    return (lam + constants.c_prime * eps ** (2.0 / c) * (lam + a) ** one) / denom


# ---------------------------------------------------------------------------
# truncation sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepTable:
    """Eigenvalues of the full and eps-truncated problems on one mesh family."""

    params: ModelParams
    n: int
    k: int
    eps_nominal: np.ndarray
    eps_actual: np.ndarray            # after snapping the Dirichlet node
    lambda_full: np.ndarray           # (k,)
    lambda_eps: np.ndarray            # (m, k)
    gaps: np.ndarray                  # (m, k)
    solver_tol: float
    mesh_nodes: int
    variational_bounds: np.ndarray | None = None   # (m, k)
    closed_form_bounds: np.ndarray | None = None   # (m, k)

    def __post_init__(self):
        if np.any(self.gaps < -10.0 * self.solver_tol):
            raise NumericalError(
                f"negative truncation gap {self.gaps.min():.3e}: variational "
                "monotonicity violated beyond solver tolerance"
            )

    def usable_mask(self, eigenvalue_index: int) -> np.ndarray:
        """Points whose gap clears 100x the eigenvalue solver tolerance."""
        return self.gaps[:, eigenvalue_index] > 100.0 * self.solver_tol

    def dropped_eps(self, eigenvalue_index: int) -> np.ndarray:
        return self.eps_actual[~self.usable_mask(eigenvalue_index)]


def _snap_to_nodes(mesh: Mesh, gamma: float, eps_list, min_interior: int = 8):
    """Map each requested truncation distance to the nearest mesh node.

    Refuses (MeshError) when the mesh cannot express the requested eps within
    10% relative error; never silently extrapolates.
    """
    nodes = mesh.nodes
    d_nodes = riem_dist_to_boundary(1.0 - nodes[1:-1], gamma)  # interior nodes
    out_idx = []
    out_eps = []
    for eps in np.asarray(eps_list, dtype=float):
        if eps <= 0:
            raise ParameterError(f"eps must be positive, got {eps}")
        j = int(np.argmin(np.abs(np.log(d_nodes / eps)))) + 1
        eps_act = float(riem_dist_to_boundary(1.0 - nodes[j], gamma))
        if abs(eps_act / eps - 1.0) > 0.10:
            raise MeshError(
                f"mesh cannot resolve truncation eps={eps:g} "
                f"(nearest node gives {eps_act:g}); refine toward the boundary"
            )
        if j < min_interior:
            raise MeshError(f"eps={eps:g} leaves fewer than {min_interior} interior nodes")
        out_idx.append(j)
        out_eps.append(eps_act)
    return np.array(out_idx), np.array(out_eps)


def truncated_sweep(params: ModelParams, n: int, eps_list, k: int,
                    n_elements: int = 4096, mesh: Mesh | None = None,
                    solver_tol: float = 1e-12, with_bounds: bool = False) -> SweepTable:
    """Spectra with Dirichlet imposed at metric distance eps from the boundary.

    The radius of truncation satisfies 1 - r_eps = ((1-gamma) eps)^(1/(1-gamma)).
    """
    problem = RadialProblem(params.gamma, n)
    if mesh is None:
        mesh = radial_mesh(n_elements)
    eps_arr = np.asarray(eps_list, dtype=float)
    if eps_arr.size < 1:
        raise ParameterError("empty eps list")
    pencil = assemble_radial(problem, mesh)
    idx, eps_actual = _snap_to_nodes(mesh, params.gamma, eps_arr)
    full = eigenvalues_sturm(pencil, k, tol=solver_tol, want_vectors=with_bounds)
    lam_eps = np.empty((eps_arr.size, k))
    for row, j in enumerate(idx):
        sub = pencil.truncated_at_node(int(j))
        lam_eps[row] = eigenvalues_sturm(sub, k, tol=solver_tol).eigenvalues
    gaps = lam_eps - full.eigenvalues[None, :]
    var_bounds = None
    cf_bounds = None
    if with_bounds:
        consts = bound_constants(params.hardy_c, params.a)
        var_bounds = np.empty_like(lam_eps)
        cf_bounds = np.empty_like(lam_eps)
        for row in range(eps_arr.size):
            vb = variational_bound(full, float(eps_actual[row]), k)
            var_bounds[row] = vb.bounds
            cf_bounds[row] = [
                closed_form_eigenvalue_bound(float(lam), float(eps_actual[row]), consts)
                for lam in full.eigenvalues
            ]
    return SweepTable(
        params=params, n=n, k=k,
        eps_nominal=eps_arr, eps_actual=eps_actual,
        lambda_full=full.eigenvalues, lambda_eps=lam_eps, gaps=gaps,
        solver_tol=solver_tol, mesh_nodes=mesh.nodes.size,
        variational_bounds=var_bounds, closed_form_bounds=cf_bounds,
    )


def rate_fit(sweep: SweepTable, eigenvalue_index: int) -> RateFit:
    """Least-squares slope of log(gap) against log(eps) over the usable points."""
    if not 0 <= eigenvalue_index < sweep.k:
        raise ParameterError(f"eigenvalue index {eigenvalue_index} outside [0, {sweep.k})")
    mask = sweep.usable_mask(eigenvalue_index)
    if mask.sum() < 3:
        raise InsufficientDataError(
            f"only {int(mask.sum())} sweep points have gaps above the noise floor"
        )
    return fit_power_law(sweep.eps_actual[mask], sweep.gaps[mask, eigenvalue_index])


# ---------------------------------------------------------------------------
# variational bound through the cutoff
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VariationalBoundResult:
    eps: float
    bounds: np.ndarray            # bounds[j-1] bounds lambda_{j,eps}
    quotient_matrix: np.ndarray   # A_ij = Q(mu phi_i, mu phi_j)
    overlap_matrix: np.ndarray    # B_ij = <mu phi_i, mu phi_j>


def _mu_profile(gamma: float, eps: float):
    """mu and d/dr mu as functions of r, plus the two kink radii."""
    r_flat = 1.0 - sigma_from_riem_dist(2.0 * eps, gamma)   # mu = 1 below
    r_zero = 1.0 - sigma_from_riem_dist(eps, gamma)         # mu = 0 beyond

    def mu(r):
        d = riem_dist_to_boundary(1.0 - r, gamma)
        return np.clip((d - eps) / eps, 0.0, 1.0)

    def dmu(r):
        d = riem_dist_to_boundary(1.0 - r, gamma)
        on_ramp = (d > eps) & (d < 2.0 * eps)
        return np.where(on_ramp, -((1.0 - r) ** (-gamma)) / eps, 0.0)

    return mu, dmu, r_flat, r_zero


def variational_bound(spectrum: Spectrum, eps: float, n_dim: int) -> VariationalBoundResult:
    """sup over the lowest n_dim eigenfunctions of Q(mu f)/||mu f||^2.

    Assembles A_ij = Q(mu phi_i, mu phi_j) and B_ij = <mu phi_i, mu phi_j> by
    per-element Gauss quadrature, splitting elements at the cutoff kinks; the
    largest eigenvalue of each leading subpencil bounds the corresponding
    truncated eigenvalue from above.
    """
    if spectrum.eigenvectors is None:
        raise ParameterError("variational_bound needs eigenvectors in the spectrum")
    pen = spectrum.pencil
    if (pen.meta or {}).get("route") != "radial":
        raise ParameterError("variational_bound expects a radial-route spectrum")
    if n_dim < 1 or n_dim > spectrum.eigenvectors.shape[1]:
        raise ParameterError(f"n_dim must lie in [1, {spectrum.eigenvectors.shape[1]}]")
    gamma = pen.meta["gamma"]
    n_mode = abs(pen.meta["n"])
    nodes = pen.mesh.nodes
    mu, dmu, r_flat, r_zero = _mu_profile(gamma, eps)
    if r_zero >= nodes[-2]:
        raise MeshError(f"mesh does not resolve the eps={eps:g} collar")

    coeffs = np.zeros((nodes.size, n_dim))
    start = 0 if pen.node0_retained else 1
    coeffs[start:start + pen.n_dofs] = spectrum.eigenvectors[:, :n_dim]

    # split elements at the kinks; drop pieces where mu vanishes identically
    cuts = np.unique(np.concatenate([nodes, [r_flat, r_zero]]))
    cuts = cuts[(cuts >= nodes[0]) & (cuts <= nodes[-1])]
    pa, pb = cuts[:-1], cuts[1:]
    keep = pa < r_zero
    pa, pb = pa[keep], pb[keep]
    elem = np.clip(np.searchsorted(nodes, 0.5 * (pa + pb)) - 1, 0, nodes.size - 2)
    ea, eb = nodes[elem], nodes[elem + 1]
    eh = eb - ea
    c_l = coeffs[elem]      # (pieces, n_dim)
    c_r = coeffs[elem + 1]
    dphi = (c_r - c_l) / eh[:, None]

    gx, gw = np.polynomial.legendre.leggauss(8)
    a_mat = np.zeros((n_dim, n_dim))
    b_mat = np.zeros((n_dim, n_dim))
    half = 0.5 * (pb - pa)
    mid = 0.5 * (pa + pb)
    for x, w in zip(gx, gw):
        r = mid + half * x
        wq = w * half                                   # quadrature weights
        phi = c_l * ((eb - r) / eh)[:, None] + c_r * ((r - ea) / eh)[:, None]
        m_val = mu(r)[:, None]
        dm_val = dmu(r)[:, None]
        grad = dm_val * phi + m_val * dphi              # (mu phi)'
        a_acc = np.einsum("pi,pj,p->ij", grad, grad, wq * r)
        if n_mode:
            a_acc += n_mode**2 * np.einsum(
                "pi,pj,p->ij", m_val * phi, m_val * phi, wq / r)
        b_acc = np.einsum("pi,pj,p->ij", m_val * phi, m_val * phi,
                          wq * r * (1.0 - r) ** (-2.0 * gamma))
        a_mat += a_acc
        b_mat += b_acc

    bounds = np.empty(n_dim)
    for j in range(1, n_dim + 1):
        vals = eigh(a_mat[:j, :j], b_mat[:j, :j], eigvals_only=True)
        bounds[j - 1] = vals[-1]
    return VariationalBoundResult(eps=eps, bounds=bounds,
                                  quotient_matrix=a_mat, overlap_matrix=b_mat)


# ---------------------------------------------------------------------------
# boundary decay of eigenfunctions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayReport:
    eps: np.ndarray
    mass_in_collar: np.ndarray      # I(eps) = int_{d < eps} |phi|^2 dvol
    energy_in_collar: np.ndarray    # G(eps) = int_{d < eps} |grad phi|^2 dvol
    mass_bound: np.ndarray
    energy_bound: np.ndarray
    mass_ok: bool
    energy_ok: bool
    mass_fit: RateFit | None       # None when fewer than 3 collar widths given
    energy_fit: RateFit | None
    decay_exp_target: float
    rate_exp_target: float


def _element_mass_integrals(nodes, gamma, coeffs):
    """Per-element int phi^2 r (1-r)^(-2 gamma) dr for P1 coefficients."""
    a, b = nodes[:-1], nodes[1:]
    c_l, c_r = coeffs[:-1], coeffs[1:]
    h = b - a

    def f(r):
        phi = c_l * (b - r) / h + c_r * (r - a) / h
        return phi**2 * r * (1.0 - r) ** (-2.0 * gamma)

    return gauss_elements(f, a, b)


def _element_energy_integrals(nodes, n_mode, coeffs):
    """Per-element int (phi'^2 + n^2 phi^2 / r^2) r dr for P1 coefficients."""
    a, b = nodes[:-1], nodes[1:]
    c_l, c_r = coeffs[:-1], coeffs[1:]
    h = b - a
    dphi = (c_r - c_l) / h
    out = dphi**2 * (b**2 - a**2) / 2.0
    if n_mode:
        def f(r):
            phi = c_l * (b - r) / h + c_r * (r - a) / h
            return phi**2 / r
        out = out + n_mode**2 * gauss_elements(f, a, b)
    return out


def boundary_decay_check(spectrum: Spectrum, index: int, eps_grid,
                         constants: HardyBoundConstants) -> DecayReport:
    """Collar integrals of one eigenfunction against the decay bounds.

    Checks I(eps) <= c^(2+2/c) eps^(2+2/c) (lam+a)^(1+1/c) ||f||^2 and the
    gradient analogue with the c1 constant, then fits both decay exponents.
    """
    pen = spectrum.pencil
    if (pen.meta or {}).get("route") != "radial":
        raise ParameterError("decay check expects a radial-route spectrum")
    lam = float(spectrum.eigenvalues[index])
    gamma = pen.meta["gamma"]
    n_mode = abs(pen.meta["n"])
    nodes = pen.mesh.nodes
    _, vals = spectrum.eigenfunction_values(index)
    # normalize in the consistent (quadrature) norm so I(eps)/||f||^2 is exact
    mass_el = _element_mass_integrals(nodes, gamma, vals)
    vals = vals / np.sqrt(mass_el.sum())
    mass_el = _element_mass_integrals(nodes, gamma, vals)
    energy_el = _element_energy_integrals(nodes, n_mode, vals)

    idx, eps_act = _snap_to_nodes(pen.mesh, gamma, np.asarray(eps_grid, dtype=float))
    mass_tail = np.concatenate([[0.0], np.cumsum(mass_el[::-1])])[::-1]
    energy_tail = np.concatenate([[0.0], np.cumsum(energy_el[::-1])])[::-1]
    i_vals = mass_tail[idx]
    g_vals = energy_tail[idx]

    c, a = constants.c, constants.a
    amp = (lam + a) ** (1.0 + 1.0 / c)
    i_bound = c**constants.decay_exp * eps_act**constants.decay_exp * amp
    g_bound = constants.c1 * eps_act**constants.rate_exp * amp
    can_fit = eps_act.size >= 3
    return DecayReport(
        eps=eps_act, mass_in_collar=i_vals, energy_in_collar=g_vals,
        mass_bound=i_bound, energy_bound=g_bound,
        mass_ok=bool(np.all(i_vals <= i_bound)),
        energy_ok=bool(np.all(g_vals <= g_bound)),
        mass_fit=fit_power_law(eps_act, i_vals) if can_fit else None,
        energy_fit=fit_power_law(eps_act, g_vals) if can_fit else None,
        decay_exp_target=constants.decay_exp,
        rate_exp_target=constants.rate_exp,
    )


# ---------------------------------------------------------------------------
# discrete operator-norm inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormCheckReport:
    eps: float
    a_requested: float
    a_used: float                   # after minimal inflation, if any
    premise_hardy_ok: bool
    premise1_norm: float            # ||w^c (H+a)^(-1/2)||
    premise1_bound: float           # = c
    premise2_norm: float            # ||w^(2-c) (H+a)^(-(2-c)/(2c))||
    premise2_bound: float           # = c^((2-c)/c)
    sample_count: int
    violations: int
    min_margin: float
    seed: int
    n_modes: int

    def __bool__(self):
        return self.premise_hardy_ok and self.violations == 0


def _congruence_tridiagonal(pencil: TridiagonalPencil):
    if pencil.me is not None:
        raise ParameterError("norm check needs a diagonal-mass pencil")
    td = pencil.kd / pencil.md
    te = pencil.ke / np.sqrt(pencil.md[:-1] * pencil.md[1:])
    return td, te


def _cutoff_weight_at_dofs(pencil: TridiagonalPencil, eps: float, c: float):
    gamma = pencil.meta["gamma"]
    r = pencil.dof_nodes()
    d = riem_dist_to_boundary(1.0 - r, gamma)
    return np.maximum(d, eps) ** (-1.0 / c)


def _minimal_shift(td, te, w2c, c: float, a0: float, a_cap: float = 1e4):
    """Smallest a >= a0 with w^(2c) <= c^2 (T + a) at the matrix level."""
    from .tridiag import sturm_count

    def holds(a):
        kd = c * c * (td + a) - w2c
        return sturm_count(kd, c * c * te, np.ones_like(kd), 0.0) == 0

    if holds(a0):
        return a0, True
    lo, hi = a0, max(a0, 1.0)
    while not holds(hi):
        hi *= 4.0
        if hi > a_cap:
            return hi, False
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi, True


def discrete_norm_inequality_check(pencil: TridiagonalPencil,
                                   constants: HardyBoundConstants,
                                   sample_count: int = 200,
                                   eps: float = 1e-2,
                                   seed: int = 20250810,
                                   n_modes: int = 50) -> NormCheckReport:
    """Matrix-level check of the norm chain behind the decay estimates.

    Verifies the discrete Hardy premise w^(2c) <= c^2 (H+a) (inflating a
    minimally if the discretization requires it, reported), the two operator
    norms it implies, and then the full inequality
        |<H f, w^2 f> + a ||w f||^2| <= c^(2/c) ||(H+a)^(1/2+1/c) f|| ||(H+a)^(1/2) f||
    on seeded random f drawn from the span of the lowest n_modes eigenvectors.
    """
    c = constants.c
    td, te = _congruence_tridiagonal(pencil)
    w = _cutoff_weight_at_dofs(pencil, eps, c)
    a_used, ok = _minimal_shift(td, te, w ** (2.0 * c), c, constants.a)
    if not ok:
        return NormCheckReport(
            eps=eps, a_requested=constants.a, a_used=float("nan"),
            premise_hardy_ok=False, premise1_norm=float("nan"), premise1_bound=c,
            premise2_norm=float("nan"), premise2_bound=c ** ((2.0 - c) / c),
            sample_count=0, violations=0, min_margin=float("nan"),
            seed=seed, n_modes=n_modes,
        )

    lam, vecs = eigh_tridiagonal(td, te)
    lam_a = lam + a_used
    if lam_a.min() <= 0:
        raise NumericalError("congruence matrix is not positive after the shift")

    p1 = np.linalg.norm((w**c)[:, None] * vecs * lam_a ** (-0.5), 2)
    ex2 = (2.0 - c) / (2.0 * c)
    p2 = np.linalg.norm((w ** (2.0 - c))[:, None] * vecs * lam_a ** (-ex2), 2)

    n_modes = min(n_modes, lam.size)
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((n_modes, sample_count))
    y = vecs[:, :n_modes] @ coeffs                       # samples in node coords
    ty = td[:, None] * y + a_used * y
    ty[:-1] += te[:, None] * y[1:]
    ty[1:] += te[:, None] * y[:-1]
    lhs = np.abs(np.sum(ty * (w**2)[:, None] * y, axis=0))
    amp = lam_a[:n_modes, None]
    norm_high = np.sqrt(np.sum(amp ** (1.0 + 2.0 / c) * coeffs**2, axis=0))
    norm_half = np.sqrt(np.sum(amp * coeffs**2, axis=0))
    rhs = c ** (2.0 / c) * norm_high * norm_half
    margins = rhs - lhs
    return NormCheckReport(
        eps=eps, a_requested=constants.a, a_used=float(a_used),
        premise_hardy_ok=True,
        premise1_norm=float(p1), premise1_bound=c,
        premise2_norm=float(p2), premise2_bound=c ** ((2.0 - c) / c),
        sample_count=sample_count, violations=int(np.sum(margins < 0)),
        min_margin=float(margins.min()), seed=seed, n_modes=n_modes,
    )


def fractional_power_order_check(pencil: TridiagonalPencil,
                                 constants: HardyBoundConstants,
                                 eps: float = 1e-2,
                                 s_values=(0.25, 0.5, 0.75)) -> dict:
    """Order preservation of fractional powers on the verified Hardy pair.

    With A = w^(2c) (diagonal) and B = c^2 (T+a) satisfying A <= B, checks
    min-eig(B^s - A^s) >= -tol for each s in (0,1); the matrix theorem behind
    the second operator-norm premise.
    """
    c = constants.c
    td, te = _congruence_tridiagonal(pencil)
    w = _cutoff_weight_at_dofs(pencil, eps, c)
    a_used, ok = _minimal_shift(td, te, w ** (2.0 * c), c, constants.a)
    if not ok:
        raise NumericalError("discrete Hardy premise failed; nothing to check")
    lam, vecs = eigh_tridiagonal(td, te)
    lam_b = c * c * (lam + a_used)
    a_diag = w ** (2.0 * c)
    out = {}
    for s in s_values:
        b_pow = (vecs * lam_b**s) @ vecs.T
        b_pow -= np.diag(a_diag**s)
        vals = np.linalg.eigvalsh(b_pow)
        out[s] = float(vals[0])
    return out
