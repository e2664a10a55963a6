"""Assembly and solution of the weighted radial eigenproblem and its
Schroedinger form as symmetric tridiagonal generalized eigenproblems.

Both routes discretize quadratic forms with first-order elements and exact (or
machine-exact Gauss) integration of every weight:

* radial route (primary): stiffness int (g'^2 + n^2 g^2/r^2) r dr against the
  lumped mass int g^2 r (1-r)^(-2 gamma) dr on a mesh of (0, r_cut];
* Schroedinger route (cross-check): the form of -h'' + V h on (t_lo, t_hi),
  discretized in the weighted basis psi_i = t^(|n|+1/2) phi_i.  The weight
  absorbs the exact origin singularity (n^2 - 1/4)/t^2 of V, whose critical
  n = 0 coupling -1/(4 t^2) defeats plain nodal elements (the eigenfunction
  behaves like sqrt(t) and is not even H^1 near 0); what remains of the
  potential is bounded at the origin and is evaluated at element midpoints.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import tridiag
from .errors import MeshError, NumericalError, ParameterError
from .meshes import Mesh
from .moments import NEAR_FACTOR, gauss_elements, power_moment
from .reduction import RadialProblem, log_derivative_match, potential_centrifugal_gap

DIRICHLET = "dirichlet"
NATURAL = "natural"


# ---------------------------------------------------------------------------
# element integral helpers
# ---------------------------------------------------------------------------

def _radial_lumped_mass(a, b, gamma):
    """(m_L, m_R): integrals of each hat against r (1-r)^(-2 gamma) per element.

    Near r = 1 the closed s-moments (s = 1-r) are exact and stable; away from
    it the combination cancels in the vanishing factor r, so Gauss takes over.
    """
    h = b - a
    p = 1.0 - b
    q = 1.0 - a
    near = p < NEAR_FACTOR * h
    i0 = power_moment(p, q, -2.0 * gamma)
    i1 = power_moment(p, q, 1.0 - 2.0 * gamma)
    i2 = power_moment(p, q, 2.0 - 2.0 * gamma)
    m_l = np.where(near, (-i2 + (1.0 + p) * i1 - p * i0) / h, 0.0)
    m_r = np.where(near, (i2 - (1.0 + q) * i1 + q * i0) / h, 0.0)
    if not np.all(near):
        w = lambda r: r * (1.0 - r) ** (-2.0 * gamma)
        g_l = gauss_elements(lambda r: (b - r) / h * w(r), a, b)
        g_r = gauss_elements(lambda r: (r - a) / h * w(r), a, b)
        m_l = np.where(near, m_l, g_l)
        m_r = np.where(near, m_r, g_r)
    return m_l, m_r


def _inv_r_entries(a, b):
    """Element matrices of int phi_i phi_j / r dr, already divided by h^2.

    For the element touching r = 0 only the (R,R) entry is finite; the others
    belong to the removed Dirichlet node and are returned as 0.
    """
    h = b - a
    at_zero = a == 0.0
    near = a < NEAR_FACTOR * h
    safe_a = np.where(at_zero, 1.0, a)
    lg = np.log1p(h / safe_a)
    ll = (b * b * lg - 2.0 * b * h + (b * b - a * a) / 2.0) / h**2
    lr = ((a + b) * h - (b * b - a * a) / 2.0 - a * b * lg) / h**2
    rr = ((b * b - a * a) / 2.0 - 2.0 * a * h + a * a * lg) / h**2
    ll = np.where(at_zero, 0.0, ll)
    lr = np.where(at_zero, 0.5, lr)
    rr = np.where(at_zero, 0.5, rr)
    if not np.all(near):
        a_s = np.where(at_zero, b, a)  # dummy, overwritten by `near` mask anyway
        g_ll = gauss_elements(lambda r: ((b - r) / h) ** 2 / r, a_s, b)
        g_lr = gauss_elements(lambda r: (b - r) * (r - a) / h**2 / r, a_s, b)
        g_rr = gauss_elements(lambda r: ((r - a) / h) ** 2 / r, a_s, b)
        ll = np.where(near, ll, g_ll)
        lr = np.where(near, lr, g_lr)
        rr = np.where(near, rr, g_rr)
    return ll, lr, rr


# ---------------------------------------------------------------------------
# pencil and spectrum types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TridiagonalPencil:
    """Symmetric tridiagonal stiffness against a positive mass (diagonal for the
    spectral routes; consistent tridiagonal where a singular weight requires it)."""

    kd: np.ndarray
    ke: np.ndarray
    md: np.ndarray
    me: np.ndarray | None
    mesh: Mesh
    bc_lo: str
    bc_hi: str
    node0_retained: bool
    basis_power: float = 0.0  # eigenfunctions are t^basis_power * (nodal P1 values)
    meta: dict | None = None

    def __post_init__(self):
        for arr in (self.kd, self.ke, self.md) + ((self.me,) if self.me is not None else ()):
            np.asarray(arr).setflags(write=False)
        if self.ke.size != self.kd.size - 1:
            raise ParameterError("off-diagonal length must be n_dofs - 1")
        if np.any(self.md <= 0):
            raise NumericalError("mass diagonal must be strictly positive")

    @property
    def n_dofs(self) -> int:
        return self.kd.size

    def sturm_count(self, lam: float) -> int:
        return tridiag.sturm_count(self.kd, self.ke, self.md, lam, self.me)

    def mass_matvec(self, x):
        out = self.md * x
        if self.me is not None:
            out[:-1] += self.me * x[1:]
            out[1:] += self.me * x[:-1]
        return out

    def stiffness_matvec(self, x):
        out = self.kd * x
        out[:-1] += self.ke * x[1:]
        out[1:] += self.ke * x[:-1]
        return out

    def m_dot(self, x, y) -> float:
        return float(x @ self.mass_matvec(y))

    def dof_nodes(self) -> np.ndarray:
        """Mesh nodes carrying a degree of freedom, in dof order."""
        start = 0 if self.node0_retained else 1
        stop = self.mesh.nodes.size - (1 if self.bc_hi == DIRICHLET else 0)
        return self.mesh.nodes[start:stop]

    def truncated_at_node(self, node_index: int) -> "TridiagonalPencil":
        """Sub-pencil with a Dirichlet condition moved to mesh node `node_index`.

        Keeping the same assembled arrays means eigenvalue differences across
        truncations carry no independent discretization noise.
        """
        m = self.mesh.nodes.size
        if not 1 <= node_index <= m - 1:
            raise ParameterError(f"node index {node_index} outside (0, {m - 1}]")
        ndof = node_index - (0 if self.node0_retained else 1)
        if ndof < 2:
            raise MeshError("truncation leaves fewer than 2 degrees of freedom")
        sub_mesh = Mesh(self.mesh.nodes[: node_index + 1], self.mesh.grading)
        return TridiagonalPencil(
            kd=self.kd[:ndof], ke=self.ke[: ndof - 1],
            md=self.md[:ndof], me=None if self.me is None else self.me[: ndof - 1],
            mesh=sub_mesh, bc_lo=self.bc_lo, bc_hi=DIRICHLET,
            node0_retained=self.node0_retained, basis_power=self.basis_power,
            meta=self.meta,
        )


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with optional mass-orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    pencil: TridiagonalPencil
    eigenvectors: np.ndarray | None = None  # shape (n_dofs, k)
    residuals: np.ndarray | None = None
    provenance: dict | None = None

    def eigenfunction_values(self, i: int):
        """(nodes, values) of eigenfunction i on the full mesh, boundary zeros included."""
        if self.eigenvectors is None:
            raise ParameterError("spectrum was computed without eigenvectors")
        pen = self.pencil
        nodes = pen.mesh.nodes
        vals = np.zeros(nodes.size)
        start = 0 if pen.node0_retained else 1
        vals[start:start + pen.n_dofs] = self.eigenvectors[:, i]
        if pen.basis_power != 0.0:
            vals = np.where(nodes > 0, nodes, 0.0) ** pen.basis_power * vals
        return nodes, vals


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def assemble_radial(problem: RadialProblem, mesh: Mesh,
                    bc_origin: str = "auto") -> TridiagonalPencil:
    """Pencil of the radial form on (0, r_cut], Dirichlet at r_cut.

    At r = 0 the condition follows from form finiteness: natural for n = 0,
    Dirichlet otherwise; requesting natural with n != 0 is a configuration
    error.
    """
    if mesh.lo != 0.0:
        raise MeshError("the radial mesh must start at r = 0")
    if not 0.0 < mesh.hi <= 1.0:
        raise MeshError(f"r_cut must lie in (0, 1], got {mesh.hi}")
    n = problem.n
    if bc_origin == "auto":
        bc_origin = NATURAL if n == 0 else DIRICHLET
    if bc_origin == NATURAL and n != 0:
        raise ParameterError(
            f"natural condition at r = 0 is only admissible for n = 0, got n = {n}"
        )
    if bc_origin not in (NATURAL, DIRICHLET):
        raise ParameterError(f"unknown boundary condition {bc_origin!r}")

    nodes = mesh.nodes
    a, b = nodes[:-1], nodes[1:]
    h = b - a
    m = nodes.size
    kfac = (a + b) / (2.0 * h)  # exact int r dr / h^2
    kd_full = np.zeros(m)
    ke_full = np.zeros(m - 1)
    kd_full[:-1] += kfac
    kd_full[1:] += kfac
    ke_full -= kfac
    if n != 0:
        ll, lr, rr = _inv_r_entries(a, b)
        kd_full[:-1] += n * n * ll
        kd_full[1:] += n * n * rr
        ke_full += n * n * lr
    m_l, m_r = _radial_lumped_mass(a, b, problem.gamma)
    md_full = np.zeros(m)
    md_full[:-1] += m_l
    md_full[1:] += m_r

    keep = slice(0, m - 1) if bc_origin == NATURAL else slice(1, m - 1)
    kd = kd_full[keep].copy()
    md = md_full[keep].copy()
    ke = ke_full[keep][: kd.size - 1].copy()
    return TridiagonalPencil(
        kd=kd, ke=ke, md=md, me=None, mesh=mesh,
        bc_lo=bc_origin, bc_hi=DIRICHLET,
        node0_retained=(bc_origin == NATURAL),
        meta={"route": "radial", "gamma": problem.gamma, "n": n},
    )


def assemble_schrodinger(problem: RadialProblem, mesh: Mesh) -> TridiagonalPencil:
    """Pencil of the form of -h'' + V(t) h on (t_lo, t_hi), Dirichlet at t_hi.

    Basis: psi_i = t^p phi_i with p = |n| + 1/2, which turns the form into
    int t^(2p) y'^2 + [V - (n^2-1/4)/t^2] t^(2p) y^2 with a bounded residual
    potential at the origin.  For n = 0 the mesh must start at t_lo > 0 (the
    critical coupling sits exactly at the endpoint); the exact boundary flux of
    the regular solution is restored through a matched Robin coefficient.
    For a truncated problem set t_hi = t_max - trunc.
    """
    n = abs(problem.n)
    p = n + 0.5
    t_max = problem.t_max
    if mesh.lo < 0:
        raise MeshError("t_lo must be nonnegative")
    if n == 0 and mesh.lo == 0.0:
        raise ParameterError(
            "n = 0 mesh may not touch the critically singular endpoint t = 0; "
            "use t_lo > 0"
        )
    if not mesh.lo < mesh.hi <= t_max + 1e-12:
        raise MeshError(f"t interval must lie inside (t_lo, {t_max}]")

    nodes = mesh.nodes
    a, b = nodes[:-1], nodes[1:]
    h = b - a
    m = nodes.size
    two_p = 2.0 * p
    stiff = power_moment(a, b, two_p) / h**2
    kd_full = np.zeros(m)
    ke_full = np.zeros(m - 1)
    kd_full[:-1] += stiff
    kd_full[1:] += stiff
    ke_full -= stiff
    i_2p = power_moment(a, b, two_p)
    i_2p1 = power_moment(a, b, two_p + 1.0)
    m_l = (b * i_2p - i_2p1) / h
    m_r = (i_2p1 - a * i_2p) / h
    md_full = np.zeros(m)
    md_full[:-1] += m_l
    md_full[1:] += m_r
    v_mid = potential_centrifugal_gap(0.5 * (a + b), problem)
    kd_full[:-1] += v_mid * m_l
    kd_full[1:] += v_mid * m_r
    if mesh.lo > 0.0:
        # matched flux of the regular solution at the truncated origin
        kappa = log_derivative_match(mesh.lo, problem)
        kd_full[0] += mesh.lo ** (two_p - 1.0) * (kappa * mesh.lo - p)

    kd = kd_full[:-1].copy()
    md = md_full[:-1].copy()
    ke = ke_full[: kd.size - 1].copy()
    return TridiagonalPencil(
        kd=kd, ke=ke, md=md, me=None, mesh=mesh,
        bc_lo=NATURAL, bc_hi=DIRICHLET, node0_retained=True, basis_power=p,
        meta={"route": "schrodinger", "gamma": problem.gamma, "n": problem.n},
    )


def _auto_h_min(length: float, n_elements: int, ratio: float, floor: float) -> float:
    """Deepest grading whose two geometric sections stay under ~2/3 of the budget."""
    h_uni = length / n_elements
    budget = h_uni * ratio ** (n_elements / 3.0)
    return max(floor, budget)


def schrodinger_mesh(problem: RadialProblem, n_elements: int = 4096,
                     t_lo: float | None = None, trunc: float = 0.0,
                     ratio: float = 0.9, h_min: float | None = None) -> Mesh:
    """Default double-graded mesh for the Schroedinger route."""
    if t_lo is None:
        t_lo = 1e-6 if problem.n == 0 else 0.0
    if trunc < 0:
        raise ParameterError("trunc must be nonnegative")
    length = problem.t_max - trunc - t_lo
    if h_min is None:
        h_min = _auto_h_min(length, n_elements, ratio, 1e-8)
    return Mesh.double_graded(t_lo, problem.t_max - trunc, n_elements, ratio, h_min)


def radial_mesh(n_elements: int = 4096, ratio: float = 0.9,
                h_min: float | None = None) -> Mesh:
    if h_min is None:
        h_min = _auto_h_min(1.0, n_elements, ratio, 1e-8)
    return Mesh.double_graded(0.0, 1.0, n_elements, ratio, h_min)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def eigenvalues_sturm(pencil: TridiagonalPencil, k: int, tol: float = 1e-12,
                      want_vectors: bool = False) -> Spectrum:
    """k smallest generalized eigenvalues by Sturm-count bisection; eigenvectors
    on request via shifted inverse iteration, mass-orthonormalized, first
    significant component positive."""
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if k > pencil.n_dofs:
        raise ParameterError(f"k = {k} exceeds matrix dimension {pencil.n_dofs}")
    lam = tridiag.bisect_eigenvalues(pencil.kd, pencil.ke, pencil.md, k,
                                     me=pencil.me, tol=tol)
    vectors = None
    residuals = None
    if want_vectors:
        vectors = np.empty((pencil.n_dofs, k))
        residuals = np.empty(k)
        prev: list[np.ndarray] = []
        for i in range(k):
            close = [prev[j] for j in range(i)
                     if abs(lam[i] - lam[j]) < 1e-6 * max(1.0, abs(lam[i]))]
            v = tridiag.inverse_iteration(
                pencil.kd, pencil.ke, pencil.md, lam[i], me=pencil.me,
                ortho_against=close or None, m_dot=pencil.m_dot,
            )
            # mass-normalize, fix the sign of the first significant component
            v = v / np.sqrt(pencil.m_dot(v, v))
            lead = np.flatnonzero(np.abs(v) > 1e-12 * np.abs(v).max())[0]
            if v[lead] < 0:
                v = -v
            vectors[:, i] = v
            prev.append(v)
            res = pencil.stiffness_matvec(v) - lam[i] * pencil.mass_matvec(v)
            residuals[i] = np.linalg.norm(res) / np.linalg.norm(pencil.mass_matvec(v))
        if residuals.max() > 1e-8:
            raise NumericalError(
                f"eigenvector residual {residuals.max():.2e} exceeds 1e-8"
            )
    return Spectrum(
        eigenvalues=lam, pencil=pencil, eigenvectors=vectors, residuals=residuals,
        provenance={
            "mesh_nodes": pencil.mesh.nodes.size,
            "bisection_tol": tol,
            **(pencil.meta or {}),
        },
    )


def richardson(lambda_h, lambda_h2, order: int = 2):
    """Extrapolate from meshes with halved maximum element size.

    Returns (extrapolated, error_estimate); for order 2 these are
    (4 l2 - l1)/3 and |l2 - l1|/3.
    """
    if order < 1:
        raise ParameterError("extrapolation order must be >= 1")
    lambda_h = np.asarray(lambda_h, dtype=float)
    lambda_h2 = np.asarray(lambda_h2, dtype=float)
    f = 2.0**order
    extrapolated = (f * lambda_h2 - lambda_h) / (f - 1.0)
    error_estimate = np.abs(lambda_h2 - lambda_h) / (f - 1.0)
    return extrapolated, error_estimate


@dataclass(frozen=True)
class RouteResult:
    """Spectrum on a mesh pair with its Richardson extrapolation."""

    route: str
    coarse: Spectrum
    fine: Spectrum
    extrapolated: np.ndarray
    error_estimate: np.ndarray


def route_spectrum(problem: RadialProblem, route: str, k: int,
                   n_elements: int = 4096, tol: float = 1e-12,
                   want_vectors: bool = False) -> RouteResult:
    """Solve one route on a mesh and its bisection refinement, then extrapolate.

    The fine mesh is the exact bisection of the coarse one, so every element
    size halves and the order-2 error model behind Richardson holds.
    """
    if route == "radial":
        coarse_mesh = radial_mesh(n_elements)
        assemble = lambda m: assemble_radial(problem, m)
    elif route == "schrodinger":
        coarse_mesh = schrodinger_mesh(problem, n_elements)
        assemble = lambda m: assemble_schrodinger(problem, m)
    else:
        raise ParameterError(f"unknown route {route!r}")
    pencils = [assemble(coarse_mesh), assemble(coarse_mesh.refine())]
    coarse = eigenvalues_sturm(pencils[0], k, tol)
    fine = eigenvalues_sturm(pencils[1], k, tol, want_vectors=want_vectors)
    extrapolated, err = richardson(coarse.eigenvalues, fine.eigenvalues)
    return RouteResult(route=route, coarse=coarse, fine=fine,
                       extrapolated=extrapolated, error_estimate=err)
