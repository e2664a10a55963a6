"""disclab: desk-scale spectral laboratory for the conformal metric
ds^2 = sigma^(-2 gamma) |dx|^2 on the unit disc.

Distances, collar volumes and Minkowski dimension of the singular metric;
sharp Hardy constants in closed form and by generalized eigenproblems; the
weighted radial eigenproblem and its Schroedinger reformulation; and the
convergence rate of Dirichlet eigenvalues under boundary truncation.
"""

__version__ = "0.1.0"

from .errors import (DomainError, InsufficientDataError, MeshError,
                     NumericalError, ParameterError)
from .model import ModelParams, RateFit, fit_power_law
from .meshes import Mesh
from .geometry import (GeodesicField, collar_volume, geodesic_field,
                       minkowski_fit, riem_dist_to_boundary, sigma_disc,
                       sigma_from_riem_dist)
from .reduction import (PotentialAsymptotics, RadialProblem,
                        potential_asymptotics, potential_closed,
                        potential_derivative_form, transport_eigenfunction,
                        warp, warp_d1, warp_d2, warp_d3, warp_inverse)
from .eigensolver import (RouteResult, Spectrum, TridiagonalPencil,
                          assemble_radial, assemble_schrodinger,
                          eigenvalues_sturm, radial_mesh, richardson,
                          route_spectrum, schrodinger_mesh)
from .hardy import (HardyEstimate, dimension_bound_check,
                    estimate_model_hardy_constant,
                    estimate_riemannian_hardy_constant,
                    hardy_constant_formula, hardy_range_check)
from .perturbation import (DecayReport, HardyBoundConstants, NormCheckReport,
                           SweepTable, VariationalBoundResult,
                           bound_constants, boundary_decay_check,
                           closed_form_eigenvalue_bound, cutoff_mu,
                           discrete_norm_inequality_check, rate_fit,
                           truncated_sweep, variational_bound)

__all__ = [name for name in dir() if not name.startswith("_")]
