"""Command-line front end.

Subcommands: spectrum, rate, hardy, minkowski, geodesic, decay, potential,
bounds.  Flags override values from an optional JSON config file; there is no
environment-variable configuration.  Exit codes: 0 ok, 2 validation error,
3 numerical failure, 4 insufficient data, 5 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, plots
from .errors import (DomainError, InsufficientDataError, MeshError,
                     NumericalError, ParameterError)
from .eigensolver import (assemble_radial, eigenvalues_sturm, radial_mesh,
                          route_spectrum)
from .geometry import collar_volume, geodesic_field, minkowski_fit
from .hardy import (dimension_bound_check, estimate_model_hardy_constant,
                    estimate_riemannian_hardy_constant, hardy_constant_formula,
                    hardy_range_check)
from .io import fmt, json_text, write_csv, write_json
from .meshes import Mesh
from .model import ModelParams
from .perturbation import (bound_constants, boundary_decay_check,
                           discrete_norm_inequality_check, rate_fit,
                           truncated_sweep)
from .reduction import (RadialProblem, potential_closed,
                        potential_derivative_form)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_NO_DATA = 4
EXIT_IO = 5


class _StrictParser(argparse.ArgumentParser):
    """Subcommand parser with prefix abbreviation disabled (--c vs --config)."""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--gamma", type=float, default=0.25, help="singularity exponent")
    p.add_argument("--dim", type=int, default=2, help="ambient dimension N")
    p.add_argument("--mode", type=int, default=0, help="angular mode n")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path, default=None, help="output file path")
    p.add_argument("--seed", type=int, default=20250810)
    p.add_argument("--no-figure", action="store_true",
                   help="skip the figure rendered alongside the report")
    p.add_argument("--config", type=Path, default=None,
                   help="JSON file of defaults; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disclab",
        description="spectral laboratory for the boundary-singular disc metric",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"disclab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_StrictParser)

    p = sub.add_parser("spectrum", help="Dirichlet eigenvalues of the radial problem")
    _common_flags(p)
    p.add_argument("--k", type=int, default=3, help="number of eigenvalues")
    p.add_argument("--route", choices=("radial", "schrodinger", "both"), default="radial")
    p.add_argument("--mesh-nodes", type=int, default=4096)

    p = sub.add_parser("rate", help="truncation convergence rate fit")
    _common_flags(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--k-index", type=int, default=0, help="eigenvalue index to fit")
    p.add_argument("--eps-min", type=float, default=3e-4)
    p.add_argument("--eps-max", type=float, default=3e-2)
    p.add_argument("--eps-count", type=int, default=12)
    p.add_argument("--mesh-nodes", type=int, default=4096)
    p.add_argument("--no-bounds", action="store_true",
                   help="skip the variational/closed-form bound columns")

    p = sub.add_parser("hardy", help="sharp Hardy constant estimation")
    _common_flags(p)
    p.add_argument("--range-check", action="store_true",
                   help="only run the closed-form range/monotonicity check")

    p = sub.add_parser("minkowski", help="collar-volume dimension fit")
    _common_flags(p)
    p.add_argument("--eps-min", type=float, default=1e-4)
    p.add_argument("--eps-max", type=float, default=1e-2)
    p.add_argument("--eps-count", type=int, default=12)

    p = sub.add_parser("geodesic", help="grid shortest-path distance field")
    _common_flags(p)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--stencil", type=int, choices=(8, 16), default=16)

    p = sub.add_parser("decay", help="boundary decay of eigenfunctions")
    _common_flags(p)
    p.add_argument("--k-index", type=int, default=0)
    p.add_argument("--eps-min", type=float, default=1e-3)
    p.add_argument("--eps-max", type=float, default=3e-2)
    p.add_argument("--eps-count", type=int, default=8)
    p.add_argument("--mesh-nodes", type=int, default=4096)

    p = sub.add_parser("potential", help="Schroedinger potential profile")
    _common_flags(p)
    p.add_argument("--t-count", type=int, default=400)

    p = sub.add_parser("bounds", help="decay/eigenvalue bound constants")
    _common_flags(p)
    p.add_argument("--c", type=float, default=None,
                   help="Hardy constant (default: closed form from gamma/dim)")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--norm-check", action="store_true",
                   help="run the seeded matrix-level norm-inequality check")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--mesh-nodes", type=int, default=1200)
    p.add_argument("--eps", type=float, default=1e-2)
    return parser


def _apply_config(parser, argv):
    """Load --config JSON (if given) as parser defaults, then reparse."""
    probe = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    probe.add_argument("--config", type=Path, default=None)
    known, _ = probe.parse_known_args(argv)
    args = parser.parse_args(argv)
    if known.config is None:
        return args
    overrides = json.loads(Path(known.config).read_text())
    if not isinstance(overrides, dict):
        raise ParameterError("config file must hold a JSON object")
    base = vars(args)
    explicit = _explicit_flags(argv)
    for key, val in overrides.items():
        dest = key.replace("-", "_")
        if dest not in base:
            raise ParameterError(f"unknown config key {key!r}")
        if dest not in explicit:
            if dest == "out":
                val = Path(val)
            base[dest] = val
    return args


def _explicit_flags(argv):
    out = set()
    for tok in argv:
        if tok.startswith("--"):
            out.add(tok[2:].split("=")[0].replace("-", "_"))
    return out


def _emit(args, *, rows=None, header=None, payload=None, provenance=None,
          figure=None, default_stem="report"):
    """Write the report in the requested format, render the figure, or print."""
    prov = provenance or {}
    if args.out is None:
        if payload is not None:
            print(json_text(payload, prov))
        else:
            for line in [",".join(header)] + [",".join(fmt(v) for v in r) for r in rows]:
                print(line)
        return
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        if rows is None:  # json-only commands still honor --format csv for tables
            raise ParameterError("this command emits JSON only; use --format json")
        write_csv(out, header, rows, prov)
    else:
        write_json(out, payload if payload is not None else
                   {"header": list(header), "rows": [list(map(float, r)) for r in rows]},
                   prov)
    if figure is not None and not args.no_figure:
        figure(out.with_suffix(".png"))
    print(f"wrote {out}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    params = ModelParams(gamma=args.gamma, N=args.dim, n=args.mode)
    if params.N != 2:
        raise ParameterError("spectra are computed on the disc; --dim must be 2")
    problem = RadialProblem(params.gamma, params.n)
    routes = ["radial", "schrodinger"] if args.route == "both" else [args.route]
    results = {}
    for route in routes:
        res = route_spectrum(problem, route, args.k, n_elements=args.mesh_nodes)
        results[route] = res.extrapolated
    rows = []
    for route in routes:
        for i, lam in enumerate(results[route]):
            rows.append((route, args.gamma, args.mode, i + 1, lam, args.mesh_nodes))
    header = ["route", "gamma", "n", "k", "eigenvalue", "mesh_nodes"]
    payload = {
        "gamma": args.gamma, "n": args.mode, "k": args.k,
        "eigenvalues": {r: list(map(float, v)) for r, v in results.items()},
    }
    if len(routes) == 2:
        rel = np.abs(results["schrodinger"] / results["radial"] - 1.0)
        payload["max_route_rel_difference"] = float(rel.max())
        header.append("route_rel_difference")
        rows = [r + (rel[r[3] - 1],) for r in rows]
    prov = {"command": "spectrum", "gamma": args.gamma, "n": args.mode,
            "k": args.k, "mesh_nodes": args.mesh_nodes, "route": args.route,
            "extrapolation": "richardson-order-2"}
    _emit(args, rows=rows, header=header, payload=payload, provenance=prov,
          figure=lambda p: plots.spectrum_figure(p, results, args.gamma, args.mode))
    return EXIT_OK


def cmd_rate(args) -> int:
    params = ModelParams(gamma=args.gamma, N=args.dim, n=args.mode)
    if params.N != 2:
        raise ParameterError("rate sweeps run on the disc; --dim must be 2")
    eps = np.geomspace(args.eps_min, args.eps_max, args.eps_count)
    sweep = truncated_sweep(params, args.mode, eps, args.k,
                            n_elements=args.mesh_nodes,
                            with_bounds=not args.no_bounds)
    fit = rate_fit(sweep, args.k_index)
    target = params.rate_exp
    payload = {
        "gamma": args.gamma, "n": args.mode, "k": args.k_index + 1,
        "exponent": fit.exponent, "target": target, "stderr": fit.stderr,
        "r2": fit.r2, "points_used": fit.points_used,
        "passes_pm_0.05": bool(abs(fit.exponent - target) <= 0.05),
        "dropped_eps": list(map(float, sweep.dropped_eps(args.k_index))),
    }
    header = ["gamma", "n", "k", "eps", "lambda_full", "lambda_eps", "gap",
              "variational_bound", "closed_form_bound"]
    rows = []
    for i, e in enumerate(sweep.eps_actual):
        for ki in range(args.k):
            vb = sweep.variational_bounds[i, ki] if sweep.variational_bounds is not None else float("nan")
            cf = sweep.closed_form_bounds[i, ki] if sweep.closed_form_bounds is not None else float("nan")
            rows.append((args.gamma, args.mode, ki + 1, e,
                         sweep.lambda_full[ki], sweep.lambda_eps[i, ki],
                         sweep.gaps[i, ki], vb, cf))
    prov = {"command": "rate", "gamma": args.gamma, "n": args.mode,
            "mesh_nodes": args.mesh_nodes, "eps_min": args.eps_min,
            "eps_max": args.eps_max, "eps_count": args.eps_count,
            "solver_tol": sweep.solver_tol}
    mask = sweep.usable_mask(args.k_index)
    _emit(args, rows=rows, header=header, payload=payload, provenance=prov,
          figure=lambda p: plots.rate_figure(
              p, sweep.eps_actual[mask], sweep.gaps[mask, args.k_index],
              fit, target, args.gamma, args.mode, args.k_index))
    return EXIT_OK


def cmd_hardy(args) -> int:
    params = ModelParams(gamma=args.gamma, N=args.dim)
    if args.range_check:
        grid = np.arange(0.0, 1.0 / args.dim - 1e-9, 0.01)
        report = hardy_range_check(grid, args.dim)
        payload = {"ok": bool(report), "violations": list(report.violations),
                   "entries": [(e.gamma, e.c) for e in report.entries]}
        _emit(args, payload=payload,
              rows=[(e.gamma, e.c) for e in report.entries], header=["gamma", "c"],
              provenance={"command": "hardy-range-check", "dim": args.dim})
        return EXIT_OK
    est = estimate_riemannian_hardy_constant(params)
    target = hardy_constant_formula(params)
    rows = [(m, c, target, target - c)
            for m, c in zip(est.mesh_sizes, est.estimates_by_mesh)]
    payload = {
        "gamma": args.gamma, "dim": args.dim, "target": target,
        "estimates_by_mesh": list(est.estimates_by_mesh),
        "mesh_sizes": list(est.mesh_sizes),
        "extrapolated": est.extrapolated,
        "rel_error_extrapolated": abs(est.extrapolated / target - 1.0),
        "dimension_bound_ok": dimension_bound_check(est.extrapolated, params),
    }
    prov = {"command": "hardy", "gamma": args.gamma, "dim": args.dim}
    _emit(args, rows=rows, header=["mesh_nodes", "c_estimate", "target", "gap"],
          payload=payload, provenance=prov,
          figure=lambda p: plots.hardy_figure(
              p, est.mesh_sizes, est.estimates_by_mesh, est.extrapolated,
              target, args.gamma, args.dim))
    return EXIT_OK


def cmd_minkowski(args) -> int:
    params = ModelParams(gamma=args.gamma, N=args.dim)
    eps = np.geomspace(args.eps_min, args.eps_max, args.eps_count)
    fit = minkowski_fit(eps, params)
    vols = np.array([collar_volume(e, params) for e in eps])
    target = params.collar_exponent
    payload = {
        "gamma": args.gamma, "dim": args.dim,
        "exponent": fit.exponent, "target": target,
        "minkowski_dimension_estimate": args.dim - fit.exponent,
        "minkowski_dimension_target": params.mink_dim,
        "stderr": fit.stderr, "r2": fit.r2, "points_used": fit.points_used,
    }
    prov = {"command": "minkowski", "gamma": args.gamma, "dim": args.dim,
            "eps_min": args.eps_min, "eps_max": args.eps_max}
    _emit(args, rows=list(zip(eps, vols)), header=["eps", "collar_volume"],
          payload=payload, provenance=prov,
          figure=lambda p: plots.minkowski_figure(p, eps, vols, fit, target, args.gamma))
    return EXIT_OK


def cmd_geodesic(args) -> int:
    field = geodesic_field(args.grid, args.gamma, args.stencil)
    stats = field.error_stats()
    payload = {"gamma": args.gamma, "grid": args.grid, "stencil": args.stencil,
               "rel_error_stats": stats}
    prov = {"command": "geodesic", "gamma": args.gamma, "grid": args.grid,
            "stencil": args.stencil, **{f"err_{k}": v for k, v in stats.items()}}
    _emit(args, rows=field.rows(), header=["x", "y", "sigma", "d_exact", "d_graph"],
          payload=payload, provenance=prov,
          figure=lambda p: plots.geodesic_figure(p, field))
    return EXIT_OK


def cmd_decay(args) -> int:
    params = ModelParams(gamma=args.gamma, N=args.dim, n=args.mode)
    if params.N != 2:
        raise ParameterError("decay checks run on the disc; --dim must be 2")
    problem = RadialProblem(params.gamma, params.n)
    pencil = assemble_radial(problem, radial_mesh(args.mesh_nodes))
    spec = eigenvalues_sturm(pencil, args.k_index + 1, want_vectors=True)
    consts = bound_constants(params.hardy_c, params.a)
    eps = np.geomspace(args.eps_min, args.eps_max, args.eps_count)
    report = boundary_decay_check(spec, args.k_index, eps, consts)
    payload = {
        "gamma": args.gamma, "n": args.mode, "k": args.k_index + 1,
        "mass_exponent": report.mass_fit.exponent,
        "mass_exponent_target": report.decay_exp_target,
        "energy_exponent": report.energy_fit.exponent,
        "energy_exponent_target": report.rate_exp_target,
        "mass_bound_ok": report.mass_ok, "energy_bound_ok": report.energy_ok,
    }
    rows = list(zip(report.eps, report.mass_in_collar, report.energy_in_collar,
                    report.mass_bound, report.energy_bound))
    prov = {"command": "decay", "gamma": args.gamma, "n": args.mode,
            "k_index": args.k_index, "mesh_nodes": args.mesh_nodes}
    _emit(args, rows=rows,
          header=["eps", "collar_mass", "collar_energy", "mass_bound", "energy_bound"],
          payload=payload, provenance=prov,
          figure=lambda p: plots.decay_figure(p, report, args.gamma, args.mode))
    return EXIT_OK


def cmd_potential(args) -> int:
    problem = RadialProblem(args.gamma, args.mode)
    # margins keep the absolute closed-vs-derivative gap at roundoff level
    t = np.linspace(0.01, problem.t_max - 0.01, args.t_count)
    vc = potential_closed(t, problem)
    vd = potential_derivative_form(t, problem)
    diff = np.abs(vc - vd)
    payload = {"gamma": args.gamma, "n": args.mode,
               "max_abs_difference": float(diff.max()),
               "t_count": args.t_count}
    prov = {"command": "potential", "gamma": args.gamma, "n": args.mode}
    _emit(args, rows=list(zip(t, vc, vd, diff)),
          header=["t", "V_closed", "V_derivative_form", "abs_diff"],
          payload=payload, provenance=prov,
          figure=lambda p: plots.potential_figure(p, t, vc, vd, args.gamma, args.mode))
    return EXIT_OK


def cmd_bounds(args) -> int:
    params = ModelParams(gamma=args.gamma, N=args.dim, n=args.mode, a=args.a)
    c = args.c if args.c is not None else params.hardy_c
    consts = bound_constants(c, args.a)
    payload = {
        "c": consts.c, "a": consts.a, "c1": consts.c1, "c_prime": consts.c_prime,
        "rate_exp": consts.rate_exp, "decay_exp": consts.decay_exp,
    }
    prov = {"command": "bounds", "c": c, "a": args.a, "seed": args.seed}
    if args.norm_check:
        problem = RadialProblem(params.gamma, params.n)
        mesh = Mesh.double_graded(0.0, 1.0, args.mesh_nodes, ratio=0.9, h_min=1e-4)
        pencil = assemble_radial(problem, mesh)
        report = discrete_norm_inequality_check(
            pencil, consts, sample_count=args.samples, eps=args.eps, seed=args.seed)
        payload["norm_check"] = {
            "premise_hardy_ok": report.premise_hardy_ok,
            "a_used": report.a_used,
            "premise1_norm": report.premise1_norm,
            "premise1_bound": report.premise1_bound,
            "premise2_norm": report.premise2_norm,
            "premise2_bound": report.premise2_bound,
            "samples": report.sample_count,
            "violations": report.violations,
            "min_margin": report.min_margin,
            "seed": report.seed,
        }
        if not report:
            raise NumericalError("discrete norm-inequality check failed")
    rows = [(consts.c, consts.a, consts.c1, consts.c_prime,
             consts.rate_exp, consts.decay_exp)]
    c_grid = np.linspace(1.0, 2.0, 51)
    cs = [bound_constants(x) for x in c_grid]
    _emit(args, rows=rows,
          header=["c", "a", "c1", "c_prime", "rate_exp", "decay_exp"],
          payload=payload, provenance=prov,
          figure=lambda p: plots.bounds_figure(
              p, c_grid, [x.c1 for x in cs], [x.c_prime for x in cs]))
    return EXIT_OK


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "rate": cmd_rate,
    "hardy": cmd_hardy,
    "minkowski": cmd_minkowski,
    "geodesic": cmd_geodesic,
    "decay": cmd_decay,
    "potential": cmd_potential,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return _COMMANDS[args.command](args)
    except (ParameterError, DomainError, MeshError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InsufficientDataError as exc:
        print(f"insufficient data: {exc}", file=sys.stderr)
        return EXIT_NO_DATA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
