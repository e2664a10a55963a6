"""Figure rendering for the CLI report path.

Every command that writes a delimited report can also render a matplotlib
figure next to it.  Rendering is non-interactive (Agg) and metadata-stripped
so repeated runs stay byte-identical.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = {"dpi": 150, "bbox_inches": "tight", "metadata": {"Software": None}}


def _finish(fig, path):
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def spectrum_figure(path, results, gamma, n):
    """Eigenvalue index plot, one marker set per route."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for route, vals in results.items():
        ax.plot(np.arange(1, len(vals) + 1), vals, "o--", ms=5, label=route)
    ax.set_xlabel("index k")
    ax.set_ylabel(r"$\lambda_k$")
    ax.set_title(rf"Dirichlet eigenvalues, $\gamma={gamma}$, mode $n={n}$")
    ax.legend()
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def rate_figure(path, eps, gaps, fit, target, gamma, n, k_index):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.loglog(eps, gaps, "o", label="computed gaps")
    ref = np.exp(fit.intercept) * eps**fit.exponent
    ax.loglog(eps, ref, "-", label=f"fit: slope {fit.exponent:.4f}")
    anchor = gaps[-1] / eps[-1] ** target
    ax.loglog(eps, anchor * eps**target, "--", label=f"target slope {target:.4f}")
    ax.set_xlabel(r"truncation distance $\varepsilon$")
    ax.set_ylabel(r"$\lambda_{n,\varepsilon}-\lambda_n$")
    ax.set_title(rf"$\gamma={gamma}$, $n={n}$, eigenvalue #{k_index + 1}")
    ax.legend()
    ax.grid(alpha=0.3, which="both")
    return _finish(fig, path)


def hardy_figure(path, mesh_sizes, estimates, extrapolated, target, gamma, dim):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.semilogx(mesh_sizes, estimates, "o-", label="discrete supremum")
    ax.axhline(target, color="k", ls="--", lw=1, label=f"closed form {target:.6f}")
    ax.axhline(extrapolated, color="C1", ls=":", lw=1,
               label=f"extrapolated {extrapolated:.6f}")
    ax.set_xlabel("mesh nodes")
    ax.set_ylabel("sharp-constant estimate")
    ax.set_title(rf"Hardy constant, $N={dim}$, $\gamma={gamma}$")
    ax.legend()
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def minkowski_figure(path, eps, vols, fit, target_exp, gamma):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.loglog(eps, vols, "o", label="collar volume")
    ax.loglog(eps, np.exp(fit.intercept) * eps**fit.exponent, "-",
              label=f"fit: slope {fit.exponent:.4f}")
    ax.set_xlabel(r"collar width $\varepsilon$")
    ax.set_ylabel("Riemannian volume")
    ax.set_title(rf"$\gamma={gamma}$: target slope {target_exp:.4f}")
    ax.legend()
    ax.grid(alpha=0.3, which="both")
    return _finish(fig, path)


def geodesic_figure(path, field):
    g = field.grid_size
    err = np.full((g, g), np.nan)
    dx = 2.0 / (g - 1)
    ii = np.rint((field.x + 1.0) / dx).astype(int)
    jj = np.rint((field.y + 1.0) / dx).astype(int)
    err[ii, jj] = field.rel_error * 100.0
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(err.T, origin="lower", extent=(-1, 1, -1, 1), cmap="magma")
    fig.colorbar(im, ax=ax, label="graph vs closed form [%]")
    ax.set_title(rf"$\gamma={field.gamma}$, {field.stencil}-neighbor stencil")
    return _finish(fig, path)


def potential_figure(path, t, v_closed, v_deriv, gamma, n):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.4, 3.4))
    ax1.plot(t, v_closed, "-", lw=1.2)
    ax1.set_xlabel("t")
    ax1.set_ylabel("V(t)")
    ax1.set_yscale("symlog")
    ax1.set_title(rf"$\gamma={gamma}$, $n={n}$")
    ax1.grid(alpha=0.3)
    ax2.semilogy(t, np.abs(v_closed - v_deriv) + 1e-300, "-", lw=1)
    ax2.set_xlabel("t")
    ax2.set_ylabel("|closed - derivative form|")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    return _finish(fig, path)


def decay_figure(path, report, gamma, n):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.loglog(report.eps, report.mass_in_collar, "o-",
              label=f"collar mass (slope {report.mass_fit.exponent:.3f})")
    ax.loglog(report.eps, report.mass_bound, "--", label="mass bound")
    ax.loglog(report.eps, report.energy_in_collar, "s-",
              label=f"collar energy (slope {report.energy_fit.exponent:.3f})")
    ax.loglog(report.eps, report.energy_bound, ":", label="energy bound")
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_title(rf"boundary decay, $\gamma={gamma}$, $n={n}$")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, which="both")
    return _finish(fig, path)


def bounds_figure(path, c_grid, c1_vals, cprime_vals):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.semilogy(c_grid, c1_vals, "-", label=r"$c_1$")
    ax.semilogy(c_grid, cprime_vals, "--", label=r"$c'$")
    ax.set_xlabel("Hardy constant c")
    ax.set_ylabel("bound constants")
    ax.legend()
    ax.grid(alpha=0.3)
    return _finish(fig, path)
