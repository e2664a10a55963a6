import numpy as np
import pytest

from disclab import (Mesh, ModelParams, ParameterError, dimension_bound_check,
                     estimate_model_hardy_constant,
                     estimate_riemannian_hardy_constant, hardy_constant_formula,
                     hardy_range_check)
from disclab.eigensolver import eigenvalues_sturm
from disclab.hardy import model_hardy_pencil, riemannian_hardy_pencil


class TestClosedForm:
    def test_euclidean_endpoint(self):
        assert hardy_constant_formula(ModelParams(gamma=0.0, N=2)) == 2.0
        assert hardy_constant_formula(ModelParams(gamma=0.0, N=5)) == 2.0

    def test_threshold_limit_is_one(self):
        for N in (2, 3, 5):
            g = 1.0 / N - 1e-12
            assert hardy_constant_formula(ModelParams(gamma=g, N=N)) == pytest.approx(
                1.0, abs=1e-10)

    def test_disc_quarter(self):
        assert hardy_constant_formula(ModelParams(gamma=0.25, N=2)) == 1.5


class TestRangeCheck:
    def test_disc_grid_passes(self):
        report = hardy_range_check(np.arange(0.0, 0.50, 0.01), N=2)
        assert bool(report)
        assert not report.violations

    def test_three_dim_grid_passes_and_decreases(self):
        report = hardy_range_check(np.arange(0.0, 0.333, 0.005), N=3)
        assert report.ok and report.strictly_decreasing

    def test_upper_endpoint_attained(self):
        report = hardy_range_check([0.0], N=2)
        assert report.entries[0].c == 2.0

    def test_grid_outside_range_rejected(self):
        with pytest.raises(ParameterError):
            hardy_range_check([0.0, 0.6], N=2)


FAST_STUDY = [Mesh.log_graded(0.0, 1.0, 256, 1e-15),
              Mesh.log_graded(0.0, 1.0, 1024, 1e-30)]


class TestModelEstimator:
    def test_classical_constant_from_below(self):
        est = estimate_model_hardy_constant(0.0, FAST_STUDY)
        assert est.estimates_by_mesh[-1] < 2.0
        assert est.extrapolated == pytest.approx(2.0, rel=5e-3)
        assert np.all(np.diff(est.estimates_by_mesh) > 0)

    def test_weighted_constant(self):
        # beta = -0.2 (three dimensions, gamma 0.2): limit 2/1.2
        est = estimate_model_hardy_constant(-0.2, FAST_STUDY)
        assert est.estimates_by_mesh[-1] < 2.0 / 1.2
        assert est.extrapolated == pytest.approx(2.0 / 1.2, rel=5e-3)

    def test_nested_bisection_is_monotone(self):
        # guaranteed by space nesting: refining every element can only raise the sup
        mesh = Mesh.log_graded(0.0, 1.0, 128, 1e-12)
        cs = []
        for _ in range(4):
            pen = model_hardy_pencil(0.0, mesh)
            lam = eigenvalues_sturm(pen, 1, tol=1e-13).eigenvalues[0]
            cs.append(1.0 / np.sqrt(lam))
            mesh = mesh.refine()
        assert all(b >= a - 1e-11 for a, b in zip(cs, cs[1:]))
        assert all(c <= 2.0 + 1e-9 for c in cs)

    def test_beta_guards(self):
        mesh = Mesh.log_graded(0.0, 1.0, 64, 1e-10)
        with pytest.raises(ParameterError):
            model_hardy_pencil(1.0, mesh)
        with pytest.raises(ParameterError):
            model_hardy_pencil(-1.2, mesh)


class TestRiemannianEstimator:
    def test_disc_targets(self):
        for gamma in (0.0, 0.25):
            params = ModelParams(gamma=gamma, N=2)
            est = estimate_riemannian_hardy_constant(params, FAST_STUDY)
            target = params.hardy_c
            assert est.estimates_by_mesh[-1] < target + 1e-9
            assert est.extrapolated == pytest.approx(target, rel=5e-3)

    def test_ratio_to_model_is_one_minus_gamma(self):
        gamma = 0.25
        mesh = Mesh.log_graded(0.0, 1.0, 1024, 1e-30)
        riem = estimate_riemannian_hardy_constant(ModelParams(gamma=gamma, N=2), mesh)
        base = estimate_model_hardy_constant(0.0, mesh)
        assert riem.c_est / base.c_est == pytest.approx(1.0 - gamma, rel=5e-3)

    def test_higher_dim_through_model(self):
        params = ModelParams(gamma=0.2, N=3)
        est = estimate_riemannian_hardy_constant(params, FAST_STUDY)
        assert est.extrapolated == pytest.approx(params.hardy_c, rel=5e-3)

    def test_random_discrete_functions_obey_strong_inequality(self):
        # int f^2/d^2 dvol <= c^2 Q(f) for every discrete f (a = 0 on the disc)
        params = ModelParams(gamma=0.25, N=2)
        pen = riemannian_hardy_pencil(params, Mesh.log_graded(0.0, 1.0, 512, 1e-20))
        rng = np.random.default_rng(42)
        c2 = params.hardy_c**2
        for _ in range(40):
            f = rng.standard_normal(pen.n_dofs)
            num = pen.m_dot(f, f)           # int f^2 / d^2 dvol
            den = f @ pen.stiffness_matvec(f)
            assert num <= c2 * den * (1 + 1e-9)


class TestDimensionBound:
    def test_exact_identity(self):
        # c (2 + dim - N) = 2 in closed form for every admissible (N, gamma)
        for N in (2, 3, 4):
            for g in np.linspace(0.0, 1.0 / N - 1e-6, 25):
                p = ModelParams(gamma=float(g), N=N)
                assert p.hardy_c * (2.0 + p.mink_dim - N) == pytest.approx(2.0, abs=1e-12)

    def test_check_accepts_slightly_low_estimate(self):
        p = ModelParams(gamma=0.25, N=2)
        assert dimension_bound_check(p.hardy_c, p)
        assert dimension_bound_check(p.hardy_c - 0.02, p, tol=0.05)
        assert not dimension_bound_check(p.hardy_c - 0.2, p, tol=0.05)
