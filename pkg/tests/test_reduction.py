import numpy as np
import pytest

from disclab import (DomainError, ModelParams, ParameterError, RadialProblem,
                     assemble_radial, eigenvalues_sturm, potential_asymptotics,
                     potential_closed, potential_derivative_form,
                     riem_dist_to_boundary, transport_eigenfunction, warp,
                     warp_d1, warp_d2, warp_d3, warp_inverse)
from disclab.eigensolver import radial_mesh
from disclab.moments import gauss_elements
from disclab.reduction import potential_centrifugal_gap, stretch


class TestWarp:
    def test_identity_at_zero_gamma(self):
        prob = RadialProblem(0.0, 0)
        t = np.array([0.1, 0.5, 0.9])
        assert np.allclose(warp(t, prob), t)
        assert np.allclose(warp_d1(t, prob), 1.0)
        assert np.allclose(warp_d2(t, prob), 0.0)

    def test_endpoints(self):
        prob = RadialProblem(0.25, 0)
        assert warp(1e-14, prob) == pytest.approx(0.0, abs=1e-13)
        assert warp(prob.t_max - 1e-14, prob) == pytest.approx(1.0, abs=1e-12)

    def test_strictly_increasing(self):
        prob = RadialProblem(0.4, 0)
        t = np.linspace(1e-6, prob.t_max - 1e-6, 500)
        assert np.all(np.diff(warp(t, prob)) > 0)

    @pytest.mark.parametrize("gamma", [0.1, 0.25, 0.4])
    def test_derivatives_match_finite_differences(self, gamma):
        prob = RadialProblem(gamma, 0)
        h = 1e-5
        for t in np.array([0.2, 0.6, 1.0]) * prob.t_max * 0.9:
            fd1 = (warp(t + h, prob) - warp(t - h, prob)) / (2 * h)
            fd2 = (warp(t + h, prob) - 2 * warp(t, prob) + warp(t - h, prob)) / h**2
            fd3 = (warp_d2(t + h, prob) - warp_d2(t - h, prob)) / (2 * h)
            assert abs(fd1 - warp_d1(t, prob)) < 1e-6
            assert abs(fd2 - warp_d2(t, prob)) < 1e-4
            assert abs(fd3 - warp_d3(t, prob)) < 1e-6

    def test_inverse_round_trip(self):
        prob = RadialProblem(0.25, 1)
        t = np.linspace(1e-4, prob.t_max - 1e-4, 50)
        assert np.allclose(warp_inverse(warp(t, prob), prob), t, rtol=1e-10)

    def test_inverse_ties_coordinates_to_metric_distance(self):
        # metric distance from radius r to the boundary equals t_max - warp^{-1}(r)
        prob = RadialProblem(0.3, 0)
        r = np.linspace(0.01, 0.999, 40)
        lhs = riem_dist_to_boundary(1.0 - r, prob.gamma)
        assert np.allclose(lhs, prob.t_max - warp_inverse(r, prob), rtol=1e-10)

    def test_domain_guard(self):
        prob = RadialProblem(0.25, 0)
        with pytest.raises(DomainError):
            warp(-0.1, prob)
        with pytest.raises(DomainError):
            warp(prob.t_max, prob)

    def test_gamma_range_guard(self):
        with pytest.raises(ParameterError):
            RadialProblem(0.5, 0)


class TestPotential:
    def test_zero_gamma_collapse(self):
        assert potential_closed(0.5, RadialProblem(0.0, 0)) == pytest.approx(-1.0)
        assert potential_closed(0.5, RadialProblem(0.0, 1)) == pytest.approx(3.0)
        assert potential_derivative_form(0.3, RadialProblem(0.0, 2)) == pytest.approx(
            (4 - 0.25) / 0.09)

    @pytest.mark.parametrize("gamma", [0.0, 0.1, 0.25, 0.4])
    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_dual_formula_equality(self, gamma, n):
        prob = RadialProblem(gamma, n)
        t = np.linspace(0.01, prob.t_max - 0.01, 400)
        vc = potential_closed(t, prob)
        vd = potential_derivative_form(t, prob)
        assert np.max(np.abs(vc - vd) / np.maximum(1.0, np.abs(vc))) < 1e-9

    def test_boundary_coefficient_value(self):
        prob = RadialProblem(0.25, 0)
        assert prob.boundary_coeff == pytest.approx(0.4375 / 2.25)

    def test_origin_coefficient(self):
        assert RadialProblem(0.1, 2).origin_coeff == pytest.approx(15.0 / 4.0)

    def test_centrifugal_gap_is_bounded_at_origin(self):
        prob = RadialProblem(0.25, 0)
        t = np.array([1e-8, 1e-6, 1e-4, 1e-2])
        gap = potential_centrifugal_gap(t, prob)
        direct = potential_closed(t, prob) - prob.origin_coeff / t**2
        assert np.all(np.isfinite(gap))
        assert np.allclose(gap[-2:], direct[-2:], rtol=1e-6)  # where direct is stable

    def test_endpoint_guard(self):
        prob = RadialProblem(0.25, 0)
        with pytest.raises(DomainError):
            potential_closed(0.0, prob)
        with pytest.raises(DomainError):
            potential_closed(prob.t_max, prob)


class TestAsymptotics:
    def test_coefficients(self):
        res = potential_asymptotics(RadialProblem(0.25, 2))
        assert res.coeff_origin == pytest.approx(15.0 / 4.0)
        assert res.coeff_boundary == pytest.approx(0.194444, rel=1e-5)
        assert res.correction_order_boundary == pytest.approx(2 * 0.25 / 0.75)

    @pytest.mark.parametrize("gamma,n", [(0.1, 0), (0.25, 0), (0.25, 1), (0.4, 2)])
    def test_limits_observed(self, gamma, n):
        prob = RadialProblem(gamma, n)
        res = potential_asymptotics(prob, n_points=14)
        assert res.observed_origin_limit == pytest.approx(prob.origin_coeff, abs=1e-3)
        assert res.observed_boundary_limit == pytest.approx(prob.boundary_coeff, abs=1e-3)
        # ratio-test orders no worse than stated
        assert res.observed_order_origin > 0.9
        assert res.observed_order_boundary > res.correction_order_boundary - 0.1

    def test_boundary_limit_sequence(self):
        # (t_max - t)^2 V converges within the stated correction scale
        prob = RadialProblem(0.25, 0)
        al = prob.t_max
        for k in range(2, 7):
            tau = 10.0**-k
            val = tau**2 * potential_closed(al - tau, prob)
            assert abs(val - prob.boundary_coeff) < 10 ** (-k * 2 * 0.25 / 0.75) * 2


class TestTransport:
    def test_linear_profile_zero_gamma(self):
        prob = RadialProblem(0.0, 0)
        r = np.linspace(0, 1, 2001)
        t = np.linspace(1e-4, 1 - 1e-4, 500)
        h = transport_eigenfunction(r, r, prob, t)  # g(r) = r
        assert np.allclose(h, t**1.5, atol=1e-8)

    def test_norm_isometry_for_eigenfunction(self):
        # ||h||^2 on (0, t_max) equals the weighted radial norm of g
        prob = RadialProblem(0.25, 1)
        pencil = assemble_radial(prob, radial_mesh(2048))
        spec = eigenvalues_sturm(pencil, 1, want_vectors=True)
        r_nodes, g = spec.eigenfunction_values(0)
        t = np.linspace(1e-7, prob.t_max - 1e-7, 120001)
        h = transport_eigenfunction(g, r_nodes, prob, t)
        norm_h = np.trapezoid(h**2, t)
        a, b = r_nodes[:-1], r_nodes[1:]
        cl, cr = g[:-1], g[1:]
        w = lambda r: r * (1 - r) ** (-2 * prob.gamma)
        norm_g = gauss_elements(
            lambda r: (cl * (b - r) / (b - a) + cr * (r - a) / (b - a)) ** 2 * w(r),
            a, b).sum()
        assert abs(norm_h - norm_g) < 1e-6 * norm_g

    def test_transported_eigenfunction_solves_schrodinger(self):
        # residual of -h'' + V h = lam h at interior points, to mesh accuracy
        prob = RadialProblem(0.25, 1)
        pencil = assemble_radial(prob, radial_mesh(4096))
        spec = eigenvalues_sturm(pencil, 1, want_vectors=True)
        lam = spec.eigenvalues[0]
        r_nodes, g = spec.eigenfunction_values(0)
        t = np.linspace(0.15, prob.t_max - 0.15, 4001)
        h = transport_eigenfunction(g, r_nodes, prob, t)
        dt = t[1] - t[0]
        h2 = (h[2:] - 2 * h[1:-1] + h[:-2]) / dt**2
        resid = -h2 + (potential_closed(t[1:-1], prob) - lam) * h[1:-1]
        scale = lam * np.max(np.abs(h))
        assert np.median(np.abs(resid)) / scale < 5e-4

    def test_coverage_guard(self):
        prob = RadialProblem(0.25, 0)
        r = np.linspace(0, 0.5, 100)
        with pytest.raises(DomainError):
            transport_eigenfunction(np.ones_like(r), r, prob,
                                    np.array([prob.t_max * 0.9]))


def test_stretch_behaves_like_t_at_origin():
    prob = RadialProblem(0.3, 0)
    t = np.array([1e-8, 1e-5, 1e-3])
    assert np.allclose(stretch(t, prob), t, rtol=1e-2)
