import numpy as np
import pytest

from disclab import InsufficientDataError, ModelParams, ParameterError, fit_power_law


def test_derived_constants_disc():
    p = ModelParams(gamma=0.25, N=2)
    assert p.t_max == pytest.approx(4.0 / 3.0)
    assert p.hardy_c == pytest.approx(1.5)
    assert p.mink_dim == pytest.approx(4.0 / 3.0)
    assert p.rate_exp == pytest.approx(4.0 / 3.0)
    assert p.decay_exp == pytest.approx(2.0 + 4.0 / 3.0)


def test_derived_constants_higher_dim():
    p = ModelParams(gamma=0.2, N=3)
    assert p.hardy_c == pytest.approx(2 * 0.8 / 1.2)
    assert p.mink_dim == pytest.approx(2 / 0.8)
    assert p.rate_exp == pytest.approx(1.2 / 0.8)


@pytest.mark.parametrize("kwargs", [
    {"gamma": 0.5, "N": 2},      # N*gamma = 1
    {"gamma": 0.4, "N": 3},      # N*gamma > 1
    {"gamma": -0.1},
    {"gamma": 0.1, "N": 1},
    {"gamma": 0.1, "a": -1.0},
])
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ParameterError):
        ModelParams(**kwargs)


def test_gamma_just_below_threshold_ok():
    ModelParams(gamma=0.499999, N=2)
    ModelParams(gamma=0.0, N=2)


def test_fit_power_law_exact():
    x = np.geomspace(1e-4, 1e-1, 8)
    fit = fit_power_law(x, 3.5 * x**1.5)
    assert fit.exponent == pytest.approx(1.5, abs=1e-12)
    assert fit.intercept == pytest.approx(np.log(3.5), abs=1e-10)
    assert fit.r2 == pytest.approx(1.0)
    assert fit.stderr == pytest.approx(0.0, abs=1e-12)
    assert fit.points_used == 8


def test_fit_power_law_guards():
    with pytest.raises(InsufficientDataError):
        fit_power_law([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ParameterError):
        fit_power_law([1.0, 1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(ParameterError):
        fit_power_law([1.0, 2.0, 3.0], [1.0, -2.0, 3.0])
