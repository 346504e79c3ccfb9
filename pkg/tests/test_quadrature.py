import math

import numpy as np
import pytest

from omnoise.errors import QuadratureError
from omnoise.quadrature import integrate


def test_polynomial_exact():
    # G7K15 integrates degree 22 exactly; one interval suffices
    value, err = integrate(lambda x: x**10 - 3 * x**3, -1.0, 2.0)
    exact = (2**11 + 1) / 11 - 0.75 * (16 - 1)
    assert value == pytest.approx(exact, rel=1e-14)
    assert err <= 1e-8 * abs(value)


def test_sine():
    value, _ = integrate(np.sin, 0.0, math.pi, rel_tol=1e-12)
    assert value == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("cuts", [(), (0.3,)])
def test_kink(cuts):
    value, _ = integrate(lambda x: np.abs(x - 0.3), 0.0, 1.0, rel_tol=1e-10, breakpoints=cuts)
    assert value == pytest.approx(0.045 + 0.245, rel=1e-10)


def test_narrow_lorentzian():
    w = 1e-4
    value, _ = integrate(lambda x: w / ((x - 0.5) ** 2 + w * w), -1.0, 3.0, rel_tol=1e-10, breakpoints=[0.5])
    exact = math.atan(2.5 / w) + math.atan(1.5 / w)
    assert value == pytest.approx(exact, rel=1e-10)


def test_absolute_tolerance_terminates_near_zero():
    value, err = integrate(lambda x: 1e-30 * np.sin(x), -1.0, 1.0, rel_tol=1e-12, abs_tol=1e-20)
    assert abs(value) <= 1e-20 and err <= 1e-20


def test_non_finite_integrand():
    with pytest.raises(QuadratureError) as info, np.errstate(divide="ignore"):
        integrate(lambda x: 1.0 / x, -1.0, 1.0)
    assert info.value.error == math.inf


def test_interval_limit_carries_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: np.sin(1.0 / x), 1e-6, 1.0, rel_tol=1e-14, max_intervals=16)
    assert math.isfinite(info.value.estimate)


@pytest.mark.parametrize("a, b", [(1.0, 1.0), (2.0, 1.0), (0.0, math.inf)])
def test_bad_limits(a, b):
    with pytest.raises(ValueError):
        integrate(np.cos, a, b)


def test_needs_some_tolerance():
    with pytest.raises(ValueError):
        integrate(np.cos, 0.0, 1.0, rel_tol=0.0, abs_tol=0.0)
