import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.polynomial import legendre
from scipy.special import eval_jacobi

from app.config import LOG_FACTORIAL_MAX
from app.models.errors import IndexRangeError
from app.utils.optimize import golden_section_search
from app.utils.specialfn import (
    jacobi_coefficients,
    jacobi_poly,
    jacobi_poly_shifted,
    jacobi_recurrence,
    log_factorial,
    pochhammer,
)


@pytest.mark.parametrize("k", [0, 1, 5, 20, 60])
def test_log_factorial_matches_math(k):
    assert log_factorial(k) == pytest.approx(math.lgamma(k + 1), abs=1e-12)


@pytest.mark.parametrize("k", [-1, LOG_FACTORIAL_MAX + 1])
def test_log_factorial_out_of_range(k):
    with pytest.raises(IndexRangeError):
        log_factorial(k)


def test_pochhammer():
    assert pochhammer(3, 0) == 1.0
    assert pochhammer(3, 2) == 12.0
    assert pochhammer(-2, 3) == 0.0
    with pytest.raises(IndexRangeError):
        pochhammer(1, -1)


@pytest.mark.parametrize("n,alpha,beta", [(0, 0, 0), (1, 0, 0), (3, 1, 2), (5, 0.5, 3), (8, 2, 0)])
def test_jacobi_against_scipy(n, alpha, beta):
    x = np.linspace(-1, 1, 11)
    np.testing.assert_allclose(jacobi_poly(n, alpha, beta, x), eval_jacobi(n, alpha, beta, x), atol=1e-10)


def _exact_coefficients(n, alpha, beta):
    def rising(p, q):
        out = Fraction(1)
        for k in range(q):
            out *= p + k
        return out

    return [
        rising(Fraction(n + alpha + beta + 1), k) * rising(Fraction(alpha + k + 1), n - k)
        / (math.factorial(k) * math.factorial(n - k))
        for k in range(n + 1)
    ]


@pytest.mark.parametrize("n,alpha,beta", [(1, -3, 1), (3, -5, 2), (4, -9, 0), (6, -7, 3)])
def test_jacobi_negative_alpha_series(n, alpha, beta):
    exact = [float(c) for c in _exact_coefficients(n, alpha, beta)]
    np.testing.assert_allclose(jacobi_coefficients(n, alpha, beta), exact, rtol=1e-12, atol=1e-12)


def test_jacobi_degree_one_closed_form():
    # P_1 = (alpha + 1) + (alpha + beta + 2)(x - 1)/2
    assert jacobi_poly(1, -3, 1, 0.3) == pytest.approx(-2.0)
    assert jacobi_poly_shifted(1, 2, 1, -0.5) == pytest.approx(3 + 5 * -0.5)


def test_jacobi_negative_degree():
    with pytest.raises(IndexRangeError):
        jacobi_coefficients(-1, 0, 0)


def test_golden_section_search():
    x_min, f_min = golden_section_search(lambda x: (x - 1.3) ** 2 + 0.5, 0.0, 3.0, tol=1e-12)
    assert x_min == pytest.approx(1.3, abs=1e-6)
    assert f_min == pytest.approx(0.5, abs=1e-12)


def test_reference_values():
    assert log_factorial(0) == 0.0
    assert log_factorial(10) == pytest.approx(math.log(3628800), rel=1e-14)
    assert pochhammer(2, 3) == 24.0
    assert pochhammer(1, 5) == 120.0
    assert jacobi_poly(0, -4.0, 2.5, 7.0) == 1.0
    assert jacobi_poly(1, 0, 0, 0.5) == pytest.approx(0.5)


def test_jacobi_negative_alpha_value_against_exact_sum():
    x = Fraction(3, 10)
    exact = sum(c * ((x - 1) / 2) ** k for k, c in enumerate(_exact_coefficients(2, -5, 1)))
    assert jacobi_poly(2, -5, 1, 0.3) == pytest.approx(float(exact), abs=1e-13)


def test_recurrence_matches_series():
    rng = np.random.default_rng(11)
    x = rng.uniform(-1, 1, size=100)
    for n in range(11):
        alpha, beta = rng.uniform(-0.9, 3.0, size=2)
        series = jacobi_poly_shifted(n, alpha, beta, (x - 1) / 2)
        scale = max(1.0, float(np.max(np.abs(series))))
        np.testing.assert_allclose(jacobi_recurrence(n, alpha, beta, x), series, rtol=1e-12, atol=1e-12 * scale)


def test_legendre_reduction():
    x = np.linspace(-1, 1, 41)
    for n in range(21):
        np.testing.assert_allclose(jacobi_poly(n, 0, 0, x), legendre.legval(x, [0] * n + [1]), atol=1e-12)


def test_reflection_symmetry():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(0, 9))
        alpha, beta = (int(v) for v in rng.integers(-6, 7, size=2))
        x = float(rng.uniform(-1, 1))
        lhs = jacobi_poly(n, alpha, beta, -x)
        rhs = (-1) ** n * jacobi_poly(n, beta, alpha, x)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-9)


def test_recurrence_needs_parameters_above_minus_one():
    with pytest.raises(IndexRangeError):
        jacobi_recurrence(3, -1.0, 0.5, 0.2)
    with pytest.raises(IndexRangeError):
        jacobi_recurrence(-1, 0.0, 0.0, 0.2)
