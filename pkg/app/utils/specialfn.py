"""
Combinatorial and polynomial kernels shared by the rotation and loss code.

Factorial ratios are taken in the log domain. Jacobi polynomials come from
the three-term recurrence when alpha, beta > -1 and from their finite
hypergeometric series otherwise (the negative integer alpha of the loss
matrix elements).
"""
import logging

import numpy as np
from scipy.special import gammaln

from app.config import LOG_FACTORIAL_MAX
from app.models.errors import IndexRangeError

logger = logging.getLogger(__name__)


class LogFactorialTable:
    """Table of ln(k!) for k = 0..k_max."""

    def __init__(self, k_max: int):
        self.k_max = k_max
        self.values = gammaln(np.arange(k_max + 1, dtype=float) + 1.0)
        self.values[:2] = 0.0
        self.values.setflags(write=False)
        logger.debug(f"Log-factorial table built up to k = {k_max}")

    def __call__(self, k: int) -> float:
        if k < 0 or k > self.k_max:
            raise IndexRangeError(f"log_factorial argument {k} outside [0, {self.k_max}]")
        return float(self.values[k])


# Singleton instance
log_factorials = LogFactorialTable(LOG_FACTORIAL_MAX)


def log_factorial(k: int) -> float:
    """Return ln(k!) for 0 <= k <= LOG_FACTORIAL_MAX."""
    return log_factorials(int(k))


def pochhammer(p: float, q: int) -> float:
    """Rising factorial p(p+1)...(p+q-1); q = 0 gives 1."""
    if q < 0:
        raise IndexRangeError(f"pochhammer length must be non-negative, got {q}")
    result = 1.0
    for k in range(q):
        result *= p + k
    return result


def jacobi_coefficients(n: int, alpha: float, beta: float) -> np.ndarray:
    """
    Coefficients c_k of P_n^(alpha,beta)(x) = sum_k c_k ((x - 1)/2)^k.

    c_k = (n+alpha+beta+1)_k (alpha+k+1)_(n-k) / (k! (n-k)!), valid for any
    real alpha, beta including negative integers.
    """
    if n < 0:
        raise IndexRangeError(f"Jacobi degree must be non-negative, got {n}")
    coeffs = np.empty(n + 1)
    for k in range(n + 1):
        coeffs[k] = (
            pochhammer(n + alpha + beta + 1.0, k)
            * pochhammer(alpha + k + 1.0, n - k)
            / np.exp(log_factorial(k) + log_factorial(n - k))
        )
    return coeffs


def jacobi_poly_shifted(n: int, alpha: float, beta: float, t):
    """Evaluate P_n^(alpha,beta) at x = 1 + 2t (Horner in t)."""
    coeffs = jacobi_coefficients(n, alpha, beta)
    t = np.asarray(t, dtype=float)
    result = np.full(t.shape, coeffs[-1])
    for c in coeffs[-2::-1]:
        result = result * t + c
    return result if result.ndim else float(result)


def jacobi_recurrence(n: int, alpha: float, beta: float, x):
    """
    P_n^(alpha,beta)(x) by the three-term recurrence in n.

    Stable on [-1, 1] but needs alpha, beta > -1; the series above covers
    the negative integer parameters of the loss matrix elements.
    """
    if n < 0:
        raise IndexRangeError(f"Jacobi degree must be non-negative, got {n}")
    if not (alpha > -1 and beta > -1):
        raise IndexRangeError(f"Recurrence needs alpha, beta > -1, got ({alpha}, {beta})")
    x = np.asarray(x, dtype=float)
    previous = np.ones_like(x)
    if n == 0:
        return previous if previous.ndim else float(previous)
    current = (alpha + 1) + (alpha + beta + 2) * (x - 1) / 2
    ab2 = alpha**2 - beta**2
    for k in range(2, n + 1):
        s = 2 * k + alpha + beta
        a = 2 * k * (k + alpha + beta) * (s - 2)
        b = (s - 1) * (s * (s - 2) * x + ab2)
        c = 2 * (k + alpha - 1) * (k + beta - 1) * s
        previous, current = current, (b * current - c * previous) / a
    return current if current.ndim else float(current)


def jacobi_poly(n: int, alpha: float, beta: float, x):
    """Jacobi polynomial P_n^(alpha,beta)(x) for scalar or array x."""
    if alpha > -1 and beta > -1:
        return jacobi_recurrence(n, alpha, beta, x)
    x = np.asarray(x, dtype=float)
    return jacobi_poly_shifted(n, alpha, beta, (x - 1.0) / 2.0)
