#!/usr/bin/env python3
"""
Special Functions - Bessel and Hankel evaluation with explicit log splits

Values come from scipy.special (AMOS based). The neumann_* helpers expose the
pieces of the small-argument expansion

    Y_n(z) = (2/π) log(z) J_n(z) + pole_n(z) + P_n(z)

where pole_n collects the negative powers (and, for n = 2, the constant that
comes with them) and P_n is the remaining power series. P_n is odd/even like
J_n and vanishes as z^n, so combinations built from J_n and P_n stay analytic
on the diagonal of a kernel.
"""

import logging

import numpy as np
from scipy import special

from errors import DomainError, SingularEvaluationError

logger = logging.getLogger(__name__)

EULER_GAMMA = float(np.euler_gamma)

_SUPPORTED_ORDERS = (0, 1, 2)
# below this argument the power series replaces Y_n - log/pole subtraction
_SERIES_SWITCH = 1.0
_SERIES_TERMS = 30


def _check_order(order: int):
    if order not in _SUPPORTED_ORDERS:
        raise ValueError(f"Bessel order must be 0, 1 or 2, got {order}")


def _as_argument(x, allow_zero: bool) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    bad = (x < 0) if allow_zero else (x <= 0)
    if np.any(bad):
        raise DomainError(f"Bessel argument out of domain: min x = {np.min(x)}")
    return x


def bessel_j(order: int, x):
    """J_order(x) for x >= 0"""
    _check_order(order)
    return special.jv(order, _as_argument(x, allow_zero=True))


def bessel_y(order: int, x):
    """Y_order(x) for x > 0"""
    _check_order(order)
    return special.yv(order, _as_argument(x, allow_zero=False))


def hankel1(order: int, x):
    """H_order^{(1)}(x) = J_order(x) + i Y_order(x) for x > 0"""
    _check_order(order)
    return special.hankel1(order, _as_argument(x, allow_zero=False))


def neumann_pole_part(order: int, x):
    """−(1/π)(x/2)^{−n} Σ_{k<n} (n−k−1)!/k! (x²/4)^k for x > 0"""
    _check_order(order)
    x = _as_argument(x, allow_zero=False)
    if order == 0:
        return np.zeros_like(x)
    if order == 1:
        return -2.0 / (np.pi * x)
    return -(4.0 / x ** 2 + 1.0) / np.pi


def _digamma_series(order: int, x: np.ndarray, divide_by_x: bool = False) -> np.ndarray:
    """−(1/π)(x/2)^n Σ_k [ψ(k+1)+ψ(n+k+1)] (−x²/4)^k / (k!(n+k)!), optionally / x"""
    k = np.arange(_SERIES_TERMS)
    weights = (special.digamma(k + 1) + special.digamma(order + k + 1)) / (
        special.factorial(k) * special.factorial(order + k))
    powers = (-(x[..., None] ** 2) / 4.0) ** k
    total = np.sum(weights * powers, axis=-1)
    if divide_by_x:
        # (x/2)^n / x with n = 1
        return -total / (2.0 * np.pi)
    return -((x / 2.0) ** order) * total / np.pi


def neumann_regular_part(order: int, x):
    """
    P_n(x) = Y_n(x) − (2/π) log(x) J_n(x) − pole_n(x), finite at x = 0.

    Args:
        order: 0, 1 or 2
        x: Non-negative arguments

    Returns:
        Array of P_n values (P_0(0) = (2/π)(γ_E − log 2), P_1(0) = P_2(0) = 0)
    """
    _check_order(order)
    x = np.atleast_1d(_as_argument(x, allow_zero=True))
    out = np.empty_like(x)
    small = x < _SERIES_SWITCH
    if np.any(small):
        xs = x[small]
        out[small] = -(2.0 / np.pi) * np.log(2.0) * special.jv(order, xs) + _digamma_series(order, xs)
    if np.any(~small):
        xl = x[~small]
        out[~small] = (special.yv(order, xl) - (2.0 / np.pi) * np.log(xl) * special.jv(order, xl)
                       - neumann_pole_part(order, xl))
    return out


def bessel_j1_over_x(x):
    """J_1(x)/x with the limit 1/2 at x = 0"""
    x = np.atleast_1d(_as_argument(x, allow_zero=True))
    out = np.empty_like(x)
    small = x < 1e-3
    xs = x[small]
    out[small] = 0.5 - xs ** 2 / 16.0 + xs ** 4 / 384.0
    out[~small] = special.j1(x[~small]) / x[~small]
    return out


def neumann_regular_part1_over_x(x):
    """P_1(x)/x, finite at x = 0"""
    x = np.atleast_1d(_as_argument(x, allow_zero=True))
    out = np.empty_like(x)
    small = x < _SERIES_SWITCH
    if np.any(small):
        xs = x[small]
        out[small] = (-(2.0 / np.pi) * np.log(2.0) * bessel_j1_over_x(xs)
                      + _digamma_series(1, xs, divide_by_x=True))
    if np.any(~small):
        xl = x[~small]
        out[~small] = neumann_regular_part(1, xl) / xl
    return out


def hankel1_log_split(order: int, x):
    """
    Split H_n^{(1)}(x) = analytic + (2i/π) log(x) log_coeff.

    log_coeff is J_n(x); analytic keeps J_n, log(1/2), γ_E and the pole terms.
    For order 0 the value at x = 0 is the finite limit; orders 1 and 2 have a
    genuine pole there.

    Args:
        order: 0, 1 or 2
        x: Non-negative arguments

    Returns:
        Tuple (analytic, log_coeff)

    Raises:
        SingularEvaluationError: order 1 or 2 requested at x = 0
    """
    _check_order(order)
    x = np.asarray(_as_argument(x, allow_zero=True))
    if order > 0 and np.any(x == 0):
        raise SingularEvaluationError(f"H_{order} has a pole at x = 0; use the combined kernel forms")
    j = special.jv(order, x)
    analytic = j + 1j * neumann_regular_part(order, x).reshape(x.shape)
    if order > 0:
        analytic = analytic + 1j * neumann_pole_part(order, x)
    return analytic, j
