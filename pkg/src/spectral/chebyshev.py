#!/usr/bin/env python3
"""
Chebyshev Series - Transforms, evaluation and adaptive truncation

Coefficient arrays always carry the polynomial degree on their leading
axis (two leading axes for bivariate series). Any further trailing axes are
component axes, so a 2x2 kernel expands in one call.

Features:
- Gauss-Chebyshev interpolation transform through scipy's DCT-II
- Clenshaw evaluation for first- and second-kind series
- Two-stage adaptive truncation (doubling, then bisection)
- Closed-form log-kernel coefficients and weighted-basis identities
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Tuple

import numpy as np
from scipy.fft import dct

from errors import DomainError, ExpansionError

logger = logging.getLogger(__name__)

DEFAULT_MAX_LENGTH = 2 ** 16
DEFAULT_MIN_DEGREE = 8
DEFAULT_MAX_GRID_LENGTH = 4096

# slack on |t| <= 1 for nodes produced by cos() round-off
_DOMAIN_SLACK = 1e-14


class ChebKind(Enum):
    """Chebyshev polynomial family"""
    FIRST = "first"    # T_l, weight (1-t^2)^(-1/2)
    SECOND = "second"  # U_l, weight (1-t^2)^(1/2)


@dataclass(frozen=True)
class ChebSeries1D:
    """Univariate Chebyshev series; coeffs[l] multiplies T_l or U_l"""
    kind: ChebKind
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim == 0 or coeffs.shape[0] == 0:
            raise ValueError("Chebyshev series must have at least one coefficient")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Chebyshev coefficients must be finite")
        object.__setattr__(self, 'coeffs', coeffs)

    @property
    def length(self) -> int:
        return self.coeffs.shape[0]

    def __call__(self, t):
        return eval_series(self, t)


@dataclass(frozen=True)
class ChebSeries2D:
    """
    Bivariate series, coeffs[p, q] multiplies T_p(s) T_q(t).

    Entries with magnitude below tol are stored as exact zeros. On the
    tensor grid the truncation changes the represented function by at most
    (number of dropped entries) * tol.
    """
    coeffs: np.ndarray
    tol: float

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim < 2:
            raise ValueError("Bivariate series needs a 2D coefficient array")
        object.__setattr__(self, 'coeffs', coeffs)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.coeffs.shape[0], self.coeffs.shape[1]

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.coeffs))

    def padded(self, rows: int, cols: int) -> np.ndarray:
        """Coefficient array zero-padded (or cut) to rows x cols leading axes"""
        out = np.zeros((rows, cols) + self.coeffs.shape[2:], dtype=complex)
        p = min(rows, self.coeffs.shape[0])
        q = min(cols, self.coeffs.shape[1])
        out[:p, :q] = self.coeffs[:p, :q]
        return out

    def __call__(self, s, t):
        """Evaluate at matching point arrays s, t"""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        inner = ChebSeries1D(ChebKind.FIRST, np.moveaxis(self.coeffs, 1, 0))
        # rows: Σ_q c[p, q] T_q(t) for each t
        along_t = eval_series(inner, t)  # (n_pts, P, ...)
        tp = _chebyshev_t_table(s, self.coeffs.shape[0])  # (n_pts, P)
        extra = (1,) * (along_t.ndim - 2)
        return np.sum(tp.reshape(tp.shape + extra) * along_t, axis=1)


@dataclass(frozen=True)
class LogKernelCoeffs:
    """
    Coefficients of log|s-t| = Σ c_n T_n(s) T_n(t) and the matching
    Galerkin diagonal d_n = ∬ log|s-t| w⁻¹T_n w⁻¹T_n.
    """
    expansion_c: np.ndarray = field(repr=False)
    galerkin_d: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, size: int) -> 'LogKernelCoeffs':
        if size < 1:
            raise ValueError("size must be positive")
        n = np.arange(size, dtype=float)
        c = np.empty(size)
        c[0] = -np.log(2.0)
        c[1:] = -2.0 / n[1:]
        weights = quadrature_weight(np.arange(size))
        return cls(expansion_c=c, galerkin_d=c * weights ** 2)


def quadrature_weight(l):
    """∫ T_l² w⁻¹ dt: π for l = 0 and π/2 otherwise"""
    l = np.asarray(l)
    return np.where(l == 0, np.pi, np.pi / 2)


def cheb_nodes(n: int, kind: ChebKind = ChebKind.FIRST) -> np.ndarray:
    """
    Chebyshev nodes in descending order.

    FIRST gives the roots of T_n, cos((2k+1)π/(2n)); SECOND gives the roots
    of U_n, cos(kπ/(n+1)) for k = 1..n.
    """
    if n < 1:
        raise ValueError("Number of nodes must be positive")
    k = np.arange(n)
    if kind is ChebKind.FIRST:
        return np.cos((2 * k + 1) * np.pi / (2 * n))
    return np.cos((k + 1) * np.pi / (n + 1))


def _dct_coefficients(values: np.ndarray, axis: int) -> np.ndarray:
    n = values.shape[axis]
    if np.iscomplexobj(values):
        out = dct(values.real, type=2, axis=axis) + 1j * dct(values.imag, type=2, axis=axis)
    else:
        out = dct(values, type=2, axis=axis).astype(complex)
    out /= n
    head = [slice(None)] * out.ndim
    head[axis] = 0
    out[tuple(head)] *= 0.5
    return out


def forward_transform(samples, kind: ChebKind = ChebKind.FIRST) -> ChebSeries1D:
    """
    Interpolation coefficients from samples at cheb_nodes(n, FIRST).

    Args:
        samples: Values at the first-kind nodes (leading axis), any trailing
            component axes are transformed independently
        kind: Basis of the returned series

    Returns:
        ChebSeries1D whose series interpolates the samples
    """
    values = np.asarray(samples)
    if values.ndim == 0 or values.shape[0] < 1:
        raise ValueError("At least one sample is required")
    series = ChebSeries1D(ChebKind.FIRST, _dct_coefficients(values, axis=0))
    if kind is ChebKind.SECOND:
        return to_second_kind(series)
    return series


def to_second_kind(series: ChebSeries1D) -> ChebSeries1D:
    """Rewrite Σ h_l T_l as Σ b_l U_l using T_l = ½(U_l − U_{l−2})"""
    if series.kind is ChebKind.SECOND:
        return series
    h = series.coeffs
    padded = np.concatenate([h, np.zeros((2,) + h.shape[1:], dtype=complex)])
    b = 0.5 * (padded[:-2] - padded[2:])
    b[0] = h[0] - 0.5 * padded[2]
    return ChebSeries1D(ChebKind.SECOND, b)


def eval_series(series: ChebSeries1D, t):
    """
    Clenshaw evaluation of a Chebyshev series.

    Args:
        series: Series to evaluate
        t: Point or array of points in [-1, 1]

    Returns:
        Values with shape t.shape + component shape
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1.0 + _DOMAIN_SLACK):
        raise DomainError(f"Chebyshev series evaluated outside [-1, 1]: max |t| = {np.max(np.abs(t_arr))}")

    c = series.coeffs
    tt = t_arr.reshape(t_arr.shape + (1,) * (c.ndim - 1))
    b1 = np.zeros(np.broadcast_shapes(tt.shape, c.shape[1:]), dtype=complex)
    b2 = np.zeros_like(b1)
    for k in range(c.shape[0] - 1, 0, -1):
        b1, b2 = c[k] + 2.0 * tt * b1 - b2, b1
    b0 = c[0] + 2.0 * tt * b1 - b2
    result = b0 - tt * b1 if series.kind is ChebKind.FIRST else b0
    return result[()] if result.ndim == 0 else result


def _chebyshev_t_table(t: np.ndarray, size: int) -> np.ndarray:
    """T_0..T_{size-1} at t, shape (len(t), size)"""
    table = np.empty((t.shape[0], size))
    table[:, 0] = 1.0
    if size > 1:
        table[:, 1] = t
    for k in range(2, size):
        table[:, k] = 2.0 * t * table[:, k - 1] - table[:, k - 2]
    return table


def _magnitudes(coeffs: np.ndarray) -> np.ndarray:
    """Per-degree coefficient magnitude, max over component axes"""
    mags = np.abs(coeffs)
    if mags.ndim > 1:
        mags = mags.reshape(mags.shape[0], -1).max(axis=1)
    return mags


def adaptive_expand(f: Callable[[np.ndarray], np.ndarray], tol: float,
                    max_length: int = DEFAULT_MAX_LENGTH,
                    min_degree: int = DEFAULT_MIN_DEGREE) -> ChebSeries1D:
    """
    Expand f on [-1, 1] with an adaptively chosen number of terms.

    Stage 1 doubles the degree N_c until the last two coefficients fall below
    tol * max(1, max|c|); stage 2 bisects for the shortest truncation whose
    remaining tail stays below the same threshold. Convergence is only
    accepted from min_degree on, so a low-degree interpolant that vanishes on
    its own nodes is not mistaken for a resolved function.

    Args:
        f: Vectorized function of t (component axes allowed after the first)
        tol: Coefficient threshold
        max_length: Hard cap on the number of terms
        min_degree: Smallest degree at which convergence is accepted

    Returns:
        Truncated first-kind series

    Raises:
        ExpansionError: cap exceeded before the tail dropped below tol
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    degree = 1
    while True:
        nodes = cheb_nodes(degree + 1)
        coeffs = forward_transform(f(nodes)).coeffs
        mags = _magnitudes(coeffs)
        threshold = tol * max(1.0, float(mags.max()))
        tail = float(mags[degree - 1:].max())
        if degree >= min_degree and tail <= threshold:
            break
        if 2 * degree + 1 > max_length:
            raise ExpansionError(
                f"Chebyshev expansion did not converge within {max_length} terms "
                f"(tail {tail:.3e}, threshold {threshold:.3e})",
                tail_magnitude=tail,
            )
        degree *= 2

    def tail_ok(m: int) -> bool:
        return float(mags[m - 1:].max()) <= threshold

    if tail_ok(1):
        keep = 1
    else:
        lo, hi = 1, degree
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if tail_ok(mid):
                hi = mid
            else:
                lo = mid
        keep = hi

    logger.debug(f"adaptive_expand: N_c={degree}, kept {keep + 1} terms (tol={tol:.1e})")
    return ChebSeries1D(ChebKind.FIRST, coeffs[:keep + 1])


def adaptive_expand_2d(g: Callable[[np.ndarray, np.ndarray], np.ndarray], tol: float,
                       max_length: int = DEFAULT_MAX_LENGTH,
                       symmetric_slice: bool = True,
                       max_grid_length: int = DEFAULT_MAX_GRID_LENGTH) -> ChebSeries2D:
    """
    Expand g(s, t) on [-1, 1]² on a tensor grid sized from 1D slices.

    The grid length comes from the slice g(s, 0); with symmetric_slice the
    slice g(0, t) is expanded too and the longer of the two is used.
    Coefficients below tol are dropped.

    Args:
        g: Vectorized function of broadcast arrays (s, t)
        tol: Drop threshold (also the slice expansion tolerance)
        max_length: Cap passed to the slice expansions
        symmetric_slice: Also size the grid from the s = 0 slice
        max_grid_length: Largest tensor grid side accepted

    Returns:
        ChebSeries2D with coeffs[p, q] multiplying T_p(s) T_q(t)
    """
    n = adaptive_expand(lambda s: g(s, np.zeros_like(s)), tol, max_length).length
    if symmetric_slice:
        n = max(n, adaptive_expand(lambda t: g(np.zeros_like(t), t), tol, max_length).length)
    if n > max_grid_length:
        raise ExpansionError(
            f"Bivariate expansion needs a {n}x{n} grid, above the cap {max_grid_length}",
            tail_magnitude=float('nan'),
        )

    nodes = cheb_nodes(n)
    s_grid, t_grid = np.meshgrid(nodes, nodes, indexing='ij')
    coeffs = _dct_coefficients(_dct_coefficients(np.asarray(g(s_grid, t_grid)), axis=0), axis=1)
    coeffs[np.abs(coeffs) < tol] = 0.0
    logger.debug(f"adaptive_expand_2d: grid {n}x{n}, nnz={np.count_nonzero(coeffs)}")
    return ChebSeries2D(coeffs=coeffs, tol=tol)


def log_galerkin_diagonal(l: int) -> float:
    """∬ log|s-t| w⁻¹T_l(t) w⁻¹T_l(s) dt ds"""
    if l < 0:
        raise ValueError("Mode index must be non-negative")
    if l == 0:
        return -np.pi ** 2 * np.log(2.0)
    return -np.pi ** 2 / (2.0 * l)


# Weighted-basis identities. Each returns (index, weight) pairs.

def uU_to_T(l: int) -> Tuple[Tuple[int, float], ...]:
    """w U_l = ½ w⁻¹ (T_l − T_{l+2})"""
    return ((l, 0.5), (l + 2, -0.5))


def duU_to_T(l: int) -> Tuple[Tuple[int, float], ...]:
    """d/dt (w U_l) = −(l+1) w⁻¹ T_{l+1}"""
    return ((l + 1, -float(l + 1)),)


def T_product(a: int, b: int) -> Tuple[Tuple[int, float], ...]:
    """T_a T_b = ½ (T_{a+b} + T_{|a−b|})"""
    return ((a + b, 0.5), (abs(a - b), 0.5))


def _identity_matrix(N: int, rule: Callable[[int], Tuple[Tuple[int, float], ...]]) -> np.ndarray:
    out = np.zeros((N + 1, N + 3))
    for l in range(N + 1):
        for index, weight in rule(l):
            out[l, index] += weight
    return out


def weighted_u_matrix(N: int) -> np.ndarray:
    """Row l holds the w⁻¹T coefficients of w U_l, shape (N+1, N+3)"""
    return _identity_matrix(N, uU_to_T)


def weighted_u_derivative_matrix(N: int) -> np.ndarray:
    """Row l holds the w⁻¹T coefficients of (w U_l)', shape (N+1, N+3)"""
    return _identity_matrix(N, duU_to_T)
