"""
Spectral Module

Chebyshev series, transforms and adaptive truncation, together with the
Bessel/Hankel evaluations and log splits used by the kernel layer.
"""

from .chebyshev import (
    ChebKind,
    ChebSeries1D,
    ChebSeries2D,
    LogKernelCoeffs,
    cheb_nodes,
    forward_transform,
    to_second_kind,
    eval_series,
    adaptive_expand,
    adaptive_expand_2d,
    log_galerkin_diagonal,
    quadrature_weight,
    uU_to_T,
    duU_to_T,
    T_product,
    weighted_u_matrix,
    weighted_u_derivative_matrix,
)
from .special_functions import (
    bessel_j,
    bessel_y,
    hankel1,
    hankel1_log_split,
    neumann_pole_part,
    neumann_regular_part,
    bessel_j1_over_x,
    neumann_regular_part1_over_x,
)

__all__ = [
    'ChebKind',
    'ChebSeries1D',
    'ChebSeries2D',
    'LogKernelCoeffs',
    'cheb_nodes',
    'forward_transform',
    'to_second_kind',
    'eval_series',
    'adaptive_expand',
    'adaptive_expand_2d',
    'log_galerkin_diagonal',
    'quadrature_weight',
    'uU_to_T',
    'duU_to_T',
    'T_product',
    'weighted_u_matrix',
    'weighted_u_derivative_matrix',
    'bessel_j',
    'bessel_y',
    'hankel1',
    'hankel1_log_split',
    'neumann_pole_part',
    'neumann_regular_part',
    'bessel_j1_over_x',
    'neumann_regular_part1_over_x',
]
