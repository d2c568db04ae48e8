#!/usr/bin/env python3
"""
Elastic Kernels - Fundamental tensor, traction and log-split kernels

Every kernel G(r_i(s), r_j(t)) used in the Galerkin forms is written as

    G = log|s - t| J(s, t) + R(s, t)

with J and R analytic on [-1, 1]². For two different arcs J vanishes. On a
single arc the distance is factored as |r(s) - r(t)| = |s - t| q(s, t) and
each Hankel term is split with the small-argument Bessel series; the 1/r
poles of the first- and second-order terms are combined across the shear and
compressional wavenumbers before splitting so that they cancel exactly.

Features:
- Vectorized evaluation on arbitrary (s, t) arrays, 2x2 matrix values
- Exact diagonal limits (no special casing by the caller)
- Maue kernels G1..G4 of the hyper-singular operator
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from errors import SingularEvaluationError
from geometry.arcs import ArcGeometry, arc_eval
from geometry.medium import ElasticMedium
from spectral.special_functions import (
    bessel_j,
    bessel_j1_over_x,
    hankel1,
    neumann_regular_part,
    neumann_regular_part1_over_x,
)

logger = logging.getLogger(__name__)

ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])
IDENTITY = np.eye(2)

# |s - t| below which the difference quotient uses its Taylor form
TAYLOR_SWITCH = 1e-4

_LOG_FACTOR = 2j / np.pi


class LogSplit:
    """
    Pair (log_coeff, regular) standing for log|s-t| * log_coeff + regular.

    Supports the linear operations needed to assemble kernels from scalar
    radial pieces and geometric matrix fields.
    """

    __array_ufunc__ = None

    def __init__(self, log_coeff, regular):
        self.log_coeff = np.asarray(log_coeff)
        self.regular = np.asarray(regular)

    def __add__(self, other: 'LogSplit') -> 'LogSplit':
        return LogSplit(self.log_coeff + other.log_coeff, self.regular + other.regular)

    def __sub__(self, other: 'LogSplit') -> 'LogSplit':
        return LogSplit(self.log_coeff - other.log_coeff, self.regular - other.regular)

    def __neg__(self) -> 'LogSplit':
        return LogSplit(-self.log_coeff, -self.regular)

    def __mul__(self, factor) -> 'LogSplit':
        return LogSplit(self.log_coeff * factor, self.regular * factor)

    __rmul__ = __mul__

    def outer(self, matrix) -> 'LogSplit':
        """Scalar split times a (…, 2, 2) matrix field"""
        matrix = np.asarray(matrix)
        return LogSplit(self.log_coeff[..., None, None] * matrix, self.regular[..., None, None] * matrix)

    def scaled(self, field) -> 'LogSplit':
        """Matrix split times a scalar field (e.g. a Jacobian)"""
        field = np.asarray(field)[..., None, None]
        return LogSplit(self.log_coeff * field, self.regular * field)

    def sandwich(self, left, right) -> 'LogSplit':
        """left @ G @ right"""
        return LogSplit(left @ self.log_coeff @ right, left @ self.regular @ right)

    def combine(self, s, t) -> np.ndarray:
        """log|s-t| log_coeff + regular (off the diagonal)"""
        log_abs = np.log(np.abs(np.asarray(s, dtype=float) - np.asarray(t, dtype=float)))
        if self.regular.ndim > log_abs.ndim:
            log_abs = log_abs.reshape(log_abs.shape + (1,) * (self.regular.ndim - log_abs.ndim))
        return log_abs * self.log_coeff + self.regular


@dataclass(frozen=True)
class PairGeometry:
    """Geometric fields for points x = r_i(s), y = r_j(t)"""
    diff: np.ndarray        # x - y, (..., 2)
    dyad: np.ndarray        # (x-y)(x-y)ᵀ/|x-y|², (..., 2, 2)
    distance: np.ndarray    # |x - y|
    q: Optional[np.ndarray]  # |x - y| / |s - t|, same arc only
    nu_x: np.ndarray
    nu_y: np.ndarray
    jac_s: np.ndarray
    jac_t: np.ndarray


def pair_geometry(arc_i: ArcGeometry, arc_j: ArcGeometry, s, t, same_arc: bool) -> PairGeometry:
    """
    Geometry of a parameter pair.

    On the same arc the difference quotient (r(s) - r(t))/(s - t) switches to
    r'(m) + r'''(m) (s-t)²/24 at m = (s+t)/2 when |s - t| < TAYLOR_SWITCH.
    """
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    sample_x = arc_eval(arc_i, s)
    sample_y = arc_eval(arc_j, t)

    if same_arc:
        h = s - t
        near = np.abs(h) < TAYLOR_SWITCH
        far = ~near
        quotient = np.empty(s.shape + (2,))
        quotient[far] = (sample_x.point[far] - sample_y.point[far]) / h[far][..., None]
        if np.any(near):
            mid = 0.5 * (s[near] + t[near])
            quotient[near] = (arc_i.derivative(mid, 1)
                              + arc_i.derivative(mid, 3) * (h[near] ** 2 / 24.0)[..., None])
        q = np.linalg.norm(quotient, axis=-1)
        unit = quotient / q[..., None]
        diff = h[..., None] * quotient
        distance = np.abs(h) * q
    else:
        q = None
        diff = sample_x.point - sample_y.point
        distance = np.linalg.norm(diff, axis=-1)
        if np.any(distance == 0):
            raise SingularEvaluationError("Distinct arcs share a point")
        unit = diff / distance[..., None]

    return PairGeometry(
        diff=diff,
        dyad=unit[..., :, None] * unit[..., None, :],
        distance=distance,
        q=q,
        nu_x=sample_x.normal,
        nu_y=sample_y.normal,
        jac_s=sample_x.jacobian,
        jac_t=sample_y.jacobian,
    )


def _radial_splits(medium: ElasticMedium, geom: PairGeometry) -> Dict[str, LogSplit]:
    """
    Split radial factors of the kernels:

        h0_s, h0_p : H0(κ r)
        h1_diff    : κ_s H1(κ_s r)/r − κ_p H1(κ_p r)/r
        h2_diff    : κ_s² H2(κ_s r) − κ_p² H2(κ_p r)
    """
    ks, kp = medium.kappa_s, medium.kappa_p
    r = geom.distance

    if geom.q is None:
        zero = np.zeros(r.shape)
        values = {
            'h0_s': hankel1(0, ks * r),
            'h0_p': hankel1(0, kp * r),
            'h1_diff': (ks * hankel1(1, ks * r) - kp * hankel1(1, kp * r)) / r,
            'h2_diff': ks ** 2 * hankel1(2, ks * r) - kp ** 2 * hankel1(2, kp * r),
        }
        return {name: LogSplit(zero, value) for name, value in values.items()}

    log_q = np.log(geom.q)

    def split(kappa: float, j: np.ndarray, p: np.ndarray, weight: float) -> LogSplit:
        log_kq = np.log(kappa) + log_q
        return LogSplit(weight * _LOG_FACTOR * j,
                        weight * (j + 1j * p + _LOG_FACTOR * log_kq * j))

    def h0(kappa: float) -> LogSplit:
        z = kappa * r
        return split(kappa, bessel_j(0, z), neumann_regular_part(0, z).reshape(z.shape), 1.0)

    def h1_over_r(kappa: float) -> LogSplit:
        # κ² H1(z)/z with the common −2/(π r²) pole removed
        z = kappa * r
        return split(kappa, bessel_j1_over_x(z).reshape(z.shape),
                     neumann_regular_part1_over_x(z).reshape(z.shape), kappa ** 2)

    def h2(kappa: float) -> LogSplit:
        # κ² H2(z) with the −(i/π)(4/r² + κ²) pole part removed
        z = kappa * r
        return split(kappa, bessel_j(2, z), neumann_regular_part(2, z).reshape(z.shape), kappa ** 2)

    constant = LogSplit(np.zeros(r.shape), np.full(r.shape, -1j * (ks ** 2 - kp ** 2) / np.pi))
    return {
        'h0_s': h0(ks),
        'h0_p': h0(kp),
        'h1_diff': h1_over_r(ks) - h1_over_r(kp),
        'h2_diff': h2(ks) - h2(kp) + constant,
    }


def _fundamental_split(medium: ElasticMedium, geom: PairGeometry, radial: Dict[str, LogSplit]) -> LogSplit:
    scale = 1j / (4.0 * medium.rho * medium.omega ** 2)
    return ((1j / (4.0 * medium.mu)) * radial['h0_s'].outer(IDENTITY)
            - scale * radial['h1_diff'].outer(IDENTITY)
            + scale * radial['h2_diff'].outer(geom.dyad))


@dataclass(frozen=True)
class KernelSplit:
    """Kernel G = log|s-t| J + R over a pair of arcs"""
    evaluator: Callable[[np.ndarray, np.ndarray], LogSplit]
    same_arc: bool

    def evaluate(self, s, t) -> LogSplit:
        return self.evaluator(s, t)

    def J(self, s, t) -> np.ndarray:
        return self.evaluator(s, t).log_coeff

    def R(self, s, t) -> np.ndarray:
        return self.evaluator(s, t).regular

    def reconstruct(self, s, t) -> np.ndarray:
        """Kernel value off the diagonal"""
        return self.evaluator(s, t).combine(s, t)


# Maue kernels: sign each kernel carries in the parameter-space bilinear form
# (derivative d/ds_x moved onto the test function) and whether the s / t
# arclength Jacobians multiply it.
HYPER_FORM_SIGNS = {'G1': -1.0, 'G2': -1.0, 'G3': 1.0, 'G4': 1.0}
HYPER_JACOBIANS = {'G1': (False, False), 'G2': (False, True), 'G3': (True, False), 'G4': (True, True)}


@dataclass(frozen=True)
class HyperKernelSet:
    """The four Maue kernels of the hyper-singular operator on one arc pair"""
    G1: KernelSplit
    G2: KernelSplit
    G3: KernelSplit
    G4: KernelSplit
    evaluator: Callable[[np.ndarray, np.ndarray], Tuple[LogSplit, LogSplit, LogSplit, LogSplit]]
    jacobian_placement: Dict[str, Tuple[bool, bool]]

    def evaluate_all(self, s, t) -> Tuple[LogSplit, LogSplit, LogSplit, LogSplit]:
        return self.evaluator(s, t)


def _same_arc(arc_i: ArcGeometry, arc_j: ArcGeometry, same_arc: Optional[bool]) -> bool:
    if same_arc is not None:
        return same_arc
    return arc_i is arc_j or arc_i == arc_j


def weak_kernel_split(medium: ElasticMedium, arc_i: ArcGeometry, arc_j: ArcGeometry,
                      same_arc: Optional[bool] = None) -> KernelSplit:
    """
    Log split of E(r_i(s), r_j(t)).

    Args:
        medium: Elastic medium
        arc_i: Test arc (variable s)
        arc_j: Trial arc (variable t)
        same_arc: Override of the identity test between the arcs

    Returns:
        KernelSplit evaluable on the diagonal when same_arc
    """
    same = _same_arc(arc_i, arc_j, same_arc)

    def evaluate(s, t) -> LogSplit:
        geom = pair_geometry(arc_i, arc_j, s, t, same)
        return _fundamental_split(medium, geom, _radial_splits(medium, geom))

    return KernelSplit(evaluator=evaluate, same_arc=same)


def _hyper_splits(medium: ElasticMedium, geom: PairGeometry) -> Tuple[LogSplit, LogSplit, LogSplit, LogSplit]:
    radial = _radial_splits(medium, geom)
    mu, rho_omega2 = medium.mu, medium.rho * medium.omega ** 2
    gamma_s = 0.25j * radial['h0_s']
    gamma_p = 0.25j * radial['h0_p']

    E = _fundamental_split(medium, geom, radial)
    G1 = 4.0 * mu ** 2 * E.sandwich(ROTATION, ROTATION) + (4.0 * mu) * gamma_s.outer(IDENTITY)

    # ∇_x(γ_s − γ_p) = −(i/4) h1_diff (x − y)
    rotated = geom.diff @ ROTATION.T
    G2 = (-0.5j * mu) * radial['h1_diff'].outer(rotated[..., :, None] * geom.nu_y[..., None, :])
    G3 = (0.5j * mu) * radial['h1_diff'].outer(geom.nu_x[..., :, None] * (geom.diff @ ROTATION)[..., None, :])

    nx_ny = geom.nu_x[..., :, None] * geom.nu_y[..., None, :]
    ny_nx = geom.nu_y[..., :, None] * geom.nu_x[..., None, :]
    dot = np.sum(geom.nu_x * geom.nu_y, axis=-1)[..., None, None]
    shear_part = 2.0 * nx_ny - ny_nx - dot * IDENTITY
    G4 = -rho_omega2 * (gamma_s.outer(shear_part) - gamma_p.outer(nx_ny))
    return G1, G2, G3, G4


def hyper_kernel_set(medium: ElasticMedium, arc_i: ArcGeometry, arc_j: ArcGeometry,
                     same_arc: Optional[bool] = None) -> HyperKernelSet:
    """
    Maue kernels G1..G4 for test arc i (s) and trial arc j (t):

        G1 = 4μ²[𝔸E𝔸 + γ_s/μ 𝕀]
        G2 = −2μ 𝔸 ∇_y[γ_s − γ_p] ν_yᵀ
        G3 = −2μ ν_x ∇_xᵀ[γ_s − γ_p] 𝔸
        G4 = −ρω²[γ_s(2ν_xν_yᵀ − ν_yν_xᵀ − ν_x·ν_y 𝕀) − γ_p ν_xν_yᵀ]
    """
    same = _same_arc(arc_i, arc_j, same_arc)

    def evaluate_all(s, t):
        return _hyper_splits(medium, pair_geometry(arc_i, arc_j, s, t, same))

    def pick(index: int) -> KernelSplit:
        return KernelSplit(evaluator=lambda s, t: evaluate_all(s, t)[index], same_arc=same)

    return HyperKernelSet(
        G1=pick(0), G2=pick(1), G3=pick(2), G4=pick(3),
        evaluator=evaluate_all,
        jacobian_placement=dict(HYPER_JACOBIANS),
    )


def hyper_form_kernels(kernel_set: HyperKernelSet, arc_i: ArcGeometry, arc_j: ArcGeometry,
                       s, t) -> Tuple[LogSplit, LogSplit, LogSplit, LogSplit]:
    """G1..G4 with their bilinear-form signs and arclength Jacobians applied"""
    jac_s = arc_i.jacobian(s)
    jac_t = arc_j.jacobian(t)
    folded = []
    for name, split in zip(('G1', 'G2', 'G3', 'G4'), kernel_set.evaluate_all(s, t)):
        on_s, on_t = kernel_set.jacobian_placement[name]
        factor = HYPER_FORM_SIGNS[name] * (jac_s if on_s else 1.0) * (jac_t if on_t else 1.0)
        folded.append(split.scaled(np.broadcast_to(factor, np.broadcast_shapes(np.shape(s), np.shape(t)))))
    return tuple(folded)


def _distance(x, y) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    diff = x - y
    r = np.linalg.norm(diff, axis=-1)
    if np.any(r == 0):
        raise SingularEvaluationError("Kernel evaluated at coincident points x = y")
    return diff, r


def helmholtz_fs(kappa: float, x, y):
    """γ_κ(x, y) = (i/4) H0(κ|x − y|)"""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    _, r = _distance(x, y)
    return 0.25j * hankel1(0, kappa * r)


def elastic_fundamental(medium: ElasticMedium, x, y) -> np.ndarray:
    """
    Fundamental displacement tensor E(x, y), shape (..., 2, 2).

    E = (i/4μ)H0(κ_s r)𝕀 − (i/(4ρω²r))[κ_sH1(κ_s r) − κ_pH1(κ_p r)]𝕀
        + (i/(4ρω²)) (x−y)(x−y)ᵀ/r² [κ_s²H2(κ_s r) − κ_p²H2(κ_p r)]
    """
    diff, r = _distance(x, y)
    ks, kp = medium.kappa_s, medium.kappa_p
    scale = 1j / (4.0 * medium.rho * medium.omega ** 2)
    a = 1j / (4.0 * medium.mu) * hankel1(0, ks * r) - scale * (ks * hankel1(1, ks * r) - kp * hankel1(1, kp * r)) / r
    b = scale * (ks ** 2 * hankel1(2, ks * r) - kp ** 2 * hankel1(2, kp * r))
    unit = diff / r[..., None]
    dyad = unit[..., :, None] * unit[..., None, :]
    return a[..., None, None] * IDENTITY + b[..., None, None] * dyad


def _fundamental_gradient(medium: ElasticMedium, diff: np.ndarray, r: np.ndarray) -> np.ndarray:
    """∂E_ab/∂d_c with d = x − y, shape (..., 2, 2, 2) indexed [a, b, c]"""
    ks, kp = medium.kappa_s, medium.kappa_p
    scale = 1j / (4.0 * medium.rho * medium.omega ** 2)

    def h(order, kappa):
        return hankel1(order, kappa * r)

    b = scale * (ks ** 2 * h(2, ks) - kp ** 2 * h(2, kp))
    da = (-1j * ks / (4.0 * medium.mu)) * h(1, ks)
    db = np.zeros_like(da)
    for sign, kappa in ((1.0, ks), (-1.0, kp)):
        da = da - sign * scale * (kappa ** 2 * h(0, kappa) / r - 2.0 * kappa * h(1, kappa) / r ** 2)
        db = db + sign * scale * kappa ** 3 * (h(1, kappa) - 2.0 * h(2, kappa) / (kappa * r))

    n = diff / r[..., None]
    eye = IDENTITY
    term_a = da[..., None, None, None] * eye[:, :, None] * n[..., None, None, :]
    term_b = db[..., None, None, None] * n[..., :, None, None] * n[..., None, :, None] * n[..., None, None, :]
    # ∂_c (n_a n_b) = [(δ_ac − n_a n_c) n_b + n_a (δ_bc − n_b n_c)] / r
    proj = eye - n[..., :, None] * n[..., None, :]  # (..., a, c)
    d_dyad = (proj[..., :, None, :] * n[..., None, :, None] + n[..., :, None, None] * proj[..., None, :, :])
    term_c = (b / r)[..., None, None, None] * d_dyad
    return term_a + term_b + term_c


def traction_of_fundamental(medium: ElasticMedium, x, y, normal_y) -> np.ndarray:
    """
    Traction T(∂_y, ν_y) applied to each column of E(x, y).

    Column k of the result is the traction of the displacement field
    y -> E(x, y) e_k, T = 2μ∂_ν + λν div − μν^⊥ curl with ν^⊥ = (−ν_2, ν_1).
    """
    diff, r = _distance(x, y)
    nu = np.broadcast_to(np.asarray(normal_y, dtype=float), diff.shape)
    # G[a, k, c] = ∂_{y_c} E_ak = −∂_{d_c} E_ak
    grad = -_fundamental_gradient(medium, diff, r)
    normal_derivative = np.einsum('...akc,...c->...ak', grad, nu)
    divergence = np.einsum('...bkb->...k', grad)
    curl = grad[..., 1, :, 0] - grad[..., 0, :, 1]
    nu_perp = np.stack([-nu[..., 1], nu[..., 0]], axis=-1)
    return (2.0 * medium.mu * normal_derivative
            + medium.lam * nu[..., :, None] * divergence[..., None, :]
            - medium.mu * nu_perp[..., :, None] * curl[..., None, :])
