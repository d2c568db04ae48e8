#!/usr/bin/env python3
"""
Arc Geometry - Analytic open-arc parametrizations on [-1, 1]

Each arc provides r(t) and its first three derivatives in closed form. All
methods are vectorized: t of shape (...) gives points of shape (..., 2).
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Dict, NamedTuple, Tuple

import numpy as np
from scipy import integrate

from errors import DomainError

logger = logging.getLogger(__name__)

_DOMAIN_SLACK = 1e-14
SPEED_SAMPLES = 257


class ArcKind(Enum):
    """Supported parametrization families"""
    LINE = "line"
    CIRCULAR_ARC = "circular_arc"
    SPIRAL = "spiral"
    SINE_ARC = "sine_arc"


class ArcSample(NamedTuple):
    """Point data of an arc at parameter t"""
    point: np.ndarray
    velocity: np.ndarray
    normal: np.ndarray
    jacobian: np.ndarray


def _check_parameter(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + _DOMAIN_SLACK):
        raise DomainError(f"Arc parameter outside [-1, 1]: max |t| = {np.max(np.abs(t))}")
    return t


class ArcGeometry(ABC):
    """Base class for an analytic arc r: [-1, 1] -> R²"""

    kind: ArcKind

    @abstractmethod
    def derivative(self, t, order: int = 0) -> np.ndarray:
        """r^{(order)}(t) for order 0..3, shape t.shape + (2,)"""

    @abstractmethod
    def params(self) -> Dict:
        """JSON-ready parameters (without the kind tag)"""

    def point(self, t) -> np.ndarray:
        return self.derivative(t, 0)

    def velocity(self, t) -> np.ndarray:
        return self.derivative(t, 1)

    def jacobian(self, t) -> np.ndarray:
        return np.linalg.norm(self.derivative(t, 1), axis=-1)

    def normal(self, t) -> np.ndarray:
        v = self.derivative(t, 1)
        return np.stack([v[..., 1], -v[..., 0]], axis=-1) / np.linalg.norm(v, axis=-1)[..., None]

    def sample(self, count: int = SPEED_SAMPLES) -> np.ndarray:
        """Points on a uniform parameter grid including the endpoints"""
        return self.point(np.linspace(-1.0, 1.0, count))

    def min_speed(self, count: int = SPEED_SAMPLES) -> float:
        return float(self.jacobian(np.linspace(-1.0, 1.0, count)).min())

    def length(self, count: int = SPEED_SAMPLES) -> float:
        """Arclength by the trapezoid rule on the sampling grid"""
        t = np.linspace(-1.0, 1.0, count)
        return float(integrate.trapezoid(self.jacobian(t), t))

    def to_dict(self) -> Dict:
        return {'kind': self.kind.value, **self.params()}


def _complex_to_plane(z: np.ndarray) -> np.ndarray:
    return np.stack([z.real, z.imag], axis=-1)


@dataclass(frozen=True)
class Line(ArcGeometry):
    """Segment from endpoint_a (t = -1) to endpoint_b (t = 1)"""
    endpoint_a: Tuple[float, float]
    endpoint_b: Tuple[float, float]
    kind = ArcKind.LINE

    def __post_init__(self):
        if np.allclose(self.endpoint_a, self.endpoint_b):
            raise ValueError("Line endpoints must be distinct")

    def derivative(self, t, order: int = 0) -> np.ndarray:
        t = _check_parameter(t)
        a = np.asarray(self.endpoint_a, dtype=float)
        b = np.asarray(self.endpoint_b, dtype=float)
        if order == 0:
            return 0.5 * (a + b) + t[..., None] * 0.5 * (b - a)
        if order == 1:
            return np.broadcast_to(0.5 * (b - a), t.shape + (2,)).copy()
        return np.zeros(t.shape + (2,))

    def params(self) -> Dict:
        return {'endpoint_a': list(self.endpoint_a), 'endpoint_b': list(self.endpoint_b)}


@dataclass(frozen=True)
class CircularArc(ArcGeometry):
    """center + radius (cos θ, sin θ), θ running linearly from angle_start to angle_end"""
    center: Tuple[float, float]
    radius: float
    angle_start: float
    angle_end: float
    kind = ArcKind.CIRCULAR_ARC

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.angle_start == self.angle_end:
            raise ValueError("angle_start and angle_end must differ")
        if abs(self.angle_end - self.angle_start) >= 2 * np.pi:
            raise ValueError("Circular arc must be open (angular span below 2π)")

    def derivative(self, t, order: int = 0) -> np.ndarray:
        t = _check_parameter(t)
        rate = 0.5 * (self.angle_end - self.angle_start)
        theta = self.angle_start + rate * (t + 1.0)
        z = (1j * rate) ** order * self.radius * np.exp(1j * theta)
        if order == 0:
            z = z + complex(*self.center)
        return _complex_to_plane(z)

    def params(self) -> Dict:
        return {'center': list(self.center), 'radius': self.radius,
                'angle_start': self.angle_start, 'angle_end': self.angle_end}


@dataclass(frozen=True)
class Spiral(ArcGeometry):
    """scale · e^{growth t} (cos(turn_rate t), sin(turn_rate t))"""
    scale: float = 1.0
    growth: float = 1.0
    turn_rate: float = 5.0
    kind = ArcKind.SPIRAL

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.growth == 0 and self.turn_rate == 0:
            raise ValueError("Spiral needs a nonzero growth or turn rate")

    def derivative(self, t, order: int = 0) -> np.ndarray:
        t = _check_parameter(t)
        c = complex(self.growth, self.turn_rate)
        return _complex_to_plane(self.scale * c ** order * np.exp(c * t))

    def params(self) -> Dict:
        return {'scale': self.scale, 'growth': self.growth, 'turn_rate': self.turn_rate}


@dataclass(frozen=True)
class SineArc(ArcGeometry):
    """x(t) = a t + b, y(t) = c sin(beta t + gamma) + d"""
    a: float
    b: float
    c: float
    d: float
    beta: float
    gamma: float
    kind = ArcKind.SINE_ARC

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("Sine arc horizontal rate a must be nonzero")

    def derivative(self, t, order: int = 0) -> np.ndarray:
        t = _check_parameter(t)
        phase = self.beta * t + self.gamma + order * np.pi / 2
        y = self.c * self.beta ** order * np.sin(phase)
        if order == 0:
            x = self.a * t + self.b
            y = y + self.d
        elif order == 1:
            x = np.full_like(t, self.a)
        else:
            x = np.zeros_like(t)
        return np.stack([x, y], axis=-1)

    def params(self) -> Dict:
        return {'a': self.a, 'b': self.b, 'c': self.c, 'd': self.d,
                'beta': self.beta, 'gamma': self.gamma}


ARC_TYPES = {
    ArcKind.LINE: Line,
    ArcKind.CIRCULAR_ARC: CircularArc,
    ArcKind.SPIRAL: Spiral,
    ArcKind.SINE_ARC: SineArc,
}


def arc_eval(arc: ArcGeometry, t) -> ArcSample:
    """
    Point, velocity, unit normal and Jacobian of an arc.

    The normal is (r_2', -r_1') / |r'|.

    Raises:
        DomainError: |t| > 1
    """
    t = _check_parameter(t)
    velocity = arc.derivative(t, 1)
    jacobian = np.linalg.norm(velocity, axis=-1)
    normal = np.stack([velocity[..., 1], -velocity[..., 0]], axis=-1) / jacobian[..., None]
    return ArcSample(point=arc.derivative(t, 0), velocity=velocity, normal=normal, jacobian=jacobian)
