#!/usr/bin/env python3
"""
Scene - Collections of disjoint arcs in an elastic medium

Features:
- Sampled disjointness and speed checks with a report object
- Seeded generator for random sine-arc scenes on a staggered grid
- Built-in example scenes (segment, semicircle, spiral, sine arcs)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from errors import SceneGenerationError
from .arcs import SPEED_SAMPLES, ArcGeometry, CircularArc, Line, SineArc, Spiral
from .medium import ElasticMedium

logger = logging.getLogger(__name__)

DEFAULT_MEDIUM = ElasticMedium(lam=2.0, mu=1.0, rho=1.0, omega=50.0)


@dataclass(frozen=True)
class Scene:
    """Ordered arcs Γ_1..Γ_M and the surrounding medium"""
    arcs: Tuple[ArcGeometry, ...]
    medium: ElasticMedium

    def __post_init__(self):
        if len(self.arcs) == 0:
            raise ValueError("Scene must contain at least one arc")
        object.__setattr__(self, 'arcs', tuple(self.arcs))

    @property
    def size(self) -> int:
        return len(self.arcs)

    def diameter(self) -> float:
        points = np.concatenate([arc.sample() for arc in self.arcs])
        extent = points.max(axis=0) - points.min(axis=0)
        return float(np.hypot(*extent))

    def with_medium(self, medium: ElasticMedium) -> 'Scene':
        return Scene(arcs=self.arcs, medium=medium)

    def subset(self, count: int) -> 'Scene':
        return Scene(arcs=self.arcs[:count], medium=self.medium)

    def validate(self) -> 'SceneReport':
        """Check speed and disjointness; log a warning for suspicious scenes"""
        speeds = [arc.min_speed() for arc in self.arcs]
        min_distance = scene_min_distance(self)
        spacing = max(float(np.max(np.linalg.norm(np.diff(arc.sample(), axis=0), axis=1)))
                      for arc in self.arcs)
        report = SceneReport(
            arc_count=self.size,
            min_speed=min(speeds),
            min_distance=min_distance,
            sample_spacing=spacing,
            lengths=[arc.length() for arc in self.arcs],
            kappa_s=self.medium.kappa_s,
            kappa_p=self.medium.kappa_p,
        )
        if report.min_speed <= 0:
            report.issues.append("arc with vanishing speed")
        if min_distance <= spacing:
            report.issues.append(f"arcs closer than the sampling spacing ({min_distance:.3e} <= {spacing:.3e})")
        for issue in report.issues:
            logger.warning(f"Scene check: {issue}")
        return report


@dataclass
class SceneReport:
    """Result of Scene.validate()"""
    arc_count: int
    min_speed: float
    min_distance: float
    sample_spacing: float
    lengths: List[float]
    kappa_s: float
    kappa_p: float
    issues: List[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.issues

    def to_dict(self) -> Dict:
        return {
            'arc_count': self.arc_count,
            'min_speed': self.min_speed,
            'min_distance': None if np.isinf(self.min_distance) else self.min_distance,
            'sample_spacing': self.sample_spacing,
            'arc_lengths': self.lengths,
            'kappa_s': self.kappa_s,
            'kappa_p': self.kappa_p,
            'shear_wavelength': 2 * np.pi / self.kappa_s,
            'compressional_wavelength': 2 * np.pi / self.kappa_p,
            'valid': self.valid,
            'issues': list(self.issues),
        }


def _pair_distance(arc_a: ArcGeometry, arc_b: ArcGeometry, count: int = SPEED_SAMPLES) -> float:
    return float(cdist(arc_a.sample(count), arc_b.sample(count)).min())


def scene_min_distance(scene: Scene, count: int = SPEED_SAMPLES) -> float:
    """
    Minimum sampled distance between distinct arcs.

    Uses count points per arc, so the value is an approximation, not a
    certified bound. A single-arc scene returns +inf.
    """
    best = float('inf')
    for i in range(scene.size):
        for j in range(i + 1, scene.size):
            best = min(best, _pair_distance(scene.arcs[i], scene.arcs[j], count))
    return best


@dataclass(frozen=True)
class SineSceneRanges:
    """Sampling ranges for random sine arcs and their staggered layout"""
    a: Tuple[float, float] = (0.3, 0.8)
    c: Tuple[float, float] = (0.1, 0.4)
    beta: Tuple[float, float] = (1.0, 6.0)
    gamma: Tuple[float, float] = (0.0, 2 * np.pi)
    spacing_x: float = 2.0
    spacing_y: float = 1.2
    min_gap: float = 0.05
    max_retries: int = 100

    def __post_init__(self):
        for name in ('a', 'c', 'beta', 'gamma'):
            low, high = getattr(self, name)
            if high < low:
                raise ValueError(f"Range for {name} is empty")
        if self.a[0] <= 0:
            raise ValueError("Range for a must be positive")
        if self.spacing_x <= 0 or self.spacing_y <= 0:
            raise ValueError("Grid spacing must be positive")
        if self.max_retries < 1:
            raise ValueError("max_retries must be positive")


def generate_sine_scene(count: int, seed: int,
                        ranges: Optional[SineSceneRanges] = None,
                        medium: ElasticMedium = DEFAULT_MEDIUM) -> Scene:
    """
    Random scene of sine arcs x = a t + b, y = c sin(β t + γ) + d.

    Arc k sits in slot (row, col) of a staggered grid, filled bottom to top
    and left to right, so b and d are set by the slot and a, c, β, γ are
    drawn. A draw closer than min_gap to earlier arcs is redrawn.

    Args:
        count: Number of arcs
        seed: Seed of the numpy generator
        ranges: Sampling ranges and layout
        medium: Medium attached to the scene

    Returns:
        Scene with arcs in generation order

    Raises:
        SceneGenerationError: a slot could not be filled within max_retries
    """
    if count < 1:
        raise ValueError("count must be positive")
    ranges = ranges or SineSceneRanges()
    rng = np.random.default_rng(seed)
    columns = int(np.ceil(np.sqrt(count)))

    arcs: List[SineArc] = []
    for k in range(count):
        row, col = divmod(k, columns)
        b = col * ranges.spacing_x + (row % 2) * 0.5 * ranges.spacing_x
        d = row * ranges.spacing_y
        for attempt in range(ranges.max_retries):
            draw = {name: float(rng.uniform(*getattr(ranges, name))) for name in ('a', 'c', 'beta', 'gamma')}
            candidate = SineArc(a=draw['a'], b=b, c=draw['c'], d=d, beta=draw['beta'], gamma=draw['gamma'])
            if all(_pair_distance(candidate, other) > ranges.min_gap for other in arcs):
                arcs.append(candidate)
                break
            logger.debug(f"Sine arc {k} draw {attempt} rejected: too close to existing arcs")
        else:
            raise SceneGenerationError(
                f"Could not place sine arc {k} after {ranges.max_retries} draws (last draw {draw}, b={b}, d={d})")

    logger.info(f"Generated sine scene: {count} arcs, seed={seed}")
    return Scene(arcs=tuple(arcs), medium=medium)


def builtin_scene(name: str, medium: ElasticMedium = DEFAULT_MEDIUM, seed: int = 0) -> Scene:
    """
    Named example scenes.

    line: segment (-1,0)-(1,0); semicircle: unit upper half circle;
    spiral: e^t(cos 5t, sin 5t); sine28 / sine10: seeded sine-arc scenes.
    """
    if name == 'line':
        arcs = (Line((-1.0, 0.0), (1.0, 0.0)),)
    elif name == 'semicircle':
        arcs = (CircularArc(center=(0.0, 0.0), radius=1.0, angle_start=0.0, angle_end=np.pi),)
    elif name == 'spiral':
        arcs = (Spiral(),)
    elif name == 'sine28':
        return generate_sine_scene(28, seed, medium=medium)
    elif name == 'sine10':
        return generate_sine_scene(28, seed, medium=medium).subset(10)
    else:
        raise ValueError(f"Unknown built-in scene '{name}' (expected line, semicircle, spiral, sine28, sine10)")
    return Scene(arcs=arcs, medium=medium)


BUILTIN_SCENES = ('line', 'semicircle', 'spiral', 'sine28', 'sine10')
