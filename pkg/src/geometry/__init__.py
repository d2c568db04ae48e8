"""
Geometry Module

Analytic arcs, the elastic medium and multi-arc scenes.
"""

from .arcs import ArcGeometry, ArcKind, ArcSample, CircularArc, Line, SineArc, Spiral, arc_eval
from .medium import ElasticMedium
from .scene import (
    BUILTIN_SCENES,
    DEFAULT_MEDIUM,
    Scene,
    SceneReport,
    SineSceneRanges,
    builtin_scene,
    generate_sine_scene,
    scene_min_distance,
)
from .scene_io import load_scene, save_scene, scene_from_dict, scene_to_dict

__all__ = [
    'ArcGeometry',
    'ArcKind',
    'ArcSample',
    'CircularArc',
    'Line',
    'SineArc',
    'Spiral',
    'arc_eval',
    'ElasticMedium',
    'BUILTIN_SCENES',
    'DEFAULT_MEDIUM',
    'Scene',
    'SceneReport',
    'SineSceneRanges',
    'builtin_scene',
    'generate_sine_scene',
    'scene_min_distance',
    'load_scene',
    'save_scene',
    'scene_from_dict',
    'scene_to_dict',
]
