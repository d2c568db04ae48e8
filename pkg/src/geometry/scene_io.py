#!/usr/bin/env python3
"""
Scene I/O - JSON scene files

Schema (version 1):
{
    "version": 1,
    "medium": {"lambda": 2.0, "mu": 1.0, "rho": 1.0, "omega": 50.0},
    "arcs": [
        {"kind": "line", "endpoint_a": [-1, 0], "endpoint_b": [1, 0]},
        {"kind": "circular_arc", "center": [0, 0], "radius": 1,
         "angle_start": 0, "angle_end": 3.14159},
        {"kind": "spiral", "scale": 1, "growth": 1, "turn_rate": 5},
        {"kind": "sine_arc", "a": 0.5, "b": 0, "c": 0.2, "d": 0,
         "beta": 3, "gamma": 0}
    ]
}
"""

import json
import logging
from pathlib import Path
from typing import Dict, Union

from errors import SceneFormatError
from .arcs import ARC_TYPES, ArcGeometry, ArcKind
from .medium import ElasticMedium
from .scene import Scene

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_ARC_FIELDS = {
    ArcKind.LINE: {'endpoint_a': 'point', 'endpoint_b': 'point'},
    ArcKind.CIRCULAR_ARC: {'center': 'point', 'radius': 'number',
                           'angle_start': 'number', 'angle_end': 'number'},
    ArcKind.SPIRAL: {'scale': 'number', 'growth': 'number', 'turn_rate': 'number'},
    ArcKind.SINE_ARC: {'a': 'number', 'b': 'number', 'c': 'number', 'd': 'number',
                       'beta': 'number', 'gamma': 'number'},
}
_OPTIONAL = {ArcKind.SPIRAL: {'scale': 1.0, 'growth': 1.0, 'turn_rate': 5.0}}


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneFormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _point(value, where: str):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise SceneFormatError(f"{where}: expected a 2-element list, got {value!r}")
    return (_number(value[0], f"{where}[0]"), _number(value[1], f"{where}[1]"))


def arc_from_dict(data: Dict, where: str = "arc") -> ArcGeometry:
    if not isinstance(data, dict):
        raise SceneFormatError(f"{where}: expected an object")
    try:
        kind = ArcKind(data.get('kind'))
    except ValueError:
        kinds = ', '.join(k.value for k in ArcKind)
        raise SceneFormatError(f"{where}.kind: unknown arc kind {data.get('kind')!r} (expected one of {kinds})")

    fields = _ARC_FIELDS[kind]
    unknown = set(data) - set(fields) - {'kind'}
    if unknown:
        raise SceneFormatError(f"{where}: unknown field(s) {sorted(unknown)} for kind '{kind.value}'")

    values = {}
    for name, field_type in fields.items():
        if name not in data:
            if name in _OPTIONAL.get(kind, {}):
                values[name] = _OPTIONAL[kind][name]
                continue
            raise SceneFormatError(f"{where}.{name}: missing field")
        parse = _point if field_type == 'point' else _number
        values[name] = parse(data[name], f"{where}.{name}")
    try:
        return ARC_TYPES[kind](**values)
    except ValueError as e:
        raise SceneFormatError(f"{where}: {e}")


def scene_from_dict(data: Dict) -> Scene:
    """Build a Scene from parsed JSON, raising SceneFormatError with field paths"""
    if not isinstance(data, dict):
        raise SceneFormatError("scene: expected a JSON object")
    if 'version' not in data:
        raise SceneFormatError("version: missing field")
    if data['version'] != SCHEMA_VERSION:
        raise SceneFormatError(f"version: unsupported schema version {data['version']!r}")

    medium_data = data.get('medium')
    if not isinstance(medium_data, dict):
        raise SceneFormatError("medium: missing or not an object")
    medium_values = {}
    for key, attr in (('lambda', 'lam'), ('mu', 'mu'), ('rho', 'rho'), ('omega', 'omega')):
        if key not in medium_data:
            raise SceneFormatError(f"medium.{key}: missing field")
        medium_values[attr] = _number(medium_data[key], f"medium.{key}")
    try:
        medium = ElasticMedium(**medium_values)
    except ValueError as e:
        raise SceneFormatError(f"medium: {e}")

    arcs_data = data.get('arcs')
    if not isinstance(arcs_data, list) or not arcs_data:
        raise SceneFormatError("arcs: expected a non-empty list")
    arcs = tuple(arc_from_dict(item, f"arcs[{k}]") for k, item in enumerate(arcs_data))
    return Scene(arcs=arcs, medium=medium)


def scene_to_dict(scene: Scene) -> Dict:
    return {
        'version': SCHEMA_VERSION,
        'medium': scene.medium.to_dict(),
        'arcs': [arc.to_dict() for arc in scene.arcs],
    }


def load_scene(path: Union[str, Path]) -> Scene:
    """
    Read a scene file.

    Raises:
        SceneFormatError: invalid JSON (with line/column) or schema violation
    """
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SceneFormatError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    scene = scene_from_dict(data)
    logger.info(f"Loaded scene {path}: {scene.size} arc(s), omega={scene.medium.omega}")
    return scene


def save_scene(scene: Scene, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(scene_to_dict(scene), indent=2, sort_keys=True) + "\n")
    return path
