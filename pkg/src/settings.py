#!/usr/bin/env python3
"""
Solver Settings - Layered configuration for the crack solver

Sources, in increasing priority:
1. Built-in defaults (SolverSettings fields)
2. YAML file (config/solver.yaml, --config or CRACK_SOLVER_CONFIG)
3. Environment variables, .env loaded with python-dotenv
4. Command-line flags
"""

import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import yaml
from dotenv import load_dotenv

from bie.assembly import AssemblyOptions

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / 'config' / 'solver.yaml'
CONFIG_ENV = 'CRACK_SOLVER_CONFIG'

# environment variable -> (setting, converter)
ENV_OVERRIDES = {
    'CRACK_SOLVER_THREADS': ('threads', int),
    'CRACK_SOLVER_LOG_LEVEL': ('log_level', str),
}

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


@dataclass(frozen=True)
class SolverSettings:
    """Numerical and runtime settings shared by all commands"""
    compression_tol: float = 1e-10       # cross-block drop threshold
    rhs_tol: float = 1e-12               # right-hand side expansion threshold
    expansion_tol: float = 1e-12         # kernel expansion threshold
    max_expansion_length: int = 2 ** 16
    max_grid_length: int = 4096
    symmetric_slice: bool = True
    quadrature_tol: float = 1e-10        # field quadrature agreement
    max_quadrature_order: int = 4096
    cutoff_factor: float = 1e-3          # near-arc mask, fraction of scene diameter
    overkill_margin: int = 60
    threads: int = 1
    log_level: str = 'INFO'

    def __post_init__(self):
        for name in ('compression_tol', 'rhs_tol', 'expansion_tol', 'quadrature_tol'):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.cutoff_factor < 0:
            raise ValueError("cutoff_factor must be non-negative")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        if self.max_expansion_length < 8 or self.max_grid_length < 8:
            raise ValueError("Expansion caps must be at least 8")
        level = str(self.log_level).upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {', '.join(LOG_LEVELS)}")
        object.__setattr__(self, 'log_level', level)

    def merged(self, overrides: Mapping[str, Any]) -> 'SolverSettings':
        """Copy with the non-None overrides applied"""
        known = {f.name: f for f in fields(self)}
        values = {}
        for key, value in overrides.items():
            if key not in known:
                raise ValueError(f"Unknown setting '{key}'")
            if value is not None:
                values[key] = _coerce(known[key].type, value)
        return replace(self, **values)

    def assembly_options(self) -> AssemblyOptions:
        return AssemblyOptions(
            expansion_tol=self.expansion_tol,
            max_expansion_length=self.max_expansion_length,
            max_grid_length=self.max_grid_length,
            symmetric_slice=self.symmetric_slice,
            threads=self.threads,
        )

    def to_dict(self) -> Dict:
        return asdict(self)


def _coerce(kind, value):
    name = kind if isinstance(kind, str) else getattr(kind, '__name__', str(kind))
    if name == 'bool' and isinstance(value, str):
        return value.strip().lower() in ('1', 'true', 'yes', 'on')
    if name == 'int':
        return int(value)
    if name == 'float':
        return float(value)
    if name == 'str':
        return str(value)
    return value


def read_yaml_settings(path: Union[str, Path]) -> Dict[str, Any]:
    """Mapping stored in a YAML settings file; an empty file gives {}"""
    path = Path(path)
    with open(path) as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError(f"Settings file {path} must contain a mapping")
    return data


def load_settings(config_path: Optional[Union[str, Path]] = None,
                  overrides: Optional[Mapping[str, Any]] = None,
                  env: Optional[Mapping[str, str]] = None,
                  use_dotenv: bool = True) -> SolverSettings:
    """
    Resolve settings from defaults, YAML, environment and explicit overrides.

    Args:
        config_path: YAML file; falls back to CRACK_SOLVER_CONFIG then config/solver.yaml
        overrides: Values from command-line flags (None entries ignored)
        env: Environment mapping (os.environ by default)
        use_dotenv: Load .env into the environment first

    Returns:
        SolverSettings

    Raises:
        ValueError: Unknown keys or invalid values
    """
    if use_dotenv and env is None:
        load_dotenv()
    env = os.environ if env is None else env

    settings = SolverSettings()
    path = config_path or env.get(CONFIG_ENV)
    if path is None and DEFAULT_CONFIG_PATH.exists():
        path = DEFAULT_CONFIG_PATH
    if path is not None:
        settings = settings.merged(read_yaml_settings(path))
        logger.debug(f"Loaded settings from {path}")

    from_env = {name: convert(env[var]) for var, (name, convert) in ENV_OVERRIDES.items() if var in env}
    settings = settings.merged(from_env)
    if overrides:
        settings = settings.merged(overrides)
    return settings
