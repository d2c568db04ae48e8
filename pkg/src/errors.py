#!/usr/bin/env python3
"""
Solver Errors - Exception hierarchy and CLI exit codes

Every failure raised by the numerical layers derives from CrackSolverError
and carries the exit code the command-line front end reports for it.
"""

from enum import Enum
from typing import Optional, Tuple


class ExitCode(Enum):
    """Machine-readable process exit codes"""
    OK = 0
    INTERNAL = 1
    USAGE = 2
    SCENE_INVALID = 3
    NUMERICAL = 4
    IO = 5


class CrackSolverError(Exception):
    """Base class for all solver failures"""
    exit_code = ExitCode.INTERNAL


class DomainError(CrackSolverError, ValueError):
    """Evaluation requested outside the domain of a function (|t| > 1, x < 0)"""
    exit_code = ExitCode.USAGE


class ExpansionError(CrackSolverError):
    """Adaptive Chebyshev expansion did not converge before its length cap"""
    exit_code = ExitCode.NUMERICAL

    def __init__(self, message: str, tail_magnitude: float = float('nan')):
        super().__init__(message)
        self.tail_magnitude = tail_magnitude


class SingularEvaluationError(CrackSolverError):
    """Kernel or Hankel function evaluated at its singular point"""
    exit_code = ExitCode.NUMERICAL


class AssemblyError(CrackSolverError):
    """A Galerkin block failed; carries the (test arc, trial arc) pair"""
    exit_code = ExitCode.NUMERICAL

    def __init__(self, message: str, pair: Optional[Tuple[int, int]] = None):
        super().__init__(message)
        self.pair = pair


class SingularSystemError(CrackSolverError):
    """LU factorization is numerically singular"""
    exit_code = ExitCode.NUMERICAL

    def __init__(self, message: str, pivot_growth: float = float('nan')):
        super().__init__(message)
        self.pivot_growth = pivot_growth


class MaskedPointError(CrackSolverError):
    """Field point too close to an arc or quadrature cap exceeded"""
    exit_code = ExitCode.NUMERICAL


class SceneFormatError(CrackSolverError):
    """Scene file does not follow the documented JSON schema"""
    exit_code = ExitCode.SCENE_INVALID


class SceneGenerationError(CrackSolverError):
    """Random sine-arc scene could not be completed within the retry budget"""
    exit_code = ExitCode.SCENE_INVALID
