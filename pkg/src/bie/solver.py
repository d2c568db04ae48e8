#!/usr/bin/env python3
"""
Solver - Dense LU solve, density coefficients and convergence studies

Features:
- LU factorization with partial pivoting (scipy.linalg) and residual report
- Coefficient-space Sobolev norms for both problems
- Convergence studies against an overkill reference with exponential-rate fit
"""

import json
import logging
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from scipy import stats

from errors import CrackSolverError, SingularSystemError
from geometry.scene import Scene
from .assembly import AssemblyOptions, GalerkinSystem, IncidentWave, ProblemKind, assemble_system

logger = logging.getLogger(__name__)

# smallest |U_ii| / max |U_ii| accepted from the factorization
PIVOT_RATIO_FLOOR = 1e-14
# errors at or above this level belong to the pre-asymptotic range
PREASYMPTOTIC_CUTOFF = 1e-2
# consecutive errors must shrink by this factor to stay in the fitted range
PLATEAU_DROP = 10.0
MIN_OVERKILL_MARGIN = 40


@dataclass
class DensitySolution:
    """
    Density coefficients, shape (M, N+1, 2).

    Dirichlet: φ_i∘r_i |r_i'| = Σ_l,p a[i, l, p] w⁻¹T_l e_p
    Neumann:   ψ_i∘r_i = Σ_l,p b[i, l, p] w U_l e_p
    """
    problem: ProblemKind
    N: int
    coeffs: np.ndarray
    residual: float = 0.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 3 or self.coeffs.shape[1:] != (self.N + 1, 2):
            raise ValueError(f"Coefficient array must have shape (M, {self.N + 1}, 2), got {self.coeffs.shape}")

    @property
    def arc_count(self) -> int:
        return self.coeffs.shape[0]

    @classmethod
    def from_vector(cls, problem: ProblemKind, N: int, vector: np.ndarray, residual: float = 0.0) -> 'DensitySolution':
        return cls(problem=problem, N=N, coeffs=np.asarray(vector).reshape(-1, N + 1, 2), residual=residual)

    def padded(self, N: int) -> 'DensitySolution':
        """Zero-pad the coefficient vectors to degree N >= self.N"""
        if N < self.N:
            raise ValueError(f"Cannot pad degree {self.N} down to {N}")
        coeffs = np.zeros((self.arc_count, N + 1, 2), dtype=complex)
        coeffs[:, :self.N + 1] = self.coeffs
        return DensitySolution(problem=self.problem, N=N, coeffs=coeffs, residual=self.residual)

    def _check_compatible(self, other: 'DensitySolution'):
        if other.problem is not self.problem:
            raise ValueError(f"Cannot combine {self.problem.value} and {other.problem.value} solutions")
        if other.arc_count != self.arc_count:
            raise ValueError("Solutions belong to scenes with different arc counts")

    def __sub__(self, other: 'DensitySolution') -> 'DensitySolution':
        self._check_compatible(other)
        N = max(self.N, other.N)
        return DensitySolution(self.problem, N, self.padded(N).coeffs - other.padded(N).coeffs)

    def __add__(self, other: 'DensitySolution') -> 'DensitySolution':
        self._check_compatible(other)
        N = max(self.N, other.N)
        return DensitySolution(self.problem, N, self.padded(N).coeffs + other.padded(N).coeffs)

    def to_dict(self) -> Dict:
        return {
            'problem': self.problem.value,
            'N': self.N,
            'residual': self.residual,
            'arcs': [
                {'real': self.coeffs[i].real.tolist(), 'imag': self.coeffs[i].imag.tolist()}
                for i in range(self.arc_count)
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'DensitySolution':
        try:
            coeffs = np.array([np.asarray(arc['real']) + 1j * np.asarray(arc['imag']) for arc in data['arcs']])
            return cls(problem=ProblemKind(data['problem']), N=int(data['N']), coeffs=coeffs,
                       residual=float(data.get('residual', 0.0)))
        except (KeyError, TypeError) as e:
            raise ValueError(f"Invalid solution data: {e}")

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), sort_keys=True) + "\n")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'DensitySolution':
        return cls.from_dict(json.loads(Path(path).read_text()))


def solve(system: GalerkinSystem) -> DensitySolution:
    """
    Direct LU solve of the assembled system.

    Returns:
        DensitySolution carrying the relative residual ‖Ax − b‖/‖b‖

    Raises:
        SingularSystemError: zero or negligible pivot; carries max|U|/max|A|
    """
    matrix = system.to_dense()
    with warnings.catch_warnings():
        warnings.simplefilter('error', scipy.linalg.LinAlgWarning)
        try:
            lu, piv = scipy.linalg.lu_factor(matrix)
        except (scipy.linalg.LinAlgWarning, scipy.linalg.LinAlgError, ValueError) as e:
            raise SingularSystemError(f"LU factorization failed: {e}")

    scale = float(np.abs(matrix).max()) if matrix.size else 0.0
    growth = float(np.abs(np.triu(lu)).max()) / scale if scale > 0 else float('inf')
    pivots = np.abs(np.diag(lu))
    if pivots.size == 0 or pivots.max() == 0 or pivots.min() / pivots.max() < PIVOT_RATIO_FLOOR:
        raise SingularSystemError(
            f"Numerically singular system (N={system.N}): pivot ratio "
            f"{(pivots.min() / pivots.max()) if pivots.size and pivots.max() > 0 else 0.0:.2e}, "
            f"pivot growth {growth:.2e}; N may be below the solvability threshold or the scene invalid",
            pivot_growth=growth,
        )

    x = scipy.linalg.lu_solve((lu, piv), system.rhs)
    rhs_norm = np.linalg.norm(system.rhs)
    residual = float(np.linalg.norm(matrix @ x - system.rhs) / (rhs_norm if rhs_norm > 0 else 1.0))
    logger.info(f"Solved {system.problem.value} system N={system.N}: residual {residual:.2e}")
    return DensitySolution.from_vector(system.problem, system.N, x, residual=residual)


def sobolev_norm(solution: DensitySolution) -> float:
    """
    √(Σ (1 + l²)^{±1/2} |c_l|²) over arcs and components.

    The exponent is −1/2 for Dirichlet (T-basis coefficients) and +1/2 for
    Neumann (U-basis coefficients).
    """
    exponent = -0.5 if solution.problem is ProblemKind.DIRICHLET else 0.5
    l = np.arange(solution.N + 1)
    weights = (1.0 + l ** 2) ** exponent
    return float(np.sqrt(np.sum(weights[None, :, None] * np.abs(solution.coeffs) ** 2)))


@dataclass
class StudyEntry:
    """One degree of a convergence study"""
    N: int
    error: Optional[float]
    residual: Optional[float]
    nnz_fraction: Optional[float]
    status: str = "ok"
    message: str = ""

    def to_dict(self) -> Dict:
        return {'N': self.N, 'error': self.error, 'residual': self.residual,
                'nnz_fraction': self.nnz_fraction, 'status': self.status, 'message': self.message}


@dataclass
class ConvergenceReport:
    """Errors against the reference plus the fitted exponential rate"""
    problem: ProblemKind
    reference_degree: int
    entries: List[StudyEntry]
    rate: Optional[float] = None
    slope: Optional[float] = None
    correlation: Optional[float] = None
    fit_start: Optional[int] = None
    fit_end: Optional[int] = None
    reference_residual: Optional[float] = None
    reference_message: str = ""
    timings: Dict[str, Dict[str, float]] = field(default_factory=dict)

    @property
    def reference_ok(self) -> bool:
        return self.reference_residual is not None

    def errors(self) -> List[Optional[float]]:
        return [entry.error for entry in self.entries]

    def to_dict(self) -> Dict:
        return {
            'problem': self.problem.value,
            'reference_degree': self.reference_degree,
            'reference_status': 'ok' if self.reference_ok else 'failed',
            'reference_message': self.reference_message,
            'reference_residual': self.reference_residual,
            'entries': [entry.to_dict() for entry in self.entries],
            'fit': {'rate': self.rate, 'slope_log10': self.slope, 'correlation': self.correlation,
                    'fit_start_N': self.fit_start, 'fit_end_N': self.fit_end},
            'timings': self.timings,
        }


def fit_exponential_rate(degrees: Sequence[int], errors: Sequence[Optional[float]],
                         cutoff: float = PREASYMPTOTIC_CUTOFF,
                         plateau_drop: float = PLATEAU_DROP) -> Dict[str, Optional[float]]:
    """
    Least-squares line through (N, log10 error) over the decaying range.

    The range starts at the first error below cutoff and ends before the
    first error that is not at least plateau_drop times smaller than its
    predecessor (the round-off plateau).

    Returns:
        Dict with rate ϱ̂ (error ~ ϱ̂^{−N}), slope, correlation and the first
        and last N used
    """
    points = [(n, e) for n, e in zip(degrees, errors) if e is not None and e > 0]
    start = next((k for k, (_, e) in enumerate(points) if e < cutoff), None)
    result = {'rate': None, 'slope': None, 'correlation': None, 'fit_start': None, 'fit_end': None}
    if start is None:
        return result
    end = start + 1
    while end < len(points) and points[end][1] * plateau_drop <= points[end - 1][1]:
        end += 1
    if end - start < 2:
        return result
    n, e = zip(*points[start:end])
    fit = stats.linregress(np.asarray(n, dtype=float), np.log10(np.asarray(e)))
    result.update(rate=float(10.0 ** (-fit.slope)), slope=float(fit.slope),
                  correlation=float(fit.rvalue), fit_start=int(n[0]), fit_end=int(n[-1]))
    return result


class ConvergenceStudy:
    """
    Solves a scene at several degrees and measures errors against a
    reference solution of degree max(N_list) + overkill_margin (or an
    explicit reference_degree).

    Failed solves, including a failed reference, are recorded in the report
    instead of aborting the study.
    """

    def __init__(self, problem: ProblemKind, scene: Scene, wave: IncidentWave, N_list: Sequence[int],
                 overkill_margin: int = 60, tol: float = 1e-10, options: Optional[AssemblyOptions] = None,
                 rhs_tol: float = 1e-12, reference_degree: Optional[int] = None):
        N_list = [int(n) for n in N_list]
        if not N_list:
            raise ValueError("N_list must not be empty")
        if any(b <= a for a, b in zip(N_list, N_list[1:])):
            raise ValueError("N_list must be strictly ascending")
        if reference_degree is None:
            if overkill_margin < MIN_OVERKILL_MARGIN:
                raise ValueError(f"overkill_margin must be at least {MIN_OVERKILL_MARGIN}")
            reference_degree = N_list[-1] + overkill_margin
        elif reference_degree < N_list[-1]:
            raise ValueError("reference_degree must not be below max(N_list)")

        self.problem = problem
        self.scene = scene
        self.wave = wave
        self.N_list = N_list
        self.reference_degree = reference_degree
        self.tol = tol
        self.options = options or AssemblyOptions()
        self.rhs_tol = rhs_tol
        self._timings: Dict[str, Dict[str, float]] = {}

        logger.info(f"Convergence study: {problem.value}, N={N_list}, reference N={reference_degree}")

    def _solve_at(self, N: int) -> Tuple[float, DensitySolution]:
        """nnz fraction and solution at degree N"""
        start = time.perf_counter()
        system = assemble_system(self.problem, self.scene, self.wave, N, tol=self.tol,
                                 options=self.options, rhs_tol=self.rhs_tol)
        solved = time.perf_counter()
        solution = solve(system)
        self._timings[str(N)] = {'assembly_seconds': solved - start,
                                 'solve_seconds': time.perf_counter() - solved}
        return system.nnz_fraction, solution

    def _reference(self, solved: Dict[int, Tuple[float, DensitySolution]]) -> Tuple[Optional[DensitySolution], str]:
        if self.reference_degree in solved:
            return solved[self.reference_degree][1], ""
        try:
            return self._solve_at(self.reference_degree)[1], ""
        except CrackSolverError as e:
            logger.error(f"  Reference N={self.reference_degree}: failed ({e})")
            return None, str(e)

    def run(self) -> ConvergenceReport:
        solved: Dict[int, Tuple[float, DensitySolution]] = {}
        failures: Dict[int, str] = {}
        for N in self.N_list:
            try:
                solved[N] = self._solve_at(N)
            except CrackSolverError as e:
                logger.warning(f"  N={N}: failed ({e})")
                failures[N] = str(e)

        reference, reference_message = self._reference(solved)
        entries: List[StudyEntry] = []
        for N in self.N_list:
            if N in failures:
                entries.append(StudyEntry(N=N, error=None, residual=None, nnz_fraction=None,
                                          status="failed", message=failures[N]))
                continue
            nnz, solution = solved[N]
            if reference is None:
                entries.append(StudyEntry(N=N, error=None, residual=solution.residual, nnz_fraction=nnz,
                                          status="failed", message=f"reference failed: {reference_message}"))
                continue
            error = sobolev_norm(solution.padded(self.reference_degree) - reference)
            entries.append(StudyEntry(N=N, error=error, residual=solution.residual, nnz_fraction=nnz))
            logger.info(f"  N={N}: error {error:.3e}")

        fit = fit_exponential_rate([e.N for e in entries], [e.error for e in entries])
        report = ConvergenceReport(
            problem=self.problem,
            reference_degree=self.reference_degree,
            entries=entries,
            rate=fit['rate'],
            slope=fit['slope'],
            correlation=fit['correlation'],
            fit_start=fit['fit_start'],
            fit_end=fit['fit_end'],
            reference_residual=None if reference is None else reference.residual,
            reference_message=reference_message,
            timings=dict(self._timings),
        )
        if report.rate is not None:
            logger.info(f"Fitted rate {report.rate:.4f} (correlation {report.correlation:.4f})")
        return report


def convergence_study(problem: ProblemKind, scene: Scene, wave: IncidentWave, N_list: Sequence[int],
                      overkill_margin: int = 60, tol: float = 1e-10,
                      options: Optional[AssemblyOptions] = None, rhs_tol: float = 1e-12,
                      reference_degree: Optional[int] = None) -> ConvergenceReport:
    """Run a ConvergenceStudy and return its report"""
    return ConvergenceStudy(problem, scene, wave, N_list, overkill_margin=overkill_margin, tol=tol,
                            options=options, rhs_tol=rhs_tol, reference_degree=reference_degree).run()
