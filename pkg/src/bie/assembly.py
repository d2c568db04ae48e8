#!/usr/bin/env python3
"""
Galerkin Assembly - Matrices and right-hand sides for the arc BIEs

Block (i, j) couples test arc i with trial arc j. Rows are ordered
(test mode l, test component q) as 2l + q and columns (trial mode m, trial
component p) as 2m + p, i.e. mode-major, component-minor.

Every block reduces to integrals

    B[a, b] = ∬ K(s, t) w⁻¹T_b(t) w⁻¹T_a(s) dt ds

of a log-split kernel K = log|s-t| J + R. With J and R expanded in tensor
Chebyshev series, the regular part gives γ_a γ_b R[a, b] and the log part
is a finite sum over the log-kernel coefficients c_n.

Features:
- Adaptive 2D expansion of all kernel components on one grid per block
- Weighted second-kind basis reduced to w⁻¹T form by index identities
- Threshold compression of cross-arc blocks stored as CSR
- Block-parallel assembly on a thread pool
"""

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from errors import AssemblyError, CrackSolverError
from geometry.arcs import ArcGeometry, arc_eval
from geometry.medium import ElasticMedium
from geometry.scene import Scene
from spectral.chebyshev import (
    DEFAULT_MAX_GRID_LENGTH,
    DEFAULT_MAX_LENGTH,
    LogKernelCoeffs,
    adaptive_expand,
    adaptive_expand_2d,
    quadrature_weight,
    weighted_u_derivative_matrix,
    weighted_u_matrix,
)
from .kernels import hyper_form_kernels, hyper_kernel_set, weak_kernel_split

logger = logging.getLogger(__name__)

BlockMatrix = Union[np.ndarray, sparse.csr_matrix]


class ProblemKind(Enum):
    """Boundary condition on the arcs"""
    DIRICHLET = "dirichlet"  # weakly-singular V, traction-jump density
    NEUMANN = "neumann"      # hyper-singular W, displacement-jump density


@dataclass(frozen=True)
class IncidentWave:
    """Compressional plane wave P(x) = d e^{iκ_p x·d}, d = (cos α, sin α)"""
    alpha: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.alpha):
            raise ValueError("alpha must be finite")
        object.__setattr__(self, 'alpha', float(np.mod(self.alpha, 2 * np.pi)))

    @property
    def direction(self) -> np.ndarray:
        return np.array([np.cos(self.alpha), np.sin(self.alpha)])

    def displacement(self, medium: ElasticMedium, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d = self.direction
        phase = np.exp(1j * medium.kappa_p * (x @ d))
        return phase[..., None] * d

    def traction(self, medium: ElasticMedium, x, normal) -> np.ndarray:
        """T(∂, ν)P = iκ_p e^{iκ_p x·d} [2μ(ν·d)d + λν]; curl P vanishes"""
        x = np.asarray(x, dtype=float)
        normal = np.asarray(normal, dtype=float)
        d = self.direction
        phase = np.exp(1j * medium.kappa_p * (x @ d))
        nu_d = normal @ d
        return (1j * medium.kappa_p * phase)[..., None] * (
            2.0 * medium.mu * nu_d[..., None] * d + medium.lam * normal)


@dataclass(frozen=True)
class AssemblyOptions:
    """Numerical knobs shared by all blocks"""
    expansion_tol: float = 1e-12
    max_expansion_length: int = DEFAULT_MAX_LENGTH
    max_grid_length: int = DEFAULT_MAX_GRID_LENGTH
    symmetric_slice: bool = True
    threads: int = 1
    compress: bool = True

    def __post_init__(self):
        if self.expansion_tol <= 0:
            raise ValueError("expansion_tol must be positive")
        if self.threads < 1:
            raise ValueError("threads must be positive")


def singular_integrals(log_coeffs: np.ndarray, size: int) -> np.ndarray:
    """
    ∬ log|s-t| J(s,t) w⁻¹T_b(t) w⁻¹T_a(s) for a, b < size.

    With log|s-t| = Σ c_n T_n(s)T_n(t) and T_nT_l = ½(T_{n+l} + T_{|n-l|}),
    the entry is Σ_n (c_n/4) Σ γ_α γ_β J[α, β] over α ∈ {n+a, |n-a|},
    β ∈ {n+b, |n-b|}. Terms vanish once |n - a| reaches the length of J, so
    n runs up to len(J) + size - 2.

    Args:
        log_coeffs: Chebyshev coefficients of J, shape (nJ, nJ, ...)
        size: Number of modes a, b

    Returns:
        Array of shape (size, size, ...)
    """
    n_j = log_coeffs.shape[0]
    n_terms = n_j + size - 1
    padded = n_j + 2 * size
    weights = quadrature_weight(np.arange(n_j))
    extra = (1,) * (log_coeffs.ndim - 2)
    weighted = np.zeros((padded, padded) + log_coeffs.shape[2:], dtype=complex)
    weighted[:n_j, :n_j] = log_coeffs * (weights[:, None] * weights[None, :]).reshape((n_j, n_j) + extra)

    c = LogKernelCoeffs.build(n_terms).expansion_c
    modes = np.arange(size)
    out = np.zeros((size, size) + log_coeffs.shape[2:], dtype=complex)
    for n in range(n_terms):
        plus = n + modes
        minus = np.abs(n - modes)
        out += 0.25 * c[n] * (weighted[np.ix_(minus, minus)] + weighted[np.ix_(plus, minus)]
                              + weighted[np.ix_(minus, plus)] + weighted[np.ix_(plus, plus)])
    return out


def _stacked_splits(evaluate: Callable, same_arc: bool) -> Callable:
    """Grid function returning [J_1..J_K, R_1..R_K] (same arc) or [R_1..R_K]"""
    def g(s, t):
        splits = evaluate(s, t)
        parts = [split.log_coeff for split in splits] if same_arc else []
        parts += [split.regular for split in splits]
        return np.stack([np.broadcast_to(part, np.shape(s) + (2, 2)) for part in parts], axis=-3)
    return g


def _kernel_integrals(evaluate: Callable, count: int, same_arc: bool, size: int,
                      options: AssemblyOptions) -> Tuple[List[np.ndarray], int]:
    """B matrices of shape (size, size, 2, 2) for count kernels sharing one grid"""
    series = adaptive_expand_2d(
        _stacked_splits(evaluate, same_arc),
        options.expansion_tol,
        max_length=options.max_expansion_length,
        symmetric_slice=options.symmetric_slice,
        max_grid_length=options.max_grid_length,
    )
    coeffs = series.padded(max(size, series.shape[0]), max(size, series.shape[1]))
    weights = quadrature_weight(np.arange(size))
    weight_grid = (weights[:, None] * weights[None, :])[:, :, None, None]

    offset = count if same_arc else 0
    integrals = []
    for k in range(count):
        block = weight_grid * coeffs[:size, :size, offset + k]
        if same_arc:
            block = block + singular_integrals(series.coeffs[:, :, k], size)
        integrals.append(block)
    return integrals, series.shape[0]


def _to_block(integrals: np.ndarray) -> np.ndarray:
    """(l, m, q, p) -> row 2l + q, column 2m + p"""
    size = integrals.shape[0]
    return integrals.transpose(0, 2, 1, 3).reshape(2 * size, 2 * size)


def _compress(block: np.ndarray, tol: float) -> np.ndarray:
    block = block.copy()
    block[np.abs(block) < tol] = 0.0
    return block


def assemble_weak_block(medium: ElasticMedium, arc_i: ArcGeometry, arc_j: ArcGeometry, N: int, tol: float,
                        options: Optional[AssemblyOptions] = None,
                        same_arc: Optional[bool] = None) -> np.ndarray:
    """
    ⟨V_ij[w⁻¹T_m e_p], w⁻¹T_l e_q⟩ for l, m <= N.

    Args:
        medium: Elastic medium
        arc_i: Test arc
        arc_j: Trial arc
        N: Polynomial degree
        tol: Compression threshold applied to cross blocks
        options: Expansion settings
        same_arc: Whether arc_i and arc_j are the same arc

    Returns:
        Dense complex matrix of shape (2(N+1), 2(N+1))
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    options = options or AssemblyOptions()
    split = weak_kernel_split(medium, arc_i, arc_j, same_arc=same_arc)
    (integrals,), grid = _kernel_integrals(lambda s, t: (split.evaluate(s, t),), 1, split.same_arc,
                                           N + 1, options)
    block = _to_block(integrals)
    logger.debug(f"Weak block: grid {grid}, same_arc={split.same_arc}")
    if not split.same_arc and options.compress and tol > 0:
        block = _compress(block, tol)
    return block


def assemble_hyper_block(medium: ElasticMedium, arc_i: ArcGeometry, arc_j: ArcGeometry, N: int, tol: float,
                         options: Optional[AssemblyOptions] = None,
                         same_arc: Optional[bool] = None) -> np.ndarray:
    """
    ⟨W_ij[w U_m e_p], w U_l e_q⟩ for l, m <= N through the Maue form.

    The four kernels carry their signs and Jacobians (see
    hyper_form_kernels); the test/trial factors (wU)' and wU are expanded
    in w⁻¹T_{0..N+2} with the identities of spectral.chebyshev.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    options = options or AssemblyOptions()
    kernel_set = hyper_kernel_set(medium, arc_i, arc_j, same_arc=same_arc)
    same = kernel_set.G1.same_arc

    def evaluate(s, t):
        return hyper_form_kernels(kernel_set, arc_i, arc_j, s, t)

    (B1, B2, B3, B4), grid = _kernel_integrals(evaluate, 4, same, N + 3, options)
    cu = weighted_u_matrix(N)
    cd = weighted_u_derivative_matrix(N)
    form = (np.einsum('la,abqp,mb->lmqp', cd, B1, cd)
            + np.einsum('la,abqp,mb->lmqp', cd, B2, cu)
            + np.einsum('la,abqp,mb->lmqp', cu, B3, cd)
            + np.einsum('la,abqp,mb->lmqp', cu, B4, cu))
    block = _to_block(form)
    logger.debug(f"Hyper block: grid {grid}, same_arc={same}")
    if not same and options.compress and tol > 0:
        block = _compress(block, tol)
    return block


def _arc_rhs(problem: ProblemKind, medium: ElasticMedium, arc: ArcGeometry, wave: IncidentWave,
             N: int, rhs_tol: float, max_length: int) -> np.ndarray:
    if problem is ProblemKind.DIRICHLET:
        def data(t):
            return -wave.displacement(medium, arc.point(t))
    else:
        def data(t):
            sample = arc_eval(arc, t)
            return -wave.traction(medium, sample.point, sample.normal) * sample.jacobian[:, None]

    series = adaptive_expand(data, rhs_tol, max_length=max_length)
    size = N + 1 if problem is ProblemKind.DIRICHLET else N + 3
    coeffs = np.zeros((size, 2), dtype=complex)
    keep = min(size, series.length)
    coeffs[:keep] = series.coeffs[:keep]
    projected = quadrature_weight(np.arange(size))[:, None] * coeffs
    if problem is ProblemKind.NEUMANN:
        projected = weighted_u_matrix(N) @ projected
    return projected.reshape(-1)


def assemble_rhs(problem: ProblemKind, scene: Scene, wave: IncidentWave, N: int,
                 rhs_tol: float = 1e-12, max_length: int = DEFAULT_MAX_LENGTH) -> np.ndarray:
    """
    Right-hand side −γ_D P (Dirichlet) or −γ_N P (Neumann) tested against the basis.

    Returns:
        Vector of length M·2(N+1), arc-major, then 2l + p
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    return np.concatenate([
        _arc_rhs(problem, scene.medium, arc, wave, N, rhs_tol, max_length) for arc in scene.arcs
    ])


@dataclass
class GalerkinSystem:
    """Assembled block system; cross blocks may be stored sparse"""
    problem: ProblemKind
    N: int
    blocks: List[List[BlockMatrix]]
    rhs: np.ndarray
    tol: float
    nnz_fraction: float
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def arc_count(self) -> int:
        return len(self.blocks)

    @property
    def block_size(self) -> int:
        return 2 * (self.N + 1)

    def to_dense(self) -> np.ndarray:
        rows = [[b.toarray() if sparse.issparse(b) else b for b in row] for row in self.blocks]
        return np.block(rows)

    def dump(self, directory: Union[str, Path]) -> Path:
        """Write blocks.npz and manifest.json describing the index layout"""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        arrays = {}
        manifest_blocks = []
        for i, row in enumerate(self.blocks):
            for j, block in enumerate(row):
                dense = block.toarray() if sparse.issparse(block) else block
                key = f"block_{i}_{j}"
                arrays[key] = dense
                manifest_blocks.append({'key': key, 'test_arc': i, 'trial_arc': j,
                                        'shape': list(dense.shape), 'nnz': int(np.count_nonzero(dense))})
        arrays['rhs'] = self.rhs
        np.savez_compressed(directory / 'blocks.npz', **arrays)
        manifest = {
            'problem': self.problem.value,
            'N': self.N,
            'tol': self.tol,
            'nnz_fraction': self.nnz_fraction,
            'layout': 'row = 2*l + q (test mode l, component q); column = 2*m + p (trial mode m, component p)',
            'blocks': manifest_blocks,
        }
        (directory / 'manifest.json').write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        logger.info(f"Matrix dump written to {directory}")
        return directory


class GalerkinAssembler:
    """
    Assembles the M x M block system of a scene.

    Blocks are independent work items; each stores its own result, so the
    output does not depend on the thread schedule.
    """

    def __init__(self, scene: Scene, N: int, problem: ProblemKind, tol: float = 1e-10,
                 options: Optional[AssemblyOptions] = None, rhs_tol: float = 1e-12):
        if N < 0:
            raise ValueError("N must be non-negative")
        if tol < 0:
            raise ValueError("tol must be non-negative")
        if rhs_tol <= 0:
            raise ValueError("rhs_tol must be positive")
        self.scene = scene
        self.N = N
        self.problem = problem
        self.tol = tol
        self.rhs_tol = rhs_tol
        self.options = options or AssemblyOptions()
        self._block_fn = assemble_weak_block if problem is ProblemKind.DIRICHLET else assemble_hyper_block

        logger.info(
            f"Galerkin assembler: {problem.value}, {scene.size} arc(s), N={N}, tol={tol:.1e}, "
            f"threads={self.options.threads}"
        )

    def assemble_block(self, i: int, j: int) -> BlockMatrix:
        try:
            block = self._block_fn(self.scene.medium, self.scene.arcs[i], self.scene.arcs[j],
                                   self.N, self.tol, options=self.options, same_arc=(i == j))
        except CrackSolverError as e:
            raise AssemblyError(f"Block ({i}, {j}) failed: {e}", pair=(i, j)) from e
        if i != j and self.options.compress:
            return sparse.csr_matrix(block)
        return block

    def assemble_blocks(self) -> List[List[BlockMatrix]]:
        pairs = [(i, j) for i in range(self.scene.size) for j in range(self.scene.size)]
        if self.options.threads > 1 and len(pairs) > 1:
            with ThreadPoolExecutor(max_workers=self.options.threads) as pool:
                results = list(pool.map(lambda pair: self.assemble_block(*pair), pairs))
        else:
            results = [self.assemble_block(i, j) for i, j in pairs]
        size = self.scene.size
        return [results[i * size:(i + 1) * size] for i in range(size)]

    def nnz_fraction(self, blocks: Sequence[Sequence[BlockMatrix]]) -> float:
        """Stored entries over total entries; diagonal blocks count as dense"""
        block_entries = (2 * (self.N + 1)) ** 2
        stored = 0
        for i, row in enumerate(blocks):
            for j, block in enumerate(row):
                if i == j:
                    stored += block_entries
                elif sparse.issparse(block):
                    stored += block.nnz
                else:
                    stored += int(np.count_nonzero(block))
        return stored / (block_entries * len(blocks) ** 2)

    def build(self, wave: IncidentWave) -> GalerkinSystem:
        start = time.perf_counter()
        blocks = self.assemble_blocks()
        assembled = time.perf_counter()
        rhs = assemble_rhs(self.problem, self.scene, wave, self.N, self.rhs_tol,
                           max_length=self.options.max_expansion_length)
        system = GalerkinSystem(
            problem=self.problem,
            N=self.N,
            blocks=blocks,
            rhs=rhs,
            tol=self.tol,
            nnz_fraction=self.nnz_fraction(blocks),
            timings={'assembly_seconds': assembled - start, 'rhs_seconds': time.perf_counter() - assembled},
        )
        logger.info(f"System assembled: size {rhs.size}, nnz {system.nnz_fraction * 100:.1f}%, "
                    f"{system.timings['assembly_seconds']:.2f}s")
        return system


def assemble_system(problem: ProblemKind, scene: Scene, wave: IncidentWave, N: int, tol: float = 1e-10,
                    options: Optional[AssemblyOptions] = None, rhs_tol: float = 1e-12) -> GalerkinSystem:
    """Assemble all M² blocks and the right-hand side"""
    return GalerkinAssembler(scene, N, problem, tol=tol, options=options, rhs_tol=rhs_tol).build(wave)
