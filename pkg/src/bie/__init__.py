"""
Boundary Integral Module

Kernels, Galerkin assembly, linear solve, convergence studies and layer
potentials for elastic scattering by open arcs.
"""

from .kernels import (
    HyperKernelSet,
    KernelSplit,
    LogSplit,
    elastic_fundamental,
    helmholtz_fs,
    hyper_kernel_set,
    traction_of_fundamental,
    weak_kernel_split,
)
from .assembly import (
    AssemblyOptions,
    GalerkinAssembler,
    GalerkinSystem,
    IncidentWave,
    ProblemKind,
    assemble_hyper_block,
    assemble_rhs,
    assemble_system,
    assemble_weak_block,
)
from .solver import (
    ConvergenceReport,
    ConvergenceStudy,
    DensitySolution,
    convergence_study,
    sobolev_norm,
    solve,
)
from .potentials import (
    FieldEvaluator,
    FieldGrid,
    GridSpec,
    eval_scattered_field,
    eval_total_field_grid,
    probe_report,
)

__all__ = [
    'HyperKernelSet',
    'KernelSplit',
    'LogSplit',
    'elastic_fundamental',
    'helmholtz_fs',
    'hyper_kernel_set',
    'traction_of_fundamental',
    'weak_kernel_split',
    'AssemblyOptions',
    'GalerkinAssembler',
    'GalerkinSystem',
    'IncidentWave',
    'ProblemKind',
    'assemble_hyper_block',
    'assemble_rhs',
    'assemble_system',
    'assemble_weak_block',
    'ConvergenceReport',
    'ConvergenceStudy',
    'DensitySolution',
    'convergence_study',
    'sobolev_norm',
    'solve',
    'FieldEvaluator',
    'FieldGrid',
    'GridSpec',
    'eval_scattered_field',
    'eval_total_field_grid',
    'probe_report',
]
