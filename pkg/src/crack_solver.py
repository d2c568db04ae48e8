#!/usr/bin/env python3
"""
Crack Solver - Command-line front end

Spectral Galerkin solver for elastic scattering by open arcs.

Commands:
- check    - Validate a scene and report distances and wavelengths
- solve    - Assemble and solve one problem, write the density and a report
- converge - Convergence study against an overkill reference
- field    - Total displacement field on a grid (CSV)
- bench    - Frequency or arc-count sweep (JSON + CSV summary)

Usage:
    python src/crack_solver.py check --scene builtin:sine28
    python src/crack_solver.py solve --scene builtin:line --problem neumann --degree 60
"""

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import colorlog
import pandas as pd
import yaml

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from errors import CrackSolverError, ExitCode
from geometry import BUILTIN_SCENES, Scene, builtin_scene, load_scene
from bie import (
    DensitySolution,
    GridSpec,
    IncidentWave,
    ProblemKind,
    assemble_system,
    convergence_study,
    eval_total_field_grid,
    probe_report,
    solve,
)
from settings import SolverSettings, load_settings

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
BUILTIN_PREFIX = 'builtin:'


def setup_logging(level: str = 'INFO', log_dir: str = 'logs'):
    """File handler plus colored console handler, configured once per process"""
    os.makedirs(log_dir, exist_ok=True)
    console = logging.StreamHandler()
    console.setFormatter(colorlog.ColoredFormatter(
        '%(log_color)s' + LOG_FORMAT,
        log_colors={
            'DEBUG': 'cyan',
            'INFO': 'green',
            'WARNING': 'yellow',
            'ERROR': 'red',
            'CRITICAL': 'bold_red',
        },
    ))
    file_handler = logging.FileHandler(os.path.join(log_dir, 'crack_solver.log'))
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logging.basicConfig(level=getattr(logging, level), handlers=[file_handler, console], force=True)


def _number_list(text: str, kind: Callable = float) -> List:
    try:
        return [kind(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list, got '{text}'")


def _int_list(text: str) -> List[int]:
    return _number_list(text, int)


def _float_list(text: str) -> List[float]:
    return _number_list(text, float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='crack_solver',
        description='Spectral Galerkin BIE solver for elastic scattering by open arcs',
    )
    parser.add_argument('--config', help='YAML settings file (default: config/solver.yaml)')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Logging level (default: INFO)')
    parser.add_argument('--log-dir', default='logs', help='Directory for crack_solver.log (default: logs)')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--scene', required=True,
                        help=f"Scene JSON file or builtin:<name> ({', '.join(BUILTIN_SCENES)})")
    common.add_argument('--seed', type=int, default=0, help='Seed for generated scenes (default: 0)')
    common.add_argument('--out', default='results', help='Output directory (default: results)')

    numerics = argparse.ArgumentParser(add_help=False)
    numerics.add_argument('--problem', choices=[p.value for p in ProblemKind], default='dirichlet',
                          help='Boundary condition (default: dirichlet)')
    numerics.add_argument('--alpha', type=float, default=0.0, help='Incidence angle in radians (default: 0)')
    numerics.add_argument('--tol', type=float, help='Compression tolerance (default: 1e-10)')
    numerics.add_argument('--rhs-tol', type=float, help='Right-hand side expansion tolerance (default: 1e-12)')
    numerics.add_argument('--threads', type=int, help='Worker threads (default: 1 or CRACK_SOLVER_THREADS)')

    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('check', parents=[common], help='Validate a scene')

    p_solve = sub.add_parser('solve', parents=[common, numerics], help='Solve one problem')
    p_solve.add_argument('--degree', type=int, required=True, help='Polynomial degree N per arc')
    p_solve.add_argument('--dump-matrix', action='store_true', help='Also write blocks.npz and manifest.json')

    p_conv = sub.add_parser('converge', parents=[common, numerics], help='Convergence study')
    p_conv.add_argument('--degree', '--degrees', dest='degrees', type=_int_list, required=True,
                        help='Ascending degree list, e.g. 20,40,80')
    p_conv.add_argument('--overkill', type=int, help='Reference degree margin over max(degrees) (default: 60)')
    p_conv.add_argument('--reference-degree', type=int, help='Explicit reference degree')

    p_field = sub.add_parser('field', parents=[common, numerics], help='Total field on a grid')
    p_field.add_argument('--grid', type=GridSpec.parse, required=True, help='"xmin,xmax,ymin,ymax,nx,ny"')
    p_field.add_argument('--density', help='Density JSON written by solve (otherwise solved at --degree)')
    p_field.add_argument('--degree', type=int, help='Polynomial degree when no density is given')
    p_field.add_argument('--boundary-offsets', type=_float_list,
                         help='Normal offsets for boundary-condition checks at arc midpoints, e.g. 0.05,0.02,0.01')

    p_bench = sub.add_parser('bench', parents=[common, numerics], help='Frequency or arc-count sweep')
    mode = p_bench.add_mutually_exclusive_group(required=True)
    mode.add_argument('--omega-list', type=_float_list, help='Frequencies to sweep, e.g. 10,50')
    mode.add_argument('--arc-count-list', type=_int_list, help='Arc counts to sweep, e.g. 5,10')
    p_bench.add_argument('--degree', type=_int_list, required=True,
                         help='Degree N, or one degree per frequency, e.g. 170,240')
    p_bench.add_argument('--overkill', type=int, help='Reference degree margin (default: 60)')
    p_bench.add_argument('--reference-degree', type=int, help='Explicit reference degree')

    return parser


def resolve_scene(spec: str, seed: int = 0) -> Scene:
    """Scene from a JSON path or builtin:<name>"""
    if spec.startswith(BUILTIN_PREFIX):
        return builtin_scene(spec[len(BUILTIN_PREFIX):], seed=seed)
    return load_scene(spec)


def write_json(path: Path, data: Dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    logger.info(f"Wrote {path}")
    return path


def _settings_from_args(args: argparse.Namespace) -> SolverSettings:
    overrides = {
        'log_level': args.log_level,
        'compression_tol': getattr(args, 'tol', None),
        'rhs_tol': getattr(args, 'rhs_tol', None),
        'threads': getattr(args, 'threads', None),
        'overkill_margin': getattr(args, 'overkill', None),
    }
    return load_settings(args.config, overrides=overrides)


def cmd_check(args: argparse.Namespace, settings: SolverSettings) -> ExitCode:
    scene = resolve_scene(args.scene, args.seed)
    report = scene.validate().to_dict()
    report['medium'] = scene.medium.to_dict()
    report['min_speed_per_arc'] = [arc.min_speed() for arc in scene.arcs]
    report['shear_wavelengths_per_arc'] = [
        length / scene.medium.shear_wavelength for length in report['arc_lengths']]
    write_json(Path(args.out) / 'check.json', report)
    print(json.dumps(report, indent=2, sort_keys=True))
    if not report['valid']:
        logger.error(f"❌ Scene check failed: {'; '.join(report['issues'])}")
        return ExitCode.SCENE_INVALID
    logger.info(f"✅ Scene valid: {report['arc_count']} arc(s), "
                f"κ_s={report['kappa_s']:.4g}, κ_p={report['kappa_p']:.4g}")
    return ExitCode.OK


def cmd_solve(args: argparse.Namespace, settings: SolverSettings) -> ExitCode:
    scene = resolve_scene(args.scene, args.seed)
    problem = ProblemKind(args.problem)
    wave = IncidentWave(args.alpha)
    out = Path(args.out)

    system = assemble_system(problem, scene, wave, args.degree, tol=settings.compression_tol,
                             options=settings.assembly_options(), rhs_tol=settings.rhs_tol)
    start = time.perf_counter()
    solution = solve(system)
    solve_seconds = time.perf_counter() - start

    solution.save(out / 'density.json')
    if args.dump_matrix:
        system.dump(out / 'matrix')
    write_json(out / 'solve_report.json', {
        'problem': problem.value,
        'N': args.degree,
        'alpha': wave.alpha,
        'arc_count': scene.size,
        'residual': solution.residual,
        'nnz_fraction': system.nnz_fraction,
        'settings': settings.to_dict(),
        'timings': dict(system.timings, solve_seconds=solve_seconds),
    })
    logger.info(f"✅ Solved: residual {solution.residual:.2e}, nnz {system.nnz_fraction * 100:.1f}%")
    return ExitCode.OK


def cmd_converge(args: argparse.Namespace, settings: SolverSettings) -> ExitCode:
    scene = resolve_scene(args.scene, args.seed)
    report = convergence_study(
        ProblemKind(args.problem), scene, IncidentWave(args.alpha), args.degrees,
        overkill_margin=settings.overkill_margin, tol=settings.compression_tol,
        options=settings.assembly_options(), rhs_tol=settings.rhs_tol,
        reference_degree=args.reference_degree,
    )
    write_json(Path(args.out) / 'convergence.json', report.to_dict())
    if any(entry.status != 'ok' for entry in report.entries):
        logger.error("❌ Some degrees failed; see convergence.json")
        return ExitCode.NUMERICAL
    return ExitCode.OK


def cmd_field(args: argparse.Namespace, settings: SolverSettings) -> ExitCode:
    scene = resolve_scene(args.scene, args.seed)
    if args.boundary_offsets and min(args.boundary_offsets) <= 0:
        raise ValueError("--boundary-offsets must be positive")
    wave = IncidentWave(args.alpha)
    if args.density:
        solution = DensitySolution.load(args.density)
    elif args.degree is not None:
        system = assemble_system(ProblemKind(args.problem), scene, wave, args.degree,
                                 tol=settings.compression_tol, options=settings.assembly_options(),
                                 rhs_tol=settings.rhs_tol)
        solution = solve(system)
    else:
        raise ValueError("field needs --density or --degree")

    grid = eval_total_field_grid(solution, scene, wave, args.grid, tol=settings.quadrature_tol,
                                 max_order=settings.max_quadrature_order,
                                 cutoff_factor=settings.cutoff_factor, threads=settings.threads)
    grid.to_csv(Path(args.out) / 'field.csv')
    if args.boundary_offsets:
        boundary = probe_report(solution, scene, wave, args.boundary_offsets, tol=settings.quadrature_tol)
        write_json(Path(args.out) / 'boundary.json', boundary)
    return ExitCode.OK


def _bench_cases(args: argparse.Namespace, base: Scene) -> List[Dict]:
    if args.omega_list is not None:
        degrees = args.degree if len(args.degree) > 1 else args.degree * len(args.omega_list)
        if len(degrees) != len(args.omega_list):
            raise ValueError("--degree must give one value or one per frequency")
        return [{'omega': omega, 'arc_count': base.size, 'N': N,
                 'scene': base.with_medium(base.medium.with_frequency(omega))}
                for omega, N in zip(args.omega_list, degrees)]

    if len(args.degree) != 1:
        raise ValueError("arc-count sweeps use a single --degree")
    if max(args.arc_count_list) > base.size:
        raise ValueError(f"Scene has only {base.size} arcs")
    return [{'omega': base.medium.omega, 'arc_count': count, 'N': args.degree[0],
             'scene': base.subset(count)} for count in args.arc_count_list]


def cmd_bench(args: argparse.Namespace, settings: SolverSettings) -> ExitCode:
    base = resolve_scene(args.scene, args.seed)
    problem = ProblemKind(args.problem)
    wave = IncidentWave(args.alpha)
    rows, timings = [], {}

    logger.info("=" * 80)
    logger.info(f" BENCHMARK: {problem.value}, {'frequency' if args.omega_list else 'arc-count'} sweep")
    logger.info("=" * 80)
    for case in _bench_cases(args, base):
        label = f"omega={case['omega']:g},arcs={case['arc_count']}"
        start = time.perf_counter()
        report = convergence_study(problem, case['scene'], wave, [case['N']],
                                   overkill_margin=settings.overkill_margin, tol=settings.compression_tol,
                                   options=settings.assembly_options(), rhs_tol=settings.rhs_tol,
                                   reference_degree=args.reference_degree)
        entry = report.entries[0]
        rows.append({
            'omega': case['omega'],
            'arc_count': case['arc_count'],
            'N': case['N'],
            'reference_degree': report.reference_degree,
            'error': entry.error,
            'nnz_percent': None if entry.nnz_fraction is None else 100.0 * entry.nnz_fraction,
            'status': entry.status,
        })
        timings[label] = dict(report.timings, wall_seconds=time.perf_counter() - start)
        logger.info(f"  {label}: N={case['N']}, error {entry.error}, nnz {rows[-1]['nnz_percent']}")

    out = Path(args.out)
    write_json(out / 'bench.json', {'problem': problem.value, 'alpha': wave.alpha,
                                    'rows': rows, 'timings': timings})
    out.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows).to_csv(out / 'bench.csv', index=False)
    return ExitCode.OK if all(row['status'] == 'ok' for row in rows) else ExitCode.NUMERICAL


COMMANDS = {
    'check': cmd_check,
    'solve': cmd_solve,
    'converge': cmd_converge,
    'field': cmd_field,
    'bench': cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = _settings_from_args(args)
    except (ValueError, yaml.YAMLError) as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return ExitCode.USAGE.value
    except OSError as e:
        print(f"Cannot read configuration: {e}", file=sys.stderr)
        return ExitCode.IO.value

    setup_logging(settings.log_level, args.log_dir)
    logger.info(f"crack_solver {args.command}: scene {args.scene}")

    try:
        code = COMMANDS[args.command](args, settings)
    except CrackSolverError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        code = e.exit_code
    except (FileNotFoundError, PermissionError, IsADirectoryError) as e:
        logger.error(f"❌ I/O error: {e}")
        code = ExitCode.IO
    except ValueError as e:
        logger.error(f"❌ Invalid input: {e}")
        code = ExitCode.USAGE
    except Exception as e:
        logger.exception(f"❌ Unexpected failure: {e}")
        code = ExitCode.INTERNAL
    return code.value


if __name__ == '__main__':
    sys.exit(main())
