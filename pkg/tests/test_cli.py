#!/usr/bin/env python3
"""
Command-Line Tests

Run with: pytest tests/test_cli.py -v
Benchmark acceptance: pytest tests/test_cli.py -m slow
"""

import json

import pytest
import sys
from pathlib import Path

import pandas as pd

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from errors import ExitCode, SingularSystemError
from geometry import DEFAULT_MEDIUM, Line, Scene, save_scene
from crack_solver import build_parser, main, resolve_scene


@pytest.fixture
def run(tmp_path):
    """Run the CLI with logs and outputs under tmp_path"""
    out = tmp_path / "out"

    def invoke(*argv, config=None):
        prefix = ['--log-dir', str(tmp_path / 'logs')]
        if config is not None:
            prefix += ['--config', str(config)]
        command, *rest = argv
        return main(prefix + [command, '--out', str(out)] + list(rest))

    invoke.out = out
    return invoke


@pytest.fixture
def line_file(tmp_path):
    return save_scene(Scene(arcs=(Line((-1.0, 0.0), (1.0, 0.0)),), medium=DEFAULT_MEDIUM),
                      tmp_path / "line.json")


class TestParser:
    """Test argument parsing"""

    def test_requires_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_bench_needs_a_sweep(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(['bench', '--scene', 'builtin:line', '--degree', '20'])

    def test_lists_and_grid(self):
        args = build_parser().parse_args(['field', '--scene', 'builtin:line', '--grid', '-1,1,-1,1,3,4',
                                          '--degree', '10'])
        assert args.grid.nx == 3 and args.grid.ny == 4
        args = build_parser().parse_args(['bench', '--scene', 'builtin:sine10', '--omega-list', '10,50',
                                          '--degree', '170,240'])
        assert args.omega_list == [10.0, 50.0]
        assert args.degree == [170, 240]

    def test_degree_list_spellings(self):
        for flag in ('--degree', '--degrees'):
            args = build_parser().parse_args(['converge', '--scene', 'builtin:line', flag, '8,12'])
            assert args.degrees == [8, 12]

    def test_resolve_builtin(self):
        assert resolve_scene('builtin:sine10').size == 10


class TestCheck:
    """Test scene validation"""

    def test_builtin_line(self, run):
        """Default medium gives κ_s = 50 and κ_p = 25"""
        assert run('check', '--scene', 'builtin:line') == ExitCode.OK.value
        report = json.loads((run.out / 'check.json').read_text())
        assert report['kappa_s'] == pytest.approx(50.0)
        assert report['kappa_p'] == pytest.approx(25.0)
        assert report['min_distance'] is None
        assert report['valid'] is True

    def test_scene_file(self, run, line_file):
        assert run('check', '--scene', str(line_file)) == ExitCode.OK.value

    def test_zero_shear_modulus(self, run, line_file):
        data = json.loads(line_file.read_text())
        data['medium']['mu'] = 0.0
        line_file.write_text(json.dumps(data))
        assert run('check', '--scene', str(line_file)) == ExitCode.SCENE_INVALID.value

    def test_invalid_json(self, run, line_file):
        line_file.write_text('{"version": 1,\n  "arcs": [}\n')
        assert run('check', '--scene', str(line_file)) == ExitCode.SCENE_INVALID.value

    def test_missing_file(self, run, tmp_path):
        assert run('check', '--scene', str(tmp_path / 'nope.json')) == ExitCode.IO.value

    def test_generated_scene(self, run):
        """The 28-arc scene has a positive minimum distance"""
        assert run('check', '--scene', 'builtin:sine28') == ExitCode.OK.value
        report = json.loads((run.out / 'check.json').read_text())
        assert report['arc_count'] == 28
        assert report['min_distance'] > 0

    def test_same_seed_same_report(self, run):
        run('check', '--scene', 'builtin:sine10', '--seed', '3')
        first = (run.out / 'check.json').read_bytes()
        run('check', '--scene', 'builtin:sine10', '--seed', '3')
        assert (run.out / 'check.json').read_bytes() == first

    def test_invalid_config(self, run, tmp_path):
        config = tmp_path / 'bad.yaml'
        config.write_text("unknown_setting: 1\n")
        assert run('check', '--scene', 'builtin:line', config=config) == ExitCode.USAGE.value


class TestSolveAndField:
    """Test the solve, field and converge commands on small problems"""

    def test_solve_writes_artifacts(self, run):
        code = run('solve', '--scene', 'builtin:line', '--problem', 'neumann', '--degree', '12',
                   '--dump-matrix')
        assert code == ExitCode.OK.value
        report = json.loads((run.out / 'solve_report.json').read_text())
        assert report['problem'] == 'neumann'
        assert report['N'] == 12
        assert report["residual"] < 1e-8
        assert 'solve_seconds' in report['timings']
        assert (run.out / 'density.json').exists()
        manifest = json.loads((run.out / 'matrix' / 'manifest.json').read_text())
        assert manifest is not None

    def test_field_from_density(self, run):
        run('solve', '--scene', 'builtin:line', '--degree', '10')
        code = run('field', '--scene', 'builtin:line', '--density', str(run.out / 'density.json'),
                   '--grid', '-2,2,0.5,1.5,3,2')
        assert code == ExitCode.OK.value
        frame = pd.read_csv(run.out / 'field.csv')
        assert len(frame) == 6
        assert (run.out / 'field.json').exists()

    def test_singular_system_exit_code(self, run, mocker):
        """Numerical failures map to their own exit code"""
        mocker.patch('crack_solver.solve', side_effect=SingularSystemError("forced", pivot_growth=1.0))
        assert run('solve', '--scene', 'builtin:line', '--degree', '4') == ExitCode.NUMERICAL.value
        assert not (run.out / 'density.json').exists()

    def test_unexpected_failure_exit_code(self, run, mocker):
        mocker.patch('crack_solver.assemble_system', side_effect=RuntimeError("boom"))
        assert run('solve', '--scene', 'builtin:line', '--degree', '4') == ExitCode.INTERNAL.value

    def test_field_needs_a_density(self, run):
        assert run('field', '--scene', 'builtin:line', '--grid', '0,1,1,2,2,2') == ExitCode.USAGE.value

    def test_field_with_boundary_offsets(self, run):
        code = run('field', '--scene', 'builtin:line', '--problem', 'neumann', '--degree', '12',
                   '--grid', '-2,2,1,2,2,2', '--boundary-offsets', '0.05,0.1')
        assert code == ExitCode.OK.value
        report = json.loads((run.out / 'boundary.json').read_text())
        assert report['quantity'] == 'traction'
        assert report['offset'] == [0.1, 0.05]
        assert len(report['plus']) == len(report['minus']) == 2

    def test_boundary_offsets_must_be_positive(self, run):
        code = run('field', '--scene', 'builtin:line', '--degree', '6', '--grid', '-2,2,1,2,2,2',
                   '--boundary-offsets', '0.1,-0.1')
        assert code == ExitCode.USAGE.value
        assert not (run.out / 'field.csv').exists()

    def test_converge(self, run):
        code = run('converge', '--scene', 'builtin:line', '--degree', '8,12', '--reference-degree', '16')
        assert code == ExitCode.OK.value
        report = json.loads((run.out / 'convergence.json').read_text())
        assert [entry['N'] for entry in report['entries']] == [8, 12]
        assert report['reference_degree'] == 16

    def test_converge_unsorted_degrees(self, run):
        code = run('converge', '--scene', 'builtin:line', '--degrees', '12,8', '--reference-degree', '16')
        assert code == ExitCode.USAGE.value


class TestBench:
    """Test the benchmark sweeps"""

    def test_frequency_sweep(self, run):
        code = run('bench', '--scene', 'builtin:line', '--omega-list', '2,3', '--degree', '8',
                   '--reference-degree', '12')
        assert code == ExitCode.OK.value
        report = json.loads((run.out / 'bench.json').read_text())
        assert [row['omega'] for row in report['rows']] == [2.0, 3.0]
        assert all(row['status'] == 'ok' for row in report['rows'])
        assert set(report['timings']) == {'omega=2,arcs=1', 'omega=3,arcs=1'}
        assert len(pd.read_csv(run.out / 'bench.csv')) == 2

    def test_too_many_arcs(self, run):
        code = run('bench', '--scene', 'builtin:line', '--arc-count-list', '1,2', '--degree', '8')
        assert code == ExitCode.USAGE.value

    def test_degree_count_mismatch(self, run):
        code = run('bench', '--scene', 'builtin:line', '--omega-list', '2,3,4', '--degree', '8,10')
        assert code == ExitCode.USAGE.value


@pytest.mark.slow
class TestBenchAcceptance:
    """Sweeps on the first ten generated arcs"""

    @pytest.mark.parametrize("omega,degree,nnz_percent", [(10, 170, 11), (50, 240, 22)])
    def test_frequency_rows(self, run, omega, degree, nnz_percent):
        code = run('bench', '--scene', 'builtin:sine10', '--omega-list', str(omega), '--degree', str(degree))
        assert code == ExitCode.OK.value
        row = json.loads((run.out / 'bench.json').read_text())['rows'][0]
        assert row['reference_degree'] == degree + 60
        assert row['error'] <= 1e-8
        assert nnz_percent / 3 <= row['nnz_percent'] <= nnz_percent * 3

    def test_arc_count_rows(self, run):
        code = run('bench', '--scene', 'builtin:sine28', '--arc-count-list', '5,10', '--degree', '200',
                   '--reference-degree', '260')
        assert code == ExitCode.OK.value
        rows = json.loads((run.out / 'bench.json').read_text())['rows']
        assert [row['arc_count'] for row in rows] == [5, 10]
        assert all(row['error'] <= 1e-8 for row in rows)


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
