#!/usr/bin/env python3
"""
Unit Tests for Arcs, Medium and Scenes

Run with: pytest tests/test_geometry.py -v
"""

import json
import logging

import pytest
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from errors import DomainError, SceneFormatError
from geometry import (
    DEFAULT_MEDIUM,
    CircularArc,
    ElasticMedium,
    Line,
    Scene,
    SineArc,
    SineSceneRanges,
    Spiral,
    arc_eval,
    builtin_scene,
    generate_sine_scene,
    load_scene,
    save_scene,
    scene_from_dict,
    scene_min_distance,
    scene_to_dict,
)

ALL_ARCS = [
    Line((-1.0, 0.0), (1.0, 0.0)),
    Line((0.2, -0.4), (1.5, 0.9)),
    CircularArc(center=(0.0, 0.0), radius=1.0, angle_start=0.0, angle_end=np.pi),
    Spiral(),
    SineArc(a=0.5, b=0.1, c=0.3, d=-0.2, beta=4.0, gamma=0.7),
]


@pytest.fixture
def medium():
    """Default test medium: λ=2, μ=1, ρ=1, ω=50"""
    return ElasticMedium(lam=2.0, mu=1.0, rho=1.0, omega=50.0)


class TestArcs:
    """Test parametrizations, normals and Jacobians"""

    def test_line_point_and_normal(self):
        """Segment (-1,0)-(1,0) at t=0.3"""
        line = Line((-1.0, 0.0), (1.0, 0.0))
        assert line.point(0.3) == pytest.approx([0.3, 0.0])
        assert line.normal(0.3) == pytest.approx([0.0, -1.0])
        assert line.jacobian(0.3) == pytest.approx(1.0)

    def test_semicircle_midpoint(self):
        """Upper half circle at t=0 is (0, 1) with |r'| = π/2"""
        arc = CircularArc(center=(0.0, 0.0), radius=1.0, angle_start=0.0, angle_end=np.pi)
        assert arc.point(0.0) == pytest.approx([0.0, 1.0], abs=1e-15)
        assert arc.jacobian(0.0) == pytest.approx(np.pi / 2)
        assert arc.point(-1.0) == pytest.approx([1.0, 0.0], abs=1e-15)

    def test_spiral_at_origin_parameter(self):
        """e^t(cos 5t, sin 5t) at t=0"""
        spiral = Spiral()
        assert spiral.point(0.0) == pytest.approx([1.0, 0.0])
        assert spiral.velocity(0.0) == pytest.approx([1.0, 5.0])
        assert spiral.jacobian(0.0) == pytest.approx(np.sqrt(26.0))

    def test_sine_arc_formula(self):
        """x = a t + b, y = c sin(β t + γ) + d"""
        arc = SineArc(a=0.5, b=0.1, c=0.3, d=-0.2, beta=4.0, gamma=0.7)
        t = 0.4
        assert arc.point(t) == pytest.approx([0.5 * t + 0.1, 0.3 * np.sin(4.0 * t + 0.7) - 0.2])

    @pytest.mark.parametrize("arc", ALL_ARCS, ids=lambda a: a.kind.value)
    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_derivatives_match_finite_differences(self, arc, order):
        """r^(k) agrees with a central difference of r^(k-1)"""
        t = np.array([-0.6, 0.1, 0.7])
        h = 1e-6
        fd = (arc.derivative(t + h, order - 1) - arc.derivative(t - h, order - 1)) / (2 * h)
        exact = arc.derivative(t, order)
        assert np.abs(fd - exact).max() < 1e-6 * max(1.0, np.abs(exact).max())

    @pytest.mark.parametrize("arc", ALL_ARCS, ids=lambda a: a.kind.value)
    def test_normal_is_unit_and_orthogonal(self, arc):
        """ν ⟂ r' and |ν| = 1"""
        t = np.linspace(-1, 1, 9)
        normal, velocity = arc.normal(t), arc.velocity(t)
        assert np.abs(np.sum(normal * velocity, axis=-1)).max() < 1e-13 * np.abs(velocity).max()
        assert np.linalg.norm(normal, axis=-1) == pytest.approx(np.ones(9))

    def test_vectorized_shapes(self):
        """t of shape (3, 4) gives points of shape (3, 4, 2)"""
        t = np.linspace(-1, 1, 12).reshape(3, 4)
        assert Spiral().point(t).shape == (3, 4, 2)
        assert Spiral().jacobian(t).shape == (3, 4)

    def test_arc_eval_bundle(self):
        """arc_eval returns consistent point data"""
        arc = ALL_ARCS[2]
        sample = arc_eval(arc, np.array([0.25]))
        assert sample.point == pytest.approx(arc.point(np.array([0.25])))
        assert sample.normal == pytest.approx(arc.normal(np.array([0.25])))
        assert sample.jacobian == pytest.approx(arc.jacobian(np.array([0.25])))

    def test_parameter_outside_interval(self):
        """|t| > 1 raises DomainError"""
        with pytest.raises(DomainError):
            Line((-1.0, 0.0), (1.0, 0.0)).point(1.01)

    def test_endpoint_roundoff_accepted(self):
        """Parameters a few ulps past ±1 are tolerated"""
        assert Spiral().point(1.0 + 1e-15).shape == (2,)

    def test_invalid_parameters(self):
        """Degenerate arcs are rejected"""
        with pytest.raises(ValueError):
            Line((0.0, 0.0), (0.0, 0.0))
        with pytest.raises(ValueError):
            CircularArc(center=(0.0, 0.0), radius=1.0, angle_start=0.0, angle_end=2 * np.pi)
        with pytest.raises(ValueError):
            CircularArc(center=(0.0, 0.0), radius=-1.0, angle_start=0.0, angle_end=1.0)
        with pytest.raises(ValueError):
            SineArc(a=0.0, b=0.0, c=1.0, d=0.0, beta=1.0, gamma=0.0)

    def test_length(self):
        """Segment length 2, semicircle length π"""
        assert ALL_ARCS[0].length() == pytest.approx(2.0)
        assert ALL_ARCS[2].length() == pytest.approx(np.pi)

    def test_spiral_length(self):
        """∫ |r'| = √26 (e − 1/e) for e^t(cos 5t, sin 5t)"""
        expected = np.sqrt(26.0) * (np.e - 1.0 / np.e)
        assert Spiral().length() == pytest.approx(expected, rel=1e-4)
        assert Spiral().length(count=4097) == pytest.approx(expected, rel=1e-7)


class TestMedium:
    """Test elastic medium constants"""

    def test_default_wavenumbers(self, medium):
        """κ_s = 50, κ_p = 25 for λ=2, μ=1, ρ=1, ω=50"""
        assert medium.kappa_s == pytest.approx(50.0)
        assert medium.kappa_p == pytest.approx(25.0)
        assert medium.shear_wavelength == pytest.approx(2 * np.pi / 50)

    def test_with_frequency(self, medium):
        """Changing ω scales both wavenumbers"""
        low = medium.with_frequency(10.0)
        assert low.kappa_s == pytest.approx(10.0)
        assert low.kappa_p == pytest.approx(5.0)
        assert low.mu == medium.mu

    def test_invalid_constants(self):
        """μ ≤ 0, λ+μ ≤ 0, ρ ≤ 0 and ω ≤ 0 are rejected"""
        with pytest.raises(ValueError):
            ElasticMedium(lam=2.0, mu=0.0, rho=1.0, omega=1.0)
        with pytest.raises(ValueError):
            ElasticMedium(lam=-1.0, mu=1.0, rho=1.0, omega=1.0)
        with pytest.raises(ValueError):
            ElasticMedium(lam=2.0, mu=1.0, rho=0.0, omega=1.0)
        with pytest.raises(ValueError):
            ElasticMedium(lam=2.0, mu=1.0, rho=1.0, omega=-3.0)

    def test_to_dict_uses_lambda_key(self, medium):
        """Serialized form uses 'lambda'"""
        assert medium.to_dict() == {'lambda': 2.0, 'mu': 1.0, 'rho': 1.0, 'omega': 50.0}


class TestScene:
    """Test scene checks and generators"""

    def test_parallel_segments_distance(self, medium):
        """Two parallel unit-separated segments"""
        scene = Scene(arcs=(Line((-1.0, 0.0), (1.0, 0.0)), Line((-1.0, 1.0), (1.0, 1.0))), medium=medium)
        assert scene_min_distance(scene) == pytest.approx(1.0)
        report = scene.validate()
        assert report.valid
        assert report.arc_count == 2

    def test_touching_segments_warn(self, medium, caplog):
        """Segments sharing an endpoint are flagged"""
        scene = Scene(arcs=(Line((-1.0, 0.0), (0.0, 0.0)), Line((0.0, 0.0), (1.0, 0.0))), medium=medium)
        with caplog.at_level(logging.WARNING):
            report = scene.validate()
        assert not report.valid
        assert report.min_distance == pytest.approx(0.0)
        assert any("closer than" in record.message for record in caplog.records)

    def test_single_arc_report(self, medium):
        """One arc: distance is reported as None"""
        data = builtin_scene('line', medium).validate().to_dict()
        assert data['min_distance'] is None
        assert data['kappa_s'] == pytest.approx(50.0)
        assert data['kappa_p'] == pytest.approx(25.0)
        assert data['valid'] is True

    def test_empty_scene_rejected(self, medium):
        """At least one arc is required"""
        with pytest.raises(ValueError):
            Scene(arcs=(), medium=medium)

    def test_diameter(self, medium):
        """Segment of length 2 has diameter 2"""
        assert builtin_scene('line', medium).diameter() == pytest.approx(2.0)

    def test_subset_and_with_medium(self, medium):
        """Subsets keep order; with_medium keeps arcs"""
        scene = builtin_scene('sine28', medium)
        small = scene.subset(5)
        assert small.arcs == scene.arcs[:5]
        faster = small.with_medium(medium.with_frequency(10.0))
        assert faster.arcs == small.arcs
        assert faster.medium.omega == 10.0

    def test_sine_scene_deterministic(self):
        """Same seed gives the same arcs, another seed differs"""
        first = generate_sine_scene(6, seed=4)
        again = generate_sine_scene(6, seed=4)
        other = generate_sine_scene(6, seed=5)
        assert first.arcs == again.arcs
        assert first.arcs != other.arcs

    def test_sine28_is_disjoint(self):
        """The 28-arc scene keeps a positive gap"""
        scene = builtin_scene('sine28')
        assert scene.size == 28
        assert scene_min_distance(scene) > SineSceneRanges().min_gap
        assert scene.validate().valid

    def test_sine10_is_prefix_of_sine28(self):
        """sine10 takes the first ten arcs of sine28"""
        assert builtin_scene('sine10').arcs == builtin_scene('sine28').arcs[:10]

    def test_unknown_builtin(self):
        """Unknown names are rejected"""
        with pytest.raises(ValueError):
            builtin_scene('circle')

    def test_empty_range_rejected(self):
        """Sampling ranges must be ordered"""
        with pytest.raises(ValueError):
            SineSceneRanges(c=(0.5, 0.1))


class TestSceneIO:
    """Test JSON scene files"""

    def test_save_and_load(self, medium, tmp_path):
        """A saved scene loads back with the same arcs and medium"""
        scene = Scene(arcs=tuple(ALL_ARCS[1:]), medium=medium)
        path = save_scene(scene, tmp_path / "scenes" / "mixed.json")
        loaded = load_scene(path)
        assert loaded.medium == scene.medium
        assert loaded.arcs == scene.arcs

    def test_spiral_defaults(self):
        """Spiral fields are optional"""
        scene = scene_from_dict({'version': 1,
                                 'medium': {'lambda': 2, 'mu': 1, 'rho': 1, 'omega': 50},
                                 'arcs': [{'kind': 'spiral'}]})
        assert scene.arcs[0] == Spiral()

    def test_invalid_json_reports_position(self, tmp_path):
        """Malformed JSON names line and column"""
        path = tmp_path / "broken.json"
        path.write_text('{"version": 1,\n "arcs": [}')
        with pytest.raises(SceneFormatError, match="line 2"):
            load_scene(path)

    def test_zero_shear_modulus(self):
        """μ = 0 is a format error"""
        data = scene_to_dict(builtin_scene('line'))
        data['medium']['mu'] = 0
        with pytest.raises(SceneFormatError, match="medium"):
            scene_from_dict(data)

    def test_unknown_kind(self):
        """Unknown arc kinds list the valid ones"""
        data = scene_to_dict(builtin_scene('line'))
        data['arcs'][0] = {'kind': 'ellipse'}
        with pytest.raises(SceneFormatError, match="arcs\\[0\\].kind"):
            scene_from_dict(data)

    def test_missing_and_unknown_fields(self):
        """Field paths appear in the message"""
        data = scene_to_dict(builtin_scene('line'))
        del data['arcs'][0]['endpoint_b']
        with pytest.raises(SceneFormatError, match="endpoint_b"):
            scene_from_dict(data)
        data = scene_to_dict(builtin_scene('line'))
        data['arcs'][0]['color'] = 'red'
        with pytest.raises(SceneFormatError, match="color"):
            scene_from_dict(data)

    def test_wrong_version(self):
        """Only schema version 1 is read"""
        data = scene_to_dict(builtin_scene('line'))
        data['version'] = 2
        with pytest.raises(SceneFormatError, match="version"):
            scene_from_dict(data)

    def test_saved_file_is_sorted_json(self, tmp_path):
        """Files are written with sorted keys"""
        path = save_scene(builtin_scene('semicircle'), tmp_path / "semi.json")
        data = json.loads(path.read_text())
        assert list(data) == sorted(data)
        assert data['arcs'][0]['kind'] == 'circular_arc'


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
