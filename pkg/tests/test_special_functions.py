#!/usr/bin/env python3
"""
Unit Tests for Bessel/Hankel Helpers
"""

import pytest
import sys
from pathlib import Path

import numpy as np
from scipy import special

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from errors import DomainError, SingularEvaluationError
from spectral.special_functions import (
    EULER_GAMMA,
    bessel_j,
    bessel_j1_over_x,
    bessel_y,
    hankel1,
    hankel1_log_split,
    neumann_pole_part,
    neumann_regular_part,
    neumann_regular_part1_over_x,
)


class TestReferenceValues:
    """Test against tabulated values"""

    def test_j0_at_one(self):
        """J_0(1)"""
        assert bessel_j(0, 1.0) == pytest.approx(0.765197686557967, rel=1e-14)

    def test_y0_at_one(self):
        """Y_0(1)"""
        assert bessel_y(0, 1.0) == pytest.approx(0.088256964215677, rel=1e-13)

    def test_y1_at_one(self):
        """Y_1(1)"""
        assert bessel_y(1, 1.0) == pytest.approx(-0.781212821300289, rel=1e-14)

    def test_hankel_combines_j_and_y(self):
        """H_1 = J_1 + iY_1"""
        x = np.array([0.5, 3.0, 40.0])
        expected = bessel_j(1, x) + 1j * bessel_y(1, x)
        assert np.abs(hankel1(1, x) - expected).max() < 1e-13 * np.abs(expected).max()


class TestIdentities:
    """Test classical Bessel identities"""

    def test_wronskian(self):
        """J_1 Y_0 − J_0 Y_1 = 2/(πx)"""
        x = 2.7
        value = bessel_j(1, x) * bessel_y(0, x) - bessel_j(0, x) * bessel_y(1, x)
        assert value == pytest.approx(2.0 / (np.pi * x), rel=1e-13)

    def test_recurrence(self):
        """C_0 + C_2 = (2/x) C_1 for J and Y"""
        x = 3.1
        assert bessel_j(0, x) + bessel_j(2, x) == pytest.approx(2.0 / x * bessel_j(1, x), rel=1e-13)
        assert bessel_y(0, x) + bessel_y(2, x) == pytest.approx(2.0 / x * bessel_y(1, x), rel=1e-13)

    def test_large_argument_asymptotics(self):
        """H_0(200) follows the two-term asymptotic expansion"""
        x = 200.0
        asymptotic = np.sqrt(2.0 / (np.pi * x)) * np.exp(1j * (x - np.pi / 4)) * (1.0 - 1j / (8.0 * x))
        assert abs(hankel1(0, x) - asymptotic) < 1e-4 * abs(asymptotic)


class TestDomain:
    """Test argument and order validation"""

    def test_negative_argument(self):
        """J_n(−1) is rejected"""
        with pytest.raises(DomainError):
            bessel_j(0, -1.0)

    def test_y_at_zero(self):
        """Y_n and H_n are undefined at 0"""
        with pytest.raises(DomainError):
            bessel_y(0, 0.0)
        with pytest.raises(DomainError):
            hankel1(1, np.array([1.0, 0.0]))

    def test_j_at_zero(self):
        """J_0(0) = 1, J_1(0) = 0"""
        assert bessel_j(0, 0.0) == 1.0
        assert bessel_j(1, 0.0) == 0.0

    def test_unsupported_order(self):
        """Only orders 0, 1 and 2 are provided"""
        with pytest.raises(ValueError):
            bessel_j(3, 1.0)

    def test_domain_error_is_value_error(self):
        """Callers catching ValueError also catch DomainError"""
        with pytest.raises(ValueError):
            bessel_y(2, -0.5)


class TestLogSplit:
    """Test the analytic/log decomposition used by the kernels"""

    @pytest.mark.parametrize("order", [0, 1, 2])
    def test_reconstruction(self, order):
        """analytic + (2i/π) log(x) J_n reproduces H_n"""
        x = np.logspace(-3, np.log10(50.0), 1000)
        analytic, log_coeff = hankel1_log_split(order, x)
        rebuilt = analytic + (2j / np.pi) * np.log(x) * log_coeff
        expected = special.hankel1(order, x)
        assert np.max(np.abs(rebuilt - expected) / np.abs(expected)) < 1e-12

    def test_log_coefficient_is_j(self):
        """The log coefficient is J_n itself"""
        x = np.array([0.2, 1.7, 9.0])
        _, log_coeff = hankel1_log_split(2, x)
        assert np.abs(log_coeff - special.jv(2, x)).max() == 0.0

    def test_order_zero_limit(self):
        """H_0 analytic part at 0 is 1 + (2i/π)(γ_E − log 2)"""
        analytic, log_coeff = hankel1_log_split(0, np.array([0.0]))
        assert analytic[0] == pytest.approx(1.0 + 2j / np.pi * (EULER_GAMMA - np.log(2.0)), abs=1e-15)
        assert log_coeff[0] == 1.0

    @pytest.mark.parametrize("order", [1, 2])
    def test_pole_at_zero(self, order):
        """Higher orders refuse x = 0"""
        with pytest.raises(SingularEvaluationError):
            hankel1_log_split(order, np.array([0.0, 1.0]))


class TestRegularParts:
    """Test the pieces of the small-argument expansion"""

    @pytest.mark.parametrize("order", [0, 1, 2])
    def test_continuity_at_series_switch(self, order):
        """Series and subtraction branches agree across x = 1"""
        below = neumann_regular_part(order, np.nextafter(1.0, 0.0))[0]
        above = neumann_regular_part(order, 1.0)[0]
        assert below == pytest.approx(above, abs=1e-13)

    @pytest.mark.parametrize("order", [0, 1, 2])
    def test_defining_relation(self, order):
        """P_n = Y_n − (2/π) log(x) J_n − pole_n on both branches"""
        x = np.array([0.05, 0.4, 0.9, 1.3, 7.5])
        expected = (special.yv(order, x) - (2.0 / np.pi) * np.log(x) * special.jv(order, x)
                    - neumann_pole_part(order, x))
        assert np.abs(neumann_regular_part(order, x) - expected).max() < 1e-12

    def test_values_at_zero(self):
        """P_0(0) = (2/π)(γ_E − log 2), P_1(0) = P_2(0) = 0"""
        assert neumann_regular_part(0, 0.0)[0] == pytest.approx(2.0 / np.pi * (EULER_GAMMA - np.log(2.0)))
        assert neumann_regular_part(1, 0.0)[0] == 0.0
        assert neumann_regular_part(2, 0.0)[0] == 0.0

    def test_pole_parts(self):
        """pole_1 = −2/(πx), pole_2 = −(4/x² + 1)/π"""
        assert neumann_pole_part(0, 2.0) == 0.0
        assert neumann_pole_part(1, 2.0) == pytest.approx(-1.0 / np.pi)
        assert neumann_pole_part(2, 2.0) == pytest.approx(-2.0 / np.pi)

    def test_j1_over_x(self):
        """J_1(x)/x → 1/2 and matches the quotient away from 0"""
        x = np.array([0.0, 5e-4, 0.3, 4.0])
        values = bessel_j1_over_x(x)
        assert values[0] == 0.5
        assert values[1:] == pytest.approx(special.j1(x[1:]) / x[1:], rel=1e-13)

    def test_p1_over_x(self):
        """P_1(x)/x is finite at 0 and matches the quotient elsewhere"""
        x = np.array([0.0, 0.2, 0.99, 2.5])
        values = neumann_regular_part1_over_x(x)
        assert np.isfinite(values[0])
        assert values[1:] == pytest.approx(neumann_regular_part(1, x[1:]) / x[1:], rel=1e-12)


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
