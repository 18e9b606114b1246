"""Unit tests for Hermite polynomials."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import hermite_e

from chaoslab.chaos.hermite import TABLE_MAX_DEGREE, HermiteTable, hermite, probabilists_table


class TestHermite:
    """Tests for H_n = He_n / n!."""

    def test_low_degrees(self):
        """H_0 = 1, H_1 = x, H_2 = (x^2 - 1)/2, H_3 = (x^3 - 3x)/6."""
        x = 1.7
        assert hermite(0, x) == pytest.approx(1.0)
        assert hermite(1, x) == pytest.approx(x)
        assert hermite(2, x) == pytest.approx((x**2 - 1.0) / 2.0)
        assert hermite(3, x) == pytest.approx((x**3 - 3.0 * x) / 6.0)

    def test_array_input(self):
        """Arrays are evaluated elementwise and stay arrays."""
        x = np.array([-1.0, 0.0, 2.0])
        np.testing.assert_allclose(hermite(2, x), (x**2 - 1.0) / 2.0)

    def test_negative_degree(self):
        with pytest.raises(ValueError, match="non-negative"):
            hermite(-1, 0.0)

    @given(
        st.integers(min_value=1, max_value=15),
        st.floats(min_value=-4.0, max_value=4.0, allow_nan=False),
    )
    def test_recurrence(self, n, x):
        """(n + 1) H_{n+1}(x) = x H_n(x) - H_{n-1}(x)."""
        lhs = (n + 1) * hermite(n + 1, x)
        rhs = x * hermite(n, x) - hermite(n - 1, x)
        assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_gaussian_orthogonality(self):
        """E[H_n(Z) H_m(Z)] = delta_nm / n! for standard Gaussian Z."""
        nodes, weights = hermite_e.hermegauss(40)
        weights = weights / math.sqrt(2.0 * math.pi)
        for n in range(6):
            for m in range(6):
                value = float(np.sum(weights * hermite(n, nodes) * hermite(m, nodes)))
                expected = 1.0 / math.factorial(n) if n == m else 0.0
                assert value == pytest.approx(expected, abs=1e-12)

    def test_probabilists_table(self):
        """The table holds He_0..He_degree along the last axis."""
        x = np.array([[0.5, -1.0]])
        table = probabilists_table(x, 3)
        assert table.shape == (1, 2, 4)
        np.testing.assert_allclose(table[..., 3], x**3 - 3.0 * x)
        np.testing.assert_allclose(table[..., 0], 1.0)


class TestHermiteTable:
    """Tests for the precomputed coefficient table."""

    def test_recurrence_residual_is_tiny(self):
        assert HermiteTable.build().recurrence_residual() < 1e-12

    def test_evaluate_matches_direct(self):
        """Table evaluation agrees with hermite() up to the table degree."""
        table = HermiteTable.build()
        x = np.linspace(-3.0, 3.0, 13)
        for n in (0, 4, 9, TABLE_MAX_DEGREE):
            np.testing.assert_allclose(table.evaluate(n, x), hermite(n, x), rtol=1e-9, atol=1e-14)

    def test_evaluate_above_table_degree(self):
        """Degrees above the table fall back to direct evaluation."""
        table = HermiteTable.build(max_degree=4)
        assert table.evaluate(6, 0.3) == pytest.approx(hermite(6, 0.3))
