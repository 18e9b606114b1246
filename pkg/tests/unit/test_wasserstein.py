"""Unit tests for the empirical Wasserstein estimators."""

import numpy as np
import pytest

from chaoslab.distance.wasserstein import (
    EmpiricalSample,
    SlicedSettings,
    independence_gap,
    independence_gap_estimate,
    product_sample,
    projection_directions,
    self_distance_baseline,
    w1_1d,
    w1_sliced,
    w1_sliced_estimate,
)
from chaoslab.exceptions import SampleMismatchError


class TestEmpiricalSample:
    """Tests for sample construction and reshaping."""

    def test_vector_becomes_column(self):
        sample = EmpiricalSample.from_array([1.0, 2.0, 3.0])
        assert (sample.n, sample.d) == (3, 1)

    def test_from_columns(self):
        sample = EmpiricalSample.from_columns(np.arange(4), np.ones(4))
        assert (sample.n, sample.d) == (4, 2)
        np.testing.assert_array_equal(sample.column(1).values[:, 0], np.ones(4))

    @pytest.mark.parametrize(
        "values",
        [np.array([1.0]), np.array([1.0, np.nan]), np.zeros((2, 2, 2))],
    )
    def test_invalid_samples(self, values):
        with pytest.raises(SampleMismatchError):
            EmpiricalSample(values)

    def test_split_and_block(self):
        sample = EmpiricalSample(np.arange(12, dtype=float).reshape(4, 3))
        first, second = sample.split()
        assert first.n == second.n == 2
        assert sample.block(1).d == 2

    def test_odd_split_rejected(self):
        with pytest.raises(SampleMismatchError):
            EmpiricalSample(np.arange(5)).split()

    def test_rotated(self):
        quarter_turn = np.array([[0.0, -1.0], [1.0, 0.0]])
        sample = EmpiricalSample(np.array([[1.0, 0.0], [0.0, 2.0]]))
        np.testing.assert_allclose(sample.rotated(quarter_turn).values, [[0.0, 1.0], [-2.0, 0.0]])


class TestW1:
    """Tests for one-dimensional and sliced distances."""

    def test_shift(self):
        """Shifting a sample by c moves it a distance |c|."""
        a = EmpiricalSample.from_array(np.arange(4.0))
        assert w1_1d(a, EmpiricalSample(a.values + 0.5)) == pytest.approx(0.5)

    def test_scaling_is_linear(self, rng):
        a = EmpiricalSample.from_array(rng.standard_normal(50))
        b = EmpiricalSample.from_array(rng.standard_normal(50))
        assert w1_1d(a.scaled(3.0), b.scaled(3.0)) == pytest.approx(3.0 * w1_1d(a, b))

    def test_size_mismatch(self):
        a = EmpiricalSample.from_array(np.ones(10))
        b = EmpiricalSample.from_array(3.0 * np.ones(6))
        with pytest.raises(SampleMismatchError):
            w1_1d(a, b)
        assert w1_1d(a, b, resample=True, seed=4) == pytest.approx(2.0)

    def test_one_dimensional_only(self):
        a = EmpiricalSample(np.zeros((3, 2)))
        with pytest.raises(SampleMismatchError):
            w1_1d(a, a)

    def test_sliced_on_axes(self):
        """Axis mode averages the per-coordinate distances."""
        a = EmpiricalSample(np.column_stack([np.arange(4.0), np.arange(4.0)]))
        b = EmpiricalSample(a.values + np.array([1.0, 0.0]))
        assert w1_sliced(a, b, SlicedSettings(axis_mode=True)) == pytest.approx(0.5)

    def test_sliced_dimension_mismatch(self):
        with pytest.raises(SampleMismatchError):
            w1_sliced(EmpiricalSample(np.zeros((3, 2))), EmpiricalSample(np.zeros((3, 1))))

    def test_single_projection_has_no_error_bar(self, rng):
        a = EmpiricalSample(rng.standard_normal((20, 2)))
        b = EmpiricalSample(rng.standard_normal((20, 2)))
        _, stderr = w1_sliced_estimate(a, b, SlicedSettings(projections=1))
        assert stderr == 0.0

    def test_projection_directions(self):
        directions = projection_directions(3, SlicedSettings(projections=7), seed=2)
        assert directions.shape == (7, 3)
        np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0)
        with pytest.raises(SampleMismatchError):
            projection_directions(3, SlicedSettings(projections=0), seed=2)


class TestIndependenceGap:
    """Tests for the joint-versus-product gap and its baseline."""

    def test_dependent_coordinates_stand_out(self, rng):
        """Y = X gives a gap far above the self-distance floor."""
        x = rng.standard_normal(4000)
        joint = EmpiricalSample.from_columns(x, x)
        settings = SlicedSettings(projections=32)
        gap = independence_gap(joint, 1, settings, seed=1)
        assert gap > 3.0 * self_distance_baseline(joint, settings, seed=1)

    def test_independent_coordinates_have_small_gap(self, rng):
        joint = EmpiricalSample(rng.standard_normal((4000, 2)))
        gap, stderr = independence_gap_estimate(joint, 1, SlicedSettings(projections=32), seed=1)
        assert gap < 0.1
        assert stderr >= 0.0

    def test_product_sample_keeps_marginals(self, rng):
        joint = EmpiricalSample(rng.standard_normal((10, 3)))
        product = product_sample(joint, 1, seed=0)
        np.testing.assert_array_equal(product.values[:, 0], joint.values[:, 0])
        np.testing.assert_array_equal(np.sort(product.values[:, 2]), np.sort(joint.values[:, 2]))

    @pytest.mark.parametrize("split", [0, 2])
    def test_split_index_checked(self, split):
        with pytest.raises(SampleMismatchError):
            product_sample(EmpiricalSample(np.zeros((4, 2))), split, seed=0)
