"""Unit tests for chaos expansions and single-chaos diagnostics."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chaoslab.chaos.diagnostics import (
    contraction_diagnostics,
    contraction_range,
    cross_contraction_norms,
    fourth_cumulant,
    fourth_moment,
    fourth_moment_gram,
    independence_criterion,
)
from chaoslab.chaos.expansion import (
    ChaosExpansion,
    covariance,
    eval_multiple_integral,
    exponential_expansion,
    multiply,
)
from chaoslab.exceptions import (
    ContractionOrderError,
    DimensionMismatchError,
    OrderCapExceededError,
)
from chaoslab.tensor.dense import DenseSymTensor, DenseTensor, norm, symmetrize
from chaoslab.tensor.gram import GramMatrix, RankOneSum


def random_sym(rng: np.random.Generator, dim: int, order: int) -> DenseSymTensor:
    if order == 0:
        return DenseSymTensor.scalar_tensor(float(rng.standard_normal()))
    return symmetrize(DenseTensor(rng.standard_normal((dim,) * order)))


def random_expansion(rng: np.random.Generator, dim: int, orders: list[int]) -> ChaosExpansion:
    return ChaosExpansion(dim, {n: random_sym(rng, dim, n) for n in orders})


class TestMultipleIntegrals:
    """Tests for pointwise evaluation of I_p(f)."""

    def test_first_chaos_is_linear(self, rng):
        """I_1(h) at w is <h, w>."""
        h = rng.standard_normal(3)
        w = rng.standard_normal(3)
        assert eval_multiple_integral(DenseSymTensor(h), w) == pytest.approx(float(h @ w))

    def test_second_chaos_on_basis(self):
        """I_2(e_0 (x) e_0) = w_0^2 - 1 and I_2(e_0 (x)~ e_1) = w_0 w_1 / 2."""
        w = np.array([1.5, -0.5])
        diag = DenseSymTensor(np.array([[1.0, 0.0], [0.0, 0.0]]))
        assert eval_multiple_integral(diag, w) == pytest.approx(1.5**2 - 1.0)
        off = DenseSymTensor(np.array([[0.0, 0.5], [0.5, 0.0]]))
        assert eval_multiple_integral(off, w) == pytest.approx(1.5 * -0.5)

    def test_batch_evaluation(self, rng):
        """An (n, m) batch gives one value per row."""
        f = random_sym(rng, 2, 2)
        w = rng.standard_normal((5, 2))
        batch = eval_multiple_integral(f, w)
        assert batch.shape == (5,)
        assert batch[3] == pytest.approx(eval_multiple_integral(f, w[3]))

    def test_wrong_sample_dimension(self, rng):
        with pytest.raises(DimensionMismatchError):
            eval_multiple_integral(random_sym(rng, 3, 2), np.zeros(2))


class TestChaosExpansion:
    """Tests for the ChaosExpansion algebra."""

    def test_kernel_orders_checked(self):
        """Kernels must sit at their own order."""
        with pytest.raises(DimensionMismatchError):
            ChaosExpansion(2, {2: DenseSymTensor(np.ones(2))})

    def test_mean_and_variance(self, rng):
        """Var I_p(f) = p! |f|^2 and the constant is the mean."""
        f = random_sym(rng, 3, 2)
        X = ChaosExpansion(3, {0: DenseSymTensor.scalar_tensor(1.5), 2: f})
        assert X.mean == pytest.approx(1.5)
        assert X.variance() == pytest.approx(2.0 * norm(f) ** 2)
        assert X.second_moment() == pytest.approx(X.variance() + 2.25)

    def test_distinct_chaoses_are_orthogonal(self, rng):
        X = random_expansion(rng, 2, [1])
        Y = random_expansion(rng, 2, [2])
        assert covariance(X, Y) == 0.0

    def test_is_pure(self, rng):
        assert random_expansion(rng, 2, [2]).is_pure()
        assert not random_expansion(rng, 2, [1, 2]).is_pure()
        assert not ChaosExpansion.constant(2, 1.0).is_pure()

    def test_addition_requires_same_space(self, rng):
        with pytest.raises(DimensionMismatchError):
            random_expansion(rng, 2, [1]) + random_expansion(rng, 3, [1])

    def test_centered_drops_mean(self, rng):
        X = random_expansion(rng, 2, [0, 1])
        assert X.centered().mean == 0.0
        assert X.centered().variance() == pytest.approx(X.variance())

    @pytest.mark.parametrize(("left", "right"), [([1], [1]), ([2], [1]), ([0, 1, 2], [1, 2]), ([3], [2])])
    def test_product_formula_pointwise(self, rng, left, right):
        """multiply(F, G) evaluates to F(w) G(w) at every point."""
        F = random_expansion(rng, 2, left)
        G = random_expansion(rng, 2, right)
        product = multiply(F, G)
        w = rng.standard_normal((6, 2))
        np.testing.assert_allclose(product.evaluate(w), F.evaluate(w) * G.evaluate(w), rtol=1e-10, atol=1e-10)

    @pytest.mark.parametrize("pair", range(100))
    def test_product_formula_random_pairs(self, pair):
        """Random single-chaos pairs, 100 points each, relative error below 1e-8."""
        rng = np.random.default_rng(10_000 + pair)
        dim = int(rng.integers(1, 4))
        p, q = (int(n) for n in rng.integers(1, 4, size=2))
        F = random_expansion(rng, dim, [p])
        G = random_expansion(rng, dim, [q])
        w = rng.standard_normal((100, dim))
        expected = F.evaluate(w) * G.evaluate(w)
        got = multiply(F, G).evaluate(w)
        scale = np.maximum(np.abs(expected), 1.0)
        assert np.max(np.abs(got - expected) / scale) <= 1e-8

    @given(
        st.integers(min_value=0, max_value=2**32 - 1),
        st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=3, unique=True),
        st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=3, unique=True),
    )
    def test_product_formula_property(self, seed, left, right):
        """Mixed-order expansions multiply pointwise."""
        rng = np.random.default_rng(seed)
        F = random_expansion(rng, 2, left)
        G = random_expansion(rng, 2, right)
        w = rng.standard_normal((20, 2))
        expected = F.evaluate(w) * G.evaluate(w)
        scale = np.maximum(np.abs(expected), 1.0)
        assert np.max(np.abs(multiply(F, G).evaluate(w) - expected) / scale) <= 1e-8

    def test_product_of_first_chaoses(self):
        """W(h) W(g) = I_2(h (x)~ g) + <h, g>."""
        h, g = np.array([1.0, 2.0]), np.array([0.5, -1.0])
        product = multiply(ChaosExpansion.first_chaos(h), ChaosExpansion.first_chaos(g))
        assert product.mean == pytest.approx(float(h @ g))
        np.testing.assert_allclose(
            product.kernel(2).coeffs, 0.5 * (np.outer(h, g) + np.outer(g, h))
        )

    def test_order_cap(self, rng):
        """Products above the cap are refused."""
        X = random_expansion(rng, 2, [3])
        with pytest.raises(OrderCapExceededError):
            multiply(X, X, order_cap=5)

    def test_missing_kernel_is_zero(self, rng):
        X = random_expansion(rng, 2, [1])
        assert not np.any(X.kernel(3).coeffs)
        assert X.kernel(0).scalar() == 0.0


class TestExponentialExpansion:
    """Tests for the truncated expansion of exp(W(h))."""

    def test_pointwise_value(self):
        """A long truncation reproduces exp(W(h)) pointwise."""
        h = np.array([0.3, 0.4])
        truncated = exponential_expansion(h, order=20)
        w = np.array([0.5, -1.0])
        assert truncated.expansion.evaluate(w) == pytest.approx(math.exp(float(h @ w)), rel=1e-10)

    def test_tail_mass_completes_second_moment(self):
        """Kept second moment plus the tail mass equals E exp(2 W(h)) = e^{2|h|^2}."""
        h = np.ones(1)
        truncated = exponential_expansion(h, order=6)
        assert truncated.expansion.second_moment() + truncated.tail_mass == pytest.approx(
            math.exp(2.0), rel=1e-12
        )

    def test_mean(self):
        """E exp(W(h)) = exp(|h|^2 / 2)."""
        h = np.array([0.6, 0.8])
        assert exponential_expansion(h, order=3).expansion.mean == pytest.approx(math.exp(0.5))

    def test_zero_direction(self):
        """exp(W(0)) = 1 with no tail."""
        truncated = exponential_expansion(np.zeros(2), order=3)
        assert truncated.tail_mass == 0.0
        assert truncated.expansion.mean == pytest.approx(1.0)


def _rank_one_second_chaos(rng: np.random.Generator, size: int = 4) -> RankOneSum:
    vectors = rng.standard_normal((size, size + 1))
    gram = GramMatrix(vectors @ vectors.T)
    return RankOneSum(2, rng.standard_normal(size), np.arange(size), gram)


class TestDiagnostics:
    """Tests for fourth moments and contractions."""

    def test_first_chaos_has_zero_fourth_cumulant(self, rng):
        X = ChaosExpansion.first_chaos(rng.standard_normal(3))
        assert fourth_cumulant(X) == pytest.approx(0.0, abs=1e-10)

    def test_second_chaos_fourth_cumulant_positive(self, rng):
        X = ChaosExpansion.pure(random_sym(rng, 3, 2))
        assert fourth_cumulant(X) > 0.0

    def test_fourth_moment_gram_matches_dense(self, rng):
        """The Gram-path E X^4 agrees with dense chaos algebra for p = 2."""
        f = _rank_one_second_chaos(rng)
        X = ChaosExpansion.pure(f.densify())
        assert fourth_moment_gram(f) == pytest.approx(fourth_moment(X), rel=1e-8)

    def test_fourth_moment_gram_order_limit(self, rng):
        f = _rank_one_second_chaos(rng)
        cubic = RankOneSum(3, f.weights, f.atoms, f.gram)
        with pytest.raises(ContractionOrderError):
            fourth_moment_gram(cubic)

    def test_fourth_moment_needs_pure_chaos(self, rng):
        with pytest.raises(ContractionOrderError):
            fourth_moment(random_expansion(rng, 2, [1, 2]))

    def test_contraction_diagnostics_dense_and_gram_agree(self, rng):
        f = _rank_one_second_chaos(rng)
        gram_values = contraction_diagnostics(f)
        dense_values = contraction_diagnostics(f.densify())
        np.testing.assert_allclose(gram_values, dense_values, rtol=1e-8)

    def test_contraction_diagnostics_needs_order_two(self):
        with pytest.raises(ContractionOrderError):
            contraction_diagnostics(DenseSymTensor(np.ones(2)))

    def test_contraction_range(self):
        """The full contraction is excluded only when p = q."""
        assert list(contraction_range(2, 2)) == [1]
        assert list(contraction_range(2, 3)) == [1, 2]
        assert list(contraction_range(3, 3)) == [1, 2]

    def test_cross_contraction_norms_length(self, rng):
        f = random_sym(rng, 2, 2)
        g = random_sym(rng, 2, 3)
        assert len(cross_contraction_norms(f, g)) == 2

    def test_mixed_kernel_types_rejected(self, rng):
        with pytest.raises(DimensionMismatchError):
            cross_contraction_norms(_rank_one_second_chaos(rng), random_sym(rng, 4, 2))

    def test_independence_criterion(self):
        """Chaoses over orthogonal directions are independent, shared ones are not."""
        e0, e1 = DenseSymTensor.basis(2, 0), DenseSymTensor.basis(2, 1)
        square1 = DenseSymTensor(np.array([[0.0, 0.0], [0.0, 1.0]]))
        square0 = DenseSymTensor(np.array([[1.0, 0.0], [0.0, 0.0]]))
        assert independence_criterion(e0, square1).independent
        verdict = independence_criterion(e0, square0)
        assert not verdict.independent
        assert verdict.contraction_norm == pytest.approx(1.0)
