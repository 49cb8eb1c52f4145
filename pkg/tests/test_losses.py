import numpy as np
import pytest

from qsimnet import (
    LossWeights,
    ShapeError,
    ValidationError,
    consistency_loss,
    total_loss,
    triplet_loss_l1,
    triplet_loss_l2,
)


class TestTripletL2:
    def test_pull_only(self):
        assert triplet_loss_l2((0, 0), (0, 0), (1, 0)) == -1.0

    def test_symmetric_distances_cancel(self):
        assert triplet_loss_l2((0, 0), (1, 0), (0, 1)) == 0.0

    def test_degenerate(self):
        p = (0.3, -0.4)
        assert triplet_loss_l2(p, p, p) == 0.0

    def test_antisymmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            a, p, n = rng.uniform(-1, 1, (3, 2))
            assert triplet_loss_l2(a, p, n) == pytest.approx(-triplet_loss_l2(a, n, p), abs=1e-12)

    def test_wrong_arity(self):
        with pytest.raises(ShapeError):
            triplet_loss_l2((0, 0, 0), (0, 0), (0, 0))


class TestTripletL1:
    def test_pull_only(self):
        assert triplet_loss_l1((0, 0), (0, 0), (1, 1)) == -2.0

    def test_symmetric_distances_cancel(self):
        assert triplet_loss_l1((0, 0), (0.5, 0), (0, 0.5)) == 0.0

    def test_antisymmetry(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            a, p, n = rng.uniform(-1, 1, (3, 2))
            assert triplet_loss_l1(a, p, n) == pytest.approx(-triplet_loss_l1(a, n, p), abs=1e-12)

    def test_optional_margin_clamp(self):
        assert triplet_loss_l1((0, 0), (0, 0), (1, 1), margin=1.0) == 0.0
        assert triplet_loss_l1((0, 0), (1, 1), (0, 0), margin=1.0) == 3.0


class TestConsistency:
    def test_identical_projections(self):
        assert consistency_loss((0.2, -0.3), (0.2, -0.3)) == 0.0

    def test_maximal(self):
        assert consistency_loss((1, 1), (-1, -1)) == 4.0

    def test_symmetric(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            u, v = rng.uniform(-1, 1, (2, 2))
            assert consistency_loss(u, v) == consistency_loss(v, u)

    def test_nonnegative_and_zero_iff_equal(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            u, v = rng.uniform(-1, 1, (2, 2))
            value = consistency_loss(u, v)
            assert value >= 0.0
            assert (value == 0.0) == bool(np.all(u == v))


class TestTotalLoss:
    def test_alpha_only(self):
        assert total_loss(LossWeights(1.0, 0.0), -1.7, 0.9) == -1.7

    def test_beta_only(self):
        assert total_loss(LossWeights(0.0, 1.0), -1.7, 0.9) == 0.9

    def test_arithmetic(self):
        assert total_loss(LossWeights(1.0, 1.0), -2.0, 0.5) == -1.5

    def test_weight_validation(self):
        with pytest.raises(ValidationError):
            LossWeights(0.0, 0.0)
        with pytest.raises(ValidationError):
            LossWeights(-1.0, 1.0)
        with pytest.raises(ValidationError):
            total_loss(LossWeights(), float("nan"), 0.0)


def test_bounds_on_random_projections():
    rng = np.random.default_rng(4)
    for _ in range(2000):
        a, p, n = rng.uniform(-1, 1, (3, 2))
        assert abs(triplet_loss_l1(a, p, n)) <= 4.0 + 1e-12
        assert abs(triplet_loss_l2(a, p, n)) <= 8.0 + 1e-12
        assert consistency_loss(a, p) <= 4.0 + 1e-12


def test_translation_invariance():
    # both objectives depend only on the differences a-p and a-n, so a
    # common shift of all three projections never changes them
    rng = np.random.default_rng(5)
    for _ in range(100):
        a, p, n = rng.uniform(-1, 1, (3, 2))
        shift = rng.uniform(-0.5, 0.5, 2)
        assert triplet_loss_l2(a + shift, p + shift, n + shift) == pytest.approx(
            triplet_loss_l2(a, p, n), abs=1e-12
        )
        assert triplet_loss_l1(a + shift, p + shift, n + shift) == pytest.approx(
            triplet_loss_l1(a, p, n), abs=1e-12
        )
