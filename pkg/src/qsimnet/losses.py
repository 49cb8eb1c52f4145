"""Loss functions over projection coordinates.

A projection is a point in [-1, 1]^2: the Z expectations of a sample's two
designated qubits. The triplet losses come in a squared-distance and an
absolute-distance variant; both are signed and unbounded below (no margin
unless one is requested). The consistency loss penalizes the anchor
landing on different coordinates in the two runs of the interwoven-pair
protocol.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ShapeError, ValidationError


@dataclass(frozen=True)
class LossWeights:
    """Weights of the objective (alpha) and consistency (beta) terms."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValidationError("loss weights must be nonnegative")
        if self.alpha == 0 and self.beta == 0:
            raise ValidationError("at least one loss weight must be positive")


def _coords(p, arity: int = 2) -> np.ndarray:
    a = np.asarray(p, dtype=np.float64)
    if a.shape != (arity,):
        raise ShapeError(f"expected a {arity}-coordinate projection, got shape {a.shape}")
    return a


def l1_distance(u, v) -> float:
    return float(np.sum(np.abs(_coords(u) - _coords(v))))


def squared_distance(u, v) -> float:
    return float(np.sum((_coords(u) - _coords(v)) ** 2))


def triplet_loss_l2(a, p, n, margin: float | None = None) -> float:
    """Squared-distance triplet loss: ||a - p||^2 - ||a - n||^2.

    With margin set, clamps to max(loss + margin, 0) instead (off by default).
    """
    loss = squared_distance(a, p) - squared_distance(a, n)
    if margin is not None:
        return max(loss + margin, 0.0)
    return loss


def triplet_loss_l1(a, p, n, margin: float | None = None) -> float:
    """Absolute-distance triplet loss: |a - p|_1 - |a - n|_1."""
    loss = l1_distance(a, p) - l1_distance(a, n)
    if margin is not None:
        return max(loss + margin, 0.0)
    return loss


def consistency_loss(anchor_from_positive_run, anchor_from_negative_run) -> float:
    """L1 discrepancy between the anchor's projections across the two runs."""
    return l1_distance(anchor_from_positive_run, anchor_from_negative_run)


def total_loss(weights: LossWeights, objective: float, consistency: float) -> float:
    """Weighted sum alpha * objective + beta * consistency."""
    if not (np.isfinite(objective) and np.isfinite(consistency)):
        raise ValidationError("loss terms must be finite")
    return weights.alpha * objective + weights.beta * consistency
