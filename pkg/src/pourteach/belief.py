"""Weighted-sample belief over candidate pour targets and its recursive update.

The belief is a probability mass function over a fixed, sorted grid of goal
candidates (grams). Each observation multiplies the weights by a per-goal
likelihood and renormalizes; with the sample locations fixed this is exact
discrete Bayes, which is also what the brute-force test oracle computes.
Only this deterministic fixed-grid form is implemented (no stochastic
proposals, no resampling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Floor applied to each likelihood value before the product so a single noisy
# observation cannot irreversibly zero out a grid point.
LIKELIHOOD_FLOOR = 1e-12

NORMALIZATION_TOL = 1e-9


class InvalidGridError(ValueError):
    """Goal grid is empty, unsorted, or contains negative values."""


class DegeneratePosteriorError(RuntimeError):
    """Every goal has zero posterior mass: the observation model is
    inconsistent with all candidates."""


@dataclass(frozen=True)
class GoalGrid:
    """Sorted candidate goal amounts in grams."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise InvalidGridError("goal grid must contain at least one value")
        if not np.all(np.isfinite(values)):
            raise InvalidGridError("goal grid values must be finite")
        if np.any(values < 0.0):
            raise InvalidGridError("goal amounts cannot be negative")
        if values.size > 1 and not np.all(np.diff(values) > 0.0):
            raise InvalidGridError("goal grid must be strictly increasing")
        object.__setattr__(self, "values", values)

    @classmethod
    def uniform(cls, min_g: float, max_g: float, count: int) -> "GoalGrid":
        """Evenly spaced grid over [min_g, max_g] with `count` points."""
        if count < 1:
            raise InvalidGridError("grid count must be >= 1")
        if count == 1:
            return cls(np.array([float(min_g)]))
        return cls(np.linspace(float(min_g), float(max_g), count))

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class Belief:
    """Normalized weights over the goal grid."""

    grid: GoalGrid
    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (len(self.grid),):
            raise ValueError("weights length must match the goal grid")
        if np.any(weights < 0.0) or np.any(weights > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        if abs(float(weights.sum()) - 1.0) > NORMALIZATION_TOL:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "weights", weights)


def init_belief(grid: GoalGrid) -> Belief:
    """Uniform prior: every candidate gets weight 1/|grid|."""
    n = len(grid)
    return Belief(grid, np.full(n, 1.0 / n))


def update_belief(belief: Belief, likelihoods: np.ndarray) -> Belief:
    """One Bayes step: multiply weights by per-goal likelihoods, renormalize.

    Likelihood values are floored at LIKELIHOOD_FLOOR before the product.
    Raises DegeneratePosteriorError when no candidate has positive
    likelihood (or the normalizer underflows to zero).
    """
    like = np.asarray(likelihoods, dtype=float)
    if like.shape != belief.weights.shape:
        raise ValueError("likelihood vector length must match the belief")
    if not np.all(np.isfinite(like)) or np.any(like < 0.0):
        raise ValueError("likelihoods must be finite and nonnegative")
    if not np.any(like > 0.0):
        raise DegeneratePosteriorError("all goal candidates have zero likelihood")
    if np.all(like == like[0]):
        return belief  # constant evidence: renormalizing is the identity
    like = np.maximum(like, LIKELIHOOD_FLOOR)
    unnormalized = belief.weights * like
    # exactly-rounded sum: the normalizer is independent of element order,
    # so jointly permuting goals, weights and likelihoods permutes the
    # posterior bit-for-bit
    eta = math.fsum(unnormalized)
    if eta <= 0.0:
        raise DegeneratePosteriorError("posterior mass underflowed to zero")
    return Belief(belief.grid, unnormalized / eta)


def map_estimate(belief: Belief) -> float:
    """Goal with the highest weight; ties go to the smallest amount
    (under-pouring is recoverable, over-pouring is not)."""
    return float(belief.grid.values[int(np.argmax(belief.weights))])


def mean_estimate(belief: Belief) -> float:
    """Weight-averaged goal amount."""
    return float(belief.weights @ belief.grid.values)


def entropy(belief: Belief) -> float:
    """Shannon entropy in nats, with 0·ln 0 = 0."""
    w = belief.weights
    nonzero = w > 0.0
    return float(-np.sum(w[nonzero] * np.log(w[nonzero])))
