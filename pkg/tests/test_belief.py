from __future__ import annotations

import math

import numpy as np
import pytest

from pourteach.belief import (
    Belief,
    DegeneratePosteriorError,
    GoalGrid,
    InvalidGridError,
    entropy,
    init_belief,
    map_estimate,
    mean_estimate,
    update_belief,
)


def brute_force_posterior(prior: np.ndarray, likelihood_seq) -> np.ndarray:
    """Independent oracle: prior times the elementwise product of all
    likelihoods, normalized once."""
    post = prior.copy()
    for like in likelihood_seq:
        post = post * np.asarray(like, dtype=float)
    return post / post.sum()


def direct_entropy(weights) -> float:
    """Independent oracle: plain summation with 0*ln(0) = 0."""
    total = 0.0
    for w in weights:
        if w > 0.0:
            total -= w * math.log(w)
    return total


# --- grid and construction -------------------------------------------------

def test_grid_requires_at_least_one_value() -> None:
    with pytest.raises(InvalidGridError):
        GoalGrid(np.array([]))


def test_grid_rejects_unsorted_and_negative() -> None:
    with pytest.raises(InvalidGridError):
        GoalGrid(np.array([10.0, 5.0]))
    with pytest.raises(InvalidGridError):
        GoalGrid(np.array([-1.0, 5.0]))
    with pytest.raises(InvalidGridError):
        GoalGrid(np.array([5.0, 5.0]))


def test_uniform_grid_spacing() -> None:
    grid = GoalGrid.uniform(0.0, 500.0, 101)
    assert len(grid) == 101
    assert grid.values[0] == 0.0
    assert grid.values[-1] == 500.0
    assert np.allclose(np.diff(grid.values), 5.0)


def test_belief_rejects_unnormalized_weights() -> None:
    grid = GoalGrid.uniform(0.0, 100.0, 3)
    with pytest.raises(ValueError):
        Belief(grid, np.array([0.5, 0.5, 0.5]))
    with pytest.raises(ValueError):
        Belief(grid, np.array([0.5, 0.5]))


# --- init_belief -----------------------------------------------------------

def test_init_belief_is_uniform_over_five_goals() -> None:
    belief = init_belief(GoalGrid.uniform(0.0, 400.0, 5))
    assert np.array_equal(belief.weights, np.full(5, 0.2))


def test_init_belief_singleton() -> None:
    belief = init_belief(GoalGrid(np.array([75.0])))
    assert np.array_equal(belief.weights, np.array([1.0]))


def test_init_belief_empty_grid_raises() -> None:
    with pytest.raises(InvalidGridError):
        GoalGrid.uniform(0.0, 100.0, 0)


# --- update_belief ---------------------------------------------------------

def test_uniform_likelihood_leaves_belief_invariant() -> None:
    belief = init_belief(GoalGrid.uniform(0.0, 100.0, 2))
    updated = update_belief(belief, np.array([1.0, 1.0]))
    assert np.array_equal(updated.weights, np.array([0.5, 0.5]))


def test_constant_likelihood_is_exact_identity_for_any_belief() -> None:
    rng = np.random.default_rng(6)
    grid = GoalGrid.uniform(0.0, 500.0, 13)
    for _ in range(20):
        belief = update_belief(init_belief(grid), rng.uniform(0.1, 5.0, size=13))
        c = float(rng.uniform(1e-6, 1e6))
        updated = update_belief(belief, np.full(13, c))
        assert updated is belief


def test_update_direct_arithmetic() -> None:
    belief = init_belief(GoalGrid.uniform(0.0, 100.0, 2))
    updated = update_belief(belief, np.array([0.2, 0.1]))
    assert np.allclose(updated.weights, [2.0 / 3.0, 1.0 / 3.0], atol=1e-15)


def test_update_all_zero_likelihood_is_degenerate() -> None:
    belief = init_belief(GoalGrid.uniform(0.0, 100.0, 2))
    with pytest.raises(DegeneratePosteriorError):
        update_belief(belief, np.array([0.0, 0.0]))


def test_update_rejects_bad_likelihoods() -> None:
    belief = init_belief(GoalGrid.uniform(0.0, 100.0, 2))
    with pytest.raises(ValueError):
        update_belief(belief, np.array([1.0, -0.5]))
    with pytest.raises(ValueError):
        update_belief(belief, np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        update_belief(belief, np.array([1.0, 1.0, 1.0]))


def test_update_clamps_zero_at_floor_keeping_point_recoverable() -> None:
    belief = init_belief(GoalGrid.uniform(0.0, 100.0, 2))
    updated = update_belief(belief, np.array([0.0, 1.0]))
    assert updated.weights[0] > 0.0
    assert updated.weights[0] == pytest.approx(1e-12, rel=1e-6)


def test_update_preserves_grid() -> None:
    grid = GoalGrid.uniform(0.0, 100.0, 5)
    updated = update_belief(init_belief(grid), np.linspace(0.1, 0.5, 5))
    assert updated.grid is grid


# --- point estimates and entropy -------------------------------------------

def test_map_unique_argmax() -> None:
    grid = GoalGrid(np.array([50.0, 100.0, 150.0]))
    assert map_estimate(Belief(grid, np.array([0.1, 0.8, 0.1]))) == 100.0


def test_map_tie_breaks_toward_smaller_goal() -> None:
    grid = GoalGrid(np.array([50.0, 100.0]))
    assert map_estimate(Belief(grid, np.array([0.5, 0.5]))) == 50.0


def test_map_singleton() -> None:
    assert map_estimate(init_belief(GoalGrid(np.array([42.0])))) == 42.0


def test_mean_estimate_examples() -> None:
    grid = GoalGrid(np.array([100.0, 200.0]))
    assert mean_estimate(Belief(grid, np.array([0.5, 0.5]))) == 150.0
    assert mean_estimate(init_belief(GoalGrid(np.array([75.0])))) == 75.0
    uniform = init_belief(GoalGrid.uniform(0.0, 500.0, 101))
    assert mean_estimate(uniform) == pytest.approx(250.0, abs=1e-9)


def test_entropy_uniform_and_point_mass() -> None:
    assert entropy(init_belief(GoalGrid.uniform(0.0, 100.0, 4))) == pytest.approx(math.log(4.0), abs=1e-12)
    grid = GoalGrid.uniform(0.0, 100.0, 3)
    assert entropy(Belief(grid, np.array([1.0, 0.0, 0.0]))) == 0.0


def test_entropy_matches_direct_summation_oracle() -> None:
    weights = [0.5, 0.25, 0.25]
    grid = GoalGrid.uniform(0.0, 100.0, 3)
    value = entropy(Belief(grid, np.array(weights)))
    assert value == pytest.approx(direct_entropy(weights), abs=1e-12)
    assert value == pytest.approx(1.0397207708399179, abs=1e-12)


# --- invariants over randomized sweeps --------------------------------------

def test_normalization_holds_over_random_update_chains() -> None:
    rng = np.random.default_rng(1)
    grid = GoalGrid.uniform(0.0, 500.0, 31)
    belief = init_belief(grid)
    for _ in range(200):
        like = rng.uniform(1e-6, 10.0, size=31)
        belief = update_belief(belief, like)
        assert abs(belief.weights.sum() - 1.0) <= 1e-9


def test_scale_invariance_exact_for_power_of_two_factors() -> None:
    rng = np.random.default_rng(2)
    grid = GoalGrid.uniform(0.0, 500.0, 17)
    for _ in range(50):
        belief = update_belief(init_belief(grid), rng.uniform(0.1, 5.0, size=17))
        like = rng.uniform(1e-6, 10.0, size=17)
        c = 2.0 ** rng.integers(-30, 31)
        a = update_belief(belief, like)
        b = update_belief(belief, c * like)
        assert np.array_equal(a.weights, b.weights)


def test_scale_invariance_for_arbitrary_positive_factors() -> None:
    rng = np.random.default_rng(3)
    grid = GoalGrid.uniform(0.0, 500.0, 17)
    for _ in range(50):
        belief = update_belief(init_belief(grid), rng.uniform(0.1, 5.0, size=17))
        like = rng.uniform(1e-6, 10.0, size=17)
        c = rng.uniform(1e-8, 1e8)
        a = update_belief(belief, like)
        b = update_belief(belief, c * like)
        assert np.allclose(a.weights, b.weights, rtol=1e-12, atol=0.0)


def test_iterated_updates_match_single_shot_brute_force() -> None:
    rng = np.random.default_rng(4)
    grid = GoalGrid.uniform(0.0, 500.0, 25)
    for _ in range(20):
        belief = init_belief(grid)
        seq = [rng.uniform(1e-4, 10.0, size=25) for _ in range(30)]
        for like in seq:
            belief = update_belief(belief, like)
        expected = brute_force_posterior(np.full(25, 1.0 / 25.0), seq)
        assert np.max(np.abs(belief.weights - expected)) <= 1e-9


def test_joint_permutation_permutes_posterior_identically() -> None:
    rng = np.random.default_rng(5)
    grid = GoalGrid.uniform(0.0, 500.0, 11)
    for _ in range(20):
        w = rng.uniform(0.1, 1.0, size=11)
        w /= w.sum()
        like = rng.uniform(1e-4, 10.0, size=11)
        perm = rng.permutation(11)
        plain = update_belief(Belief(grid, w), like)
        permuted = update_belief(Belief(grid, w[perm]), like[perm])
        assert np.array_equal(permuted.weights, plain.weights[perm])
