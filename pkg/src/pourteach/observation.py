"""Model of human corrective actions given a candidate goal and progress.

The gap between a candidate goal and the measured poured amount maps through
a saturating sigmoid to the pouring rate a human would want right now. The
human's tilt-rate correction is modeled as Gaussian around (wanted rate −
robot's commanded rate): if the robot already pours at the wanted rate the
expected correction is zero and the human stays silent. Corrections whose
magnitude falls below the deadband are treated as no action at all and carry
no evidence (likelihood 1 for every goal). The same density is used both to
evaluate likelihoods and to generate simulated human actions, so evaluation
and generation are symmetric by construction.

The vertical correction component carries no goal information here; it only
drives shake compliance in the simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .belief import GoalGrid


class InvalidObservationError(ValueError):
    """Non-finite action or state fed to the likelihood."""


@dataclass(frozen=True)
class ObservationModelParams:
    """Sigmoid gain k (1/g), rate ceiling r_max (rad/s), action noise
    sigma_h (rad/s), and the no-action deadband (rad/s)."""

    k: float = 0.05
    r_max: float = 0.6
    sigma_h: float = 0.05
    deadband: float = 0.02

    def __post_init__(self) -> None:
        for name in ("k", "r_max", "sigma_h", "deadband"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name} must be finite and positive")
        if self.deadband >= self.r_max:
            raise ValueError("deadband must be smaller than r_max")


@dataclass(frozen=True)
class HumanAction:
    """End-effector velocity correction applied by the human."""

    u_h_tilt: float = 0.0
    u_h_vert: float = 0.0

    def is_zero(self, deadband: float) -> bool:
        return abs(self.u_h_tilt) <= deadband


ZERO_ACTION = HumanAction(0.0, 0.0)


def distance(x_e: float, beta: float) -> float:
    """Signed gap to the goal in grams; positive means under-poured."""
    return beta - x_e


def desired_rate(delta: float, params: ObservationModelParams) -> float:
    """Pouring rate a human wants for a remaining gap of `delta` grams.

    r*(Δ) = r_max·(2σ(k·Δ) − 1) for Δ > 0, else 0; monotone in Δ and
    saturating at r_max for large gaps.
    """
    if delta <= 0.0:
        return 0.0
    return params.r_max * (2.0 / (1.0 + math.exp(-params.k * delta)) - 1.0)


def _desired_rates(deltas: np.ndarray, params: ObservationModelParams) -> np.ndarray:
    pos = np.maximum(deltas, 0.0)
    return params.r_max * (2.0 / (1.0 + np.exp(-params.k * pos)) - 1.0)


def correction_mean(beta: float, x_e: float, u_r_tilt: float,
                    params: ObservationModelParams) -> float:
    """Expected tilt-rate correction: wanted rate minus the robot's command."""
    return desired_rate(distance(x_e, beta), params) - u_r_tilt


def likelihood_vector(u_h: HumanAction, grid: GoalGrid, x_e: float,
                      u_r_tilt: float, params: ObservationModelParams) -> np.ndarray:
    """Likelihood of the observed correction under every goal candidate.

    A correction inside the deadband counts as no action and returns all
    ones. Otherwise each candidate gets the Gaussian density of the observed
    tilt correction around that candidate's expected correction.
    """
    for v in (u_h.u_h_tilt, u_h.u_h_vert, x_e, u_r_tilt):
        if not math.isfinite(v):
            raise InvalidObservationError("observation inputs must be finite")
    n = len(grid)
    if u_h.is_zero(params.deadband):
        return np.ones(n)
    mu = _desired_rates(grid.values - x_e, params) - u_r_tilt
    z = (u_h.u_h_tilt - mu) / params.sigma_h
    return np.exp(-0.5 * z * z) / (params.sigma_h * math.sqrt(2.0 * math.pi))


def likelihood(u_h: HumanAction, beta: float, x_e: float, u_r_tilt: float,
               params: ObservationModelParams) -> float:
    """Single-candidate version of likelihood_vector."""
    if not math.isfinite(beta):
        raise InvalidObservationError("beta must be finite")
    grid = GoalGrid(np.array([beta]))
    return float(likelihood_vector(u_h, grid, x_e, u_r_tilt, params)[0])


def sample_human_action(beta_true: float, x_e: float, u_r_tilt: float,
                        params: ObservationModelParams,
                        rng: np.random.Generator) -> HumanAction:
    """Draw the corrective action of a human whose hidden goal is beta_true.

    Draws around the expected correction with std sigma_h; draws inside the
    deadband are emitted as exact zero.
    """
    mu = correction_mean(beta_true, x_e, u_r_tilt, params)
    u_tilt = mu + params.sigma_h * float(rng.standard_normal())
    if abs(u_tilt) <= params.deadband:
        return ZERO_ACTION
    return HumanAction(u_h_tilt=u_tilt)
