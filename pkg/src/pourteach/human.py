"""Scripted human standing in for the person physically correcting the robot.

The human knows the true target amount, watches the same scale reading the
robot does (optionally with a reaction delay), and with some probability per
tick applies the corrective action drawn from the observation model. A human
whose expectations are met stays silent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .observation import (
    ZERO_ACTION,
    HumanAction,
    ObservationModelParams,
    sample_human_action,
)


@dataclass(frozen=True)
class HumanPolicyParams:
    true_goal_g: float = 150.0
    p_intervene: float = 1.0
    obs: ObservationModelParams = ObservationModelParams()
    reaction_delay_ticks: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.true_goal_g) or self.true_goal_g < 0.0:
            raise ValueError("true_goal_g must be finite and nonnegative")
        if not 0.0 <= self.p_intervene <= 1.0:
            raise ValueError("p_intervene must be in [0, 1]")
        if self.reaction_delay_ticks < 0:
            raise ValueError("reaction_delay_ticks must be >= 0")


def human_act(params: HumanPolicyParams, x_e: float, u_r_tilt: float,
              rng: np.random.Generator) -> HumanAction:
    """Correction for this tick given the (possibly delayed) scale reading
    x_e the human is reacting to.

    With probability p_intervene the human applies a sampled correction
    toward the true goal; otherwise (and at p_intervene 0, without consuming
    randomness) no action.
    """
    if params.p_intervene <= 0.0:
        return ZERO_ACTION
    if params.p_intervene < 1.0 and float(rng.random()) >= params.p_intervene:
        return ZERO_ACTION
    return sample_human_action(params.true_goal_g, x_e, u_r_tilt, params.obs, rng)
