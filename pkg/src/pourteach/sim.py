"""Discrete-time task-space simulation of the pouring robot and container.

The end effector is reduced to two task-space axes (tilt and vertical
height), driven by velocity-resolved control: robot and human velocity
commands add, poses integrate by dt. Outflow is linear in how far the tilt
exceeds a critical angle, plus shake-induced pulses proportional to vertical
speed when the container is tilted near the threshold. Mass is conserved
exactly between source and receiver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HALF_PI = math.pi / 2.0


class SimulationConfigError(ValueError):
    """Simulation parameters out of range."""


@dataclass(frozen=True)
class RobotState:
    """Task-space pose and velocity: tilt (rad, in [0, pi/2]) and vertical
    offset (m)."""

    tilt: float = 0.0
    tilt_rate: float = 0.0
    vert: float = 0.0
    vert_rate: float = 0.0


@dataclass(frozen=True)
class EnvState:
    """Mass in the source container, mass in the receiver, and the
    instantaneous outflow of the last step."""

    source_g: float
    poured_g: float = 0.0
    flow_g_s: float = 0.0


@dataclass(frozen=True)
class EnvParams:
    capacity_g: float = 500.0
    theta_crit: float = 0.4       # tilt where free outflow starts (rad)
    flow_coeff: float = 50.0      # g/s per rad above theta_crit
    shake_gain: float = 5.0       # g per metre of vertical travel
    sensor_sigma: float = 0.5     # scale noise std (g); 0 = perfect sensing
    dt: float = 0.02

    def __post_init__(self) -> None:
        for name in ("capacity_g", "theta_crit", "flow_coeff", "shake_gain", "dt"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0.0:
                raise SimulationConfigError(f"{name} must be finite and positive")
        if not math.isfinite(self.sensor_sigma) or self.sensor_sigma < 0.0:
            raise SimulationConfigError("sensor_sigma must be finite and >= 0")
        if self.theta_crit >= HALF_PI:
            raise SimulationConfigError("theta_crit must be below pi/2")
        if self.dt > 0.1:
            raise SimulationConfigError("dt must be in (0, 0.1]")


def initial_env(params: EnvParams) -> EnvState:
    return EnvState(source_g=params.capacity_g)


def step(robot: RobotState, env: EnvState, u_r: tuple[float, float],
         u_h: tuple[float, float], params: EnvParams) -> tuple[RobotState, EnvState]:
    """Advance one tick with robot command u_r and human correction u_h
    (tilt rad/s, vertical m/s each; they superpose)."""
    tilt_rate = u_r[0] + u_h[0]
    vert_rate = u_r[1] + u_h[1]
    if not (math.isfinite(tilt_rate) and math.isfinite(vert_rate)):
        raise SimulationConfigError("velocity commands must be finite")

    tilt = min(max(robot.tilt + tilt_rate * params.dt, 0.0), HALF_PI)
    vert = robot.vert + vert_rate * params.dt
    new_robot = RobotState(tilt=tilt, tilt_rate=tilt_rate, vert=vert, vert_rate=vert_rate)

    flow = params.flow_coeff * max(0.0, tilt - params.theta_crit)
    if tilt > 0.8 * params.theta_crit:
        flow += params.shake_gain * abs(vert_rate)
    if env.source_g <= 0.0:
        flow = 0.0

    transfer = min(flow * params.dt, env.source_g)
    total = env.source_g + env.poured_g
    source = env.source_g - transfer
    # receiver mass derived from the conserved total so the sum is exact
    new_env = EnvState(source_g=source, poured_g=total - source, flow_g_s=flow)
    return new_robot, new_env


def sense_poured(env: EnvState, sensor_sigma: float, rng: np.random.Generator) -> float:
    """Scale reading of the poured amount: Gaussian noise, clamped at zero.
    sigma 0 returns the exact mass (and consumes no randomness)."""
    if sensor_sigma == 0.0:
        return env.poured_g
    return max(0.0, env.poured_g + sensor_sigma * float(rng.standard_normal()))
