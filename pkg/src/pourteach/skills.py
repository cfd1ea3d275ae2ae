"""Behavior primitives, reference generation, impedance command, and the
skill selector.

The selector is a threshold table over the gap between the belief's MAP goal
and the current progress: far from the goal the robot pours at the
gap-implied rate, close to it it switches to fine dispensing (vertical shake,
then tilt taps), and at the goal it stops and returns upright. Each primitive
is turned into a task-space reference trajectory that the impedance law
tracks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .belief import Belief, map_estimate
from .observation import ObservationModelParams, desired_rate
from .sim import HALF_PI, RobotState

# Fine-dispensing motion constants.
SHAKE_AMPLITUDE_M = 0.01
SHAKE_FREQUENCY_HZ = 2.0
TAP_IMPULSE_RATE = 0.1
TAP_PERIOD_S = 0.5
TAP_DUTY = 0.1  # fraction of each period the impulse is on


@dataclass(frozen=True)
class Pour:
    tilt_rate: float

    name = "pour"


@dataclass(frozen=True)
class Shake:
    amplitude: float = SHAKE_AMPLITUDE_M
    frequency: float = SHAKE_FREQUENCY_HZ

    name = "shake"

    def __post_init__(self) -> None:
        if self.frequency <= 0.0:
            raise ValueError("shake frequency must be positive")


@dataclass(frozen=True)
class Tap:
    impulse_rate: float = TAP_IMPULSE_RATE
    period: float = TAP_PERIOD_S

    name = "tap"

    def __post_init__(self) -> None:
        if self.period <= 0.0:
            raise ValueError("tap period must be positive")


@dataclass(frozen=True)
class Stop:
    name = "stop"


Primitive = Union[Pour, Shake, Tap, Stop]


@dataclass(frozen=True)
class ImpedanceParams:
    """Per-axis damping and stiffness of the velocity-resolved tracking law."""

    B_r: float = 0.5
    K_r: float = 4.0

    def __post_init__(self) -> None:
        if self.B_r < 0.0 or self.K_r < 0.0:
            raise ValueError("impedance gains must be nonnegative")
        if self.B_r == 0.0 and self.K_r == 0.0:
            raise ValueError("at least one impedance gain must be positive")


@dataclass(frozen=True)
class ReferencePoint:
    """Reference pose and velocity the impedance law tracks."""

    tilt: float = 0.0
    vert: float = 0.0
    tilt_rate: float = 0.0
    vert_rate: float = 0.0


@dataclass(frozen=True)
class SkillThresholds:
    """Gap boundaries of the skill table (grams)."""

    stop_tol: float = 1.0
    shake_gap: float = 4.0
    fine_gap: float = 10.0

    def __post_init__(self) -> None:
        if not 0.0 < self.stop_tol < self.fine_gap:
            raise ValueError("need 0 < stop_tol < fine_gap")
        if not self.stop_tol < self.shake_gap <= self.fine_gap:
            raise ValueError("need stop_tol < shake_gap <= fine_gap")


def select_primitive(belief: Belief, x_e: float, thresholds: SkillThresholds,
                     params: ObservationModelParams) -> Primitive:
    """Pick the next primitive from the MAP gap.

    gap <= stop_tol: Stop; (stop_tol, shake_gap]: Tap; (shake_gap, fine_gap]:
    Shake; above fine_gap: Pour at the gap-implied rate.
    """
    gap = map_estimate(belief) - x_e
    if gap <= thresholds.stop_tol:
        return Stop()
    if gap <= thresholds.shake_gap:
        return Tap()
    if gap <= thresholds.fine_gap:
        return Shake()
    return Pour(tilt_rate=desired_rate(gap, params))


def primitive_reference(prim: Primitive, t: float, anchor: ReferencePoint,
                        r_max: float) -> ReferencePoint:
    """Reference at phase time t since the primitive was activated; `anchor`
    is the reference point at activation.

    Integrating references saturate at the physical tilt range so the
    tracking error cannot wind up beyond what the robot can actually do.
    """
    if isinstance(prim, Pour):
        tilt = anchor.tilt + prim.tilt_rate * t
        capped = tilt >= HALF_PI
        return ReferencePoint(tilt=min(tilt, HALF_PI),
                              vert=anchor.vert,
                              tilt_rate=0.0 if capped else prim.tilt_rate)
    if isinstance(prim, Shake):
        omega = 2.0 * math.pi * prim.frequency
        return ReferencePoint(tilt=anchor.tilt,
                              vert=anchor.vert + prim.amplitude * math.sin(omega * t),
                              vert_rate=prim.amplitude * omega * math.cos(omega * t))
    if isinstance(prim, Tap):
        on_time = TAP_DUTY * prim.period
        cycles = math.floor(t / prim.period)
        phase = t - cycles * prim.period
        advanced = cycles * on_time + min(phase, on_time)
        tilt = anchor.tilt + prim.impulse_rate * advanced
        capped = tilt >= HALF_PI
        rate = prim.impulse_rate if (phase < on_time and not capped) else 0.0
        return ReferencePoint(tilt=min(tilt, HALF_PI),
                              vert=anchor.vert,
                              tilt_rate=rate)
    # Stop: tilt back to upright at r_max, then hold
    decay_time = anchor.tilt / r_max if r_max > 0.0 else 0.0
    if t < decay_time:
        return ReferencePoint(tilt=anchor.tilt - r_max * t,
                              vert=anchor.vert,
                              tilt_rate=-r_max)
    return ReferencePoint(tilt=0.0, vert=anchor.vert)


def impedance_command(robot: RobotState, ref: ReferencePoint,
                      gains: ImpedanceParams, r_max: float) -> tuple[float, float]:
    """Velocity command B_r·(velocity error) + K_r·(position error) per axis,
    with the tilt axis clamped to the actuation limit ±r_max."""
    u_tilt = gains.B_r * (ref.tilt_rate - robot.tilt_rate) + gains.K_r * (ref.tilt - robot.tilt)
    u_vert = gains.B_r * (ref.vert_rate - robot.vert_rate) + gains.K_r * (ref.vert - robot.vert)
    u_tilt = min(max(u_tilt, -r_max), r_max)
    return u_tilt, u_vert
