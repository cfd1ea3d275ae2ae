"""Episode engine: the per-tick control/inference loop, traces, metrics,
batch driver, and the single-shot replay oracle.

Each tick runs, in order: impedance command from the active primitive's
reference, the human's correction, the likelihood branch (a correction inside
the deadband is no action and leaves the belief untouched; otherwise the
belief is updated and renormalized), trace recording, one physics step, and
skill selection for the next tick. An episode ends when Stop is selected
with the belief settled (entropy below SETTLED_ENTROPY_NATS) or at max_t.

The same TickLoop drives batch episodes, scripted replays, and the live
teaching service, so their traces are comparable tick for tick.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .belief import (
    LIKELIHOOD_FLOOR,
    Belief,
    GoalGrid,
    entropy,
    init_belief,
    map_estimate,
    mean_estimate,
    update_belief,
)
from .human import HumanPolicyParams, human_act
from .observation import HumanAction, ObservationModelParams, desired_rate, likelihood_vector
from .sim import EnvParams, RobotState, initial_env, sense_poured, step
from .skills import (
    ImpedanceParams,
    Pour,
    Primitive,
    ReferencePoint,
    SkillThresholds,
    Stop,
    impedance_command,
    primitive_reference,
    select_primitive,
)

SETTLED_ENTROPY_NATS = 0.05

TRACE_HEADER = [
    "t", "tilt", "poured_true", "poured_sensed", "u_r_tilt", "u_h_tilt",
    "primitive", "map_g", "mean_g", "entropy",
]


@dataclass(frozen=True)
class GridSpec:
    """Goal-candidate grid bounds and resolution."""

    min_g: float = 0.0
    max_g: float = 500.0
    count: int = 101

    def make(self) -> GoalGrid:
        return GoalGrid.uniform(self.min_g, self.max_g, self.count)


@dataclass(frozen=True)
class EpisodeConfig:
    env: EnvParams = EnvParams()
    obs: ObservationModelParams = ObservationModelParams()
    gains: ImpedanceParams = ImpedanceParams()
    thresholds: SkillThresholds = SkillThresholds()
    grid: GridSpec = GridSpec()
    human: HumanPolicyParams = HumanPolicyParams()
    max_t: float = 60.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.max_t) or self.max_t <= 0.0:
            raise ValueError("max_t must be positive")
        if not 0.0 <= self.grid.min_g <= self.grid.max_g <= self.env.capacity_g:
            raise ValueError("grid bounds must lie within [0, capacity_g]")
        if self.human.true_goal_g > self.env.capacity_g:
            raise ValueError("true_goal_g cannot exceed capacity_g")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    @property
    def max_ticks(self) -> int:
        return int(round(self.max_t / self.env.dt))


@dataclass(frozen=True)
class TickRow:
    t: float
    tilt: float
    poured_true: float
    poured_sensed: float
    u_r_tilt: float
    u_h_tilt: float
    primitive: str
    map_g: float
    mean_g: float
    entropy: float


@dataclass
class EpisodeTrace:
    rows: list[TickRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class Metrics:
    final_error_g: float
    human_effort: float
    interaction_time_s: float
    convergence_tick: int
    terminated: str  # "stopped" | "timeout"

    def to_dict(self) -> dict:
        return {
            "final_error_g": self.final_error_g,
            "human_effort": self.human_effort,
            "interaction_time_s": self.interaction_time_s,
            "convergence_tick": self.convergence_tick,
            "terminated": self.terminated,
        }


ActionSource = Callable[[float, float], HumanAction]


class TickLoop:
    """Single-episode engine; advance() runs exactly one tick.

    Owns the rng stream: the per-tick draw order is sensor noise first, then
    whatever the action source draws. Scripted sources draw nothing, so a
    scripted replay consumes the identical sensor stream as a live session
    with the same seed.
    """

    def __init__(self, cfg: EpisodeConfig,
                 fixed_primitive: Primitive | None = None) -> None:
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.grid = cfg.grid.make()
        self.belief = init_belief(self.grid)
        self.robot = RobotState()
        self.env = initial_env(cfg.env)
        self.tick_index = 0
        self.fixed_primitive = fixed_primitive
        self.primitive: Primitive = (
            fixed_primitive if fixed_primitive is not None
            else select_primitive(self.belief, 0.0, cfg.thresholds, cfg.obs)
        )
        self.anchor = ReferencePoint()
        self.activation_tick = 0
        self.sensed_history: list[float] = []
        self.stopped_settled = False

    def _delayed_sensed(self, delay: int) -> float:
        idx = max(0, len(self.sensed_history) - 1 - delay)
        return self.sensed_history[idx]

    def advance(self, action_source: ActionSource,
                delay_ticks: int = 0) -> TickRow:
        """Run one tick; action_source(x_e_reacted_to, u_r_tilt) supplies the
        human correction."""
        cfg = self.cfg
        t = self.tick_index * cfg.env.dt

        phase = (self.tick_index - self.activation_tick + 1) * cfg.env.dt
        ref = primitive_reference(self.primitive, phase, self.anchor, cfg.obs.r_max)
        u_r = impedance_command(self.robot, ref, cfg.gains, cfg.obs.r_max)

        x_sensed = sense_poured(self.env, cfg.env.sensor_sigma, self.rng)
        self.sensed_history.append(x_sensed)
        u_h = action_source(self._delayed_sensed(delay_ticks), u_r[0])

        # Likelihood branch: no action is no evidence; the belief object is
        # reused so a silent tick is bit-exact.
        if not u_h.is_zero(cfg.obs.deadband):
            like = likelihood_vector(u_h, self.grid, x_sensed, u_r[0], cfg.obs)
            self.belief = update_belief(self.belief, like)

        row = TickRow(
            t=t,
            tilt=self.robot.tilt,
            poured_true=self.env.poured_g,
            poured_sensed=x_sensed,
            u_r_tilt=u_r[0],
            u_h_tilt=u_h.u_h_tilt,
            primitive=self.primitive.name,
            map_g=map_estimate(self.belief),
            mean_g=mean_estimate(self.belief),
            entropy=entropy(self.belief),
        )

        self.robot, self.env = step(self.robot, self.env, u_r,
                                    (u_h.u_h_tilt, u_h.u_h_vert), cfg.env)

        if self.fixed_primitive is None:
            chosen = select_primitive(self.belief, x_sensed, cfg.thresholds, cfg.obs)
            if chosen != self.primitive:
                self.anchor = ref
                self.activation_tick = self.tick_index + 1
                self.primitive = chosen
        self.stopped_settled = (isinstance(self.primitive, Stop)
                                and row.entropy < SETTLED_ENTROPY_NATS)
        self.tick_index += 1
        return row


def _metrics_from(trace: EpisodeTrace, final_poured: float,
                  true_goal: float, dt: float, terminated: str) -> Metrics:
    effort = sum(abs(r.u_h_tilt) for r in trace.rows) * dt
    interaction = sum(1 for r in trace.rows if r.u_h_tilt != 0.0) * dt
    conv = 0
    if trace.rows:
        final_map = trace.rows[-1].map_g
        conv = len(trace.rows) - 1
        while conv > 0 and trace.rows[conv - 1].map_g == final_map:
            conv -= 1
    return Metrics(
        final_error_g=abs(true_goal - final_poured),
        human_effort=effort,
        interaction_time_s=interaction,
        convergence_tick=conv,
        terminated=terminated,
    )


def run_episode(cfg: EpisodeConfig,
                on_tick: Callable[[int, Belief], None] | None = None
                ) -> tuple[EpisodeTrace, Metrics]:
    """Run one full adaptive episode with the simulated human."""
    loop = TickLoop(cfg)
    human = cfg.human

    def source(x_e: float, u_r_tilt: float) -> HumanAction:
        return human_act(human, x_e, u_r_tilt, loop.rng)

    trace = EpisodeTrace()
    terminated = "timeout"
    for tick in range(cfg.max_ticks):
        trace.rows.append(loop.advance(source, human.reaction_delay_ticks))
        if on_tick is not None:
            on_tick(tick, loop.belief)
        if loop.stopped_settled:
            terminated = "stopped"
            break
    metrics = _metrics_from(trace, loop.env.poured_g, human.true_goal_g,
                            cfg.env.dt, terminated)
    return trace, metrics


def run_fixed_rate_episode(cfg: EpisodeConfig,
                           fixed_rate: float | None = None
                           ) -> tuple[EpisodeTrace, Metrics]:
    """Non-adaptive comparison policy: pour at one constant reference rate
    for the whole episode, ignoring the belief. The human model and seed are
    shared with the adaptive run, so the remaining regulation burden falls
    entirely on the human."""
    if fixed_rate is None:
        fixed_rate = desired_rate(cfg.env.capacity_g / 2.0, cfg.obs)
    loop = TickLoop(cfg, fixed_primitive=Pour(tilt_rate=fixed_rate))
    human = cfg.human

    def source(x_e: float, u_r_tilt: float) -> HumanAction:
        return human_act(human, x_e, u_r_tilt, loop.rng)

    trace = EpisodeTrace()
    for _ in range(cfg.max_ticks):
        trace.rows.append(loop.advance(source, human.reaction_delay_ticks))
    metrics = _metrics_from(trace, loop.env.poured_g, human.true_goal_g,
                            cfg.env.dt, "timeout")
    return trace, metrics


def run_scripted_episode(cfg: EpisodeConfig,
                         corrections: Sequence[HumanAction]
                         ) -> tuple[EpisodeTrace, Metrics]:
    """Replay a fixed correction sequence (one action per tick, exactly
    len(corrections) ticks, no early termination). Reference behavior for
    the live teaching service."""
    loop = TickLoop(cfg)
    trace = EpisodeTrace()
    for u_h in corrections:
        trace.rows.append(loop.advance(lambda _x, _u, a=u_h: a))
    terminated = "stopped" if loop.stopped_settled else "timeout"
    metrics = _metrics_from(trace, loop.env.poured_g, cfg.human.true_goal_g,
                            cfg.env.dt, terminated)
    return trace, metrics


def replay_oracle(trace: EpisodeTrace, cfg: EpisodeConfig) -> Belief:
    """Single-shot posterior: uniform prior times the product of every
    recorded tick's likelihood vector, normalized once (in log space for
    range safety; rescaling by a scalar does not change the result)."""
    grid = cfg.grid.make()
    log_post = np.zeros(len(grid))
    for row in trace.rows:
        u_h = HumanAction(u_h_tilt=row.u_h_tilt)
        if u_h.is_zero(cfg.obs.deadband):
            continue
        like = likelihood_vector(u_h, grid, row.poured_sensed, row.u_r_tilt, cfg.obs)
        log_post += np.log(np.maximum(like, LIKELIHOOD_FLOOR))
    log_post -= log_post.max()
    w = np.exp(log_post)
    return Belief(grid, w / w.sum())


def replay_incremental(trace: EpisodeTrace, cfg: EpisodeConfig) -> Belief:
    """Recursive filter replayed over a recorded trace; bit-identical to the
    belief maintained inside the loop that produced it."""
    grid = cfg.grid.make()
    belief = init_belief(grid)
    for row in trace.rows:
        u_h = HumanAction(u_h_tilt=row.u_h_tilt)
        if u_h.is_zero(cfg.obs.deadband):
            continue
        like = likelihood_vector(u_h, grid, row.poured_sensed, row.u_r_tilt, cfg.obs)
        belief = update_belief(belief, like)
    return belief


def run_batch(cfg: EpisodeConfig, episodes: int, seed_base: int
              ) -> tuple[list[Metrics], dict]:
    """Run `episodes` adaptive episodes with seeds seed_base+i and summarize."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    all_metrics = [run_episode(replace(cfg, seed=seed_base + i))[1]
                   for i in range(episodes)]
    return all_metrics, summarize_metrics(all_metrics)


def summarize_metrics(all_metrics: Sequence[Metrics]) -> dict:
    summary: dict = {"episodes": len(all_metrics)}
    for name in ("final_error_g", "human_effort", "interaction_time_s",
                 "convergence_tick"):
        values = np.array([getattr(m, name) for m in all_metrics], dtype=float)
        summary[name] = {
            "median": float(np.median(values)),
            "q25": float(np.percentile(values, 25)),
            "q75": float(np.percentile(values, 75)),
        }
    summary["terminated"] = {
        "stopped": sum(1 for m in all_metrics if m.terminated == "stopped"),
        "timeout": sum(1 for m in all_metrics if m.terminated == "timeout"),
    }
    return summary


def trace_to_csv(trace: EpisodeTrace) -> str:
    """Render a trace with full-precision floats; same trace, same bytes."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for r in trace.rows:
        writer.writerow([
            repr(float(r.t)), repr(float(r.tilt)), repr(float(r.poured_true)),
            repr(float(r.poured_sensed)), repr(float(r.u_r_tilt)),
            repr(float(r.u_h_tilt)), r.primitive, repr(float(r.map_g)),
            repr(float(r.mean_g)), repr(float(r.entropy)),
        ])
    return buf.getvalue()


def write_trace_csv(trace: EpisodeTrace, path: str | Path) -> None:
    Path(path).write_text(trace_to_csv(trace))


def read_trace_csv(path: str | Path) -> EpisodeTrace:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != TRACE_HEADER:
            raise ValueError(f"unexpected trace header: {header}")
        rows = [
            TickRow(
                t=float(r[0]), tilt=float(r[1]), poured_true=float(r[2]),
                poured_sensed=float(r[3]), u_r_tilt=float(r[4]),
                u_h_tilt=float(r[5]), primitive=r[6], map_g=float(r[7]),
                mean_g=float(r[8]), entropy=float(r[9]),
            )
            for r in reader
        ]
    return EpisodeTrace(rows=rows)


def write_metrics_json(metrics: Metrics, path: str | Path) -> None:
    Path(path).write_text(json.dumps(metrics.to_dict(), indent=2) + "\n")
