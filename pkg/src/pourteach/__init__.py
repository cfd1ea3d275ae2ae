"""Online inference of a human's pour target from physical corrections,
with behavior-primitive control, a deterministic simulator, a batch
experiment harness, and a live teaching service."""

from .belief import (
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
from .episode import (
    EpisodeConfig,
    EpisodeTrace,
    GridSpec,
    Metrics,
    TickLoop,
    replay_incremental,
    replay_oracle,
    run_batch,
    run_episode,
    run_fixed_rate_episode,
    run_scripted_episode,
)
from .human import HumanPolicyParams, human_act
from .observation import (
    HumanAction,
    InvalidObservationError,
    ObservationModelParams,
    desired_rate,
    distance,
    likelihood,
    likelihood_vector,
    sample_human_action,
)
from .sim import EnvParams, EnvState, RobotState, SimulationConfigError, sense_poured, step
from .skills import (
    ImpedanceParams,
    Pour,
    Primitive,
    ReferencePoint,
    Shake,
    SkillThresholds,
    Stop,
    Tap,
    impedance_command,
    primitive_reference,
    select_primitive,
)

__version__ = "0.1.0"
