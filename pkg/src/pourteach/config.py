"""JSON episode configuration.

The document mirrors EpisodeConfig field names exactly; every section and
field is optional and defaults to the library defaults. Unknown keys are
rejected so typos fail loudly. The human's observation-model section
defaults to the filter's, keeping the simulated teacher model-matched unless
explicitly overridden.
"""

from __future__ import annotations

import json
from dataclasses import fields
from pathlib import Path

from .episode import EpisodeConfig, GridSpec
from .human import HumanPolicyParams
from .observation import ObservationModelParams
from .sim import EnvParams
from .skills import ImpedanceParams, SkillThresholds


class ConfigError(ValueError):
    """Malformed or out-of-range configuration."""


def _build(cls, data: dict, context: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{context} must be an object")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown {context} keys: {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {context}: {exc}") from exc


def episode_config_from_dict(data: dict) -> EpisodeConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(EpisodeConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    obs = _build(ObservationModelParams, data.get("obs", {}), "obs")
    human_data = dict(data.get("human", {}))
    if isinstance(human_data, dict) and "obs" in human_data:
        human_data["obs"] = _build(ObservationModelParams, human_data["obs"], "human.obs")
    else:
        human_data["obs"] = obs

    kwargs = {
        "env": _build(EnvParams, data.get("env", {}), "env"),
        "obs": obs,
        "gains": _build(ImpedanceParams, data.get("gains", {}), "gains"),
        "thresholds": _build(SkillThresholds, data.get("thresholds", {}), "thresholds"),
        "grid": _build(GridSpec, data.get("grid", {}), "grid"),
        "human": _build(HumanPolicyParams, human_data, "human"),
    }
    for name in ("max_t", "seed"):
        if name in data:
            kwargs[name] = data[name]
    try:
        return EpisodeConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_config(path: str | Path) -> EpisodeConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return episode_config_from_dict(data)
