#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""JSON experiment files.

An experiment names exactly one model source: an inline model, a model
JSON file, a bundled preset, or a pair of generation traces with demand
settings. Relative file paths are resolved against the experiment file.
"""

from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from energyshare.errors import ConfigError, TraceError
from energyshare.ingestion.demand import DEFAULT_DEMAND_FRACTION, DEFAULT_DEMAND_WINDOW, build_demand
from energyshare.ingestion.netgen import net_generation_model
from energyshare.ingestion.traces import expand_hourly, load_trace_csv
from energyshare.models.model import ModelSpec, SharingConfig, Units
from energyshare.presets import PRESETS, get_preset

DEFAULT_HORIZON = 1e5
DEFAULT_GRID_STEP = 0.25
DEFAULT_EPSILON = 0.25


class TraceSource(BaseModel):
    """Generation CSV of one agent and how its demand is built."""

    model_config = ConfigDict(frozen=True)

    path: str
    sample_period: float = Field(gt=0, description="Minutes between samples")
    demand: Literal["constant", "windowed"] = "constant"
    fraction: float = Field(default=DEFAULT_DEMAND_FRACTION, gt=0, le=1)
    window: Tuple[float, float] = DEFAULT_DEMAND_WINDOW


class TraceModelSource(BaseModel):
    model_config = ConfigDict(frozen=True)

    agent1: TraceSource
    agent2: TraceSource
    B1: float = Field(gt=0)
    B2: float = Field(gt=0)
    c: float = Field(ge=0)
    units: Units


class OutputPaths(BaseModel):
    model_config = ConfigDict(frozen=True)

    result: Optional[str] = None
    trajectory: Optional[str] = None
    frontier: Optional[str] = None


class ExperimentConfig(BaseModel):
    """Model reference and run settings of a reproducible experiment."""

    model_config = ConfigDict(frozen=True, protected_namespaces=())

    model: Optional[ModelSpec] = None
    model_file: Optional[str] = None
    preset: Optional[str] = None
    traces: Optional[TraceModelSource] = None

    configs: List[SharingConfig] = [SharingConfig()]
    horizon: Optional[float] = Field(default=None, gt=0)
    warmup: Optional[float] = Field(default=None, ge=0)
    seed: int = 0
    grid_step: float = Field(default=DEFAULT_GRID_STEP, gt=0)
    epsilon: float = Field(default=DEFAULT_EPSILON, ge=0)
    outputs: OutputPaths = OutputPaths()

    @model_validator(mode="after")
    def _one_model_source(self):
        sources = [name for name in ("model", "model_file", "preset", "traces") if getattr(self, name) is not None]
        if len(sources) != 1:
            raise ValueError(f"exactly one of model, model_file, preset, traces is required, got {sources or 'none'}")
        if self.preset is not None and self.preset not in PRESETS:
            raise ValueError(f"unknown preset '{self.preset}', expected one of: {', '.join(PRESETS)}")
        if self.model is not None:
            _require_units(self.model, "model")
        return self


def _require_units(model: ModelSpec, source: str):
    if "units" not in model.model_fields_set:
        raise ValueError(f"{source} does not declare its units (power, energy, time)")


def _resolve(path: str, base_dir: Path) -> Path:
    candidate = Path(path)
    return candidate if candidate.is_absolute() else base_dir / candidate


def _trace_model(source: TraceModelSource, base_dir: Path) -> ModelSpec:
    traces = []
    for agent in (source.agent1, source.agent2):
        trace = load_trace_csv(_resolve(agent.path, base_dir), agent.sample_period)
        traces.append(trace)
    period = min(t.sample_period for t in traces)
    traces = [expand_hourly(t, period) for t in traces]
    demands = [
        build_demand(trace, agent.demand, agent.fraction, agent.window if agent.demand == "windowed" else None)
        for trace, agent in zip(traces, (source.agent1, source.agent2))
    ]
    return net_generation_model(
        traces[0], demands[0], traces[1], demands[1], B1=source.B1, B2=source.B2, c=source.c, units=source.units
    )


def resolve_model(experiment: ExperimentConfig, base_dir: Union[str, Path] = ".") -> ModelSpec:
    """Builds the model an experiment refers to.

    Raises:
        ConfigError: If a referenced file cannot be read or parsed.
    """
    base_dir = Path(base_dir)
    try:
        if experiment.model is not None:
            return experiment.model
        if experiment.preset is not None:
            return get_preset(experiment.preset).build()
        if experiment.model_file is not None:
            model = ModelSpec.model_validate_json(_resolve(experiment.model_file, base_dir).read_text())
            _require_units(model, f"model file '{experiment.model_file}'")
            return model
        return _trace_model(experiment.traces, base_dir)
    except (OSError, ValueError, TraceError) as e:
        raise ConfigError(f"cannot build the model: {e}") from e


def default_horizon(experiment: ExperimentConfig, model: ModelSpec) -> float:
    """Configured horizon, else the preset's, else one pass over a trace."""
    if experiment.horizon is not None:
        return experiment.horizon
    if experiment.preset is not None:
        return get_preset(experiment.preset).horizon(model)
    if model.background.kind == "trace":
        return model.background.duration
    return DEFAULT_HORIZON


def load_experiment(reference: str) -> Tuple[ExperimentConfig, ModelSpec]:
    """Loads an experiment from a JSON file path or a preset name."""
    if reference in PRESETS:
        experiment = ExperimentConfig(preset=reference)
        base_dir = Path(".")
    else:
        path = Path(reference)
        try:
            experiment = ExperimentConfig.model_validate_json(path.read_text())
        except OSError as e:
            raise ConfigError(f"cannot read experiment '{reference}': {e}") from e
        except ValidationError as e:
            raise ConfigError(f"invalid experiment '{reference}': {e}") from e
        base_dir = path.parent

    model = resolve_model(experiment, base_dir)
    logger.debug(f"Loaded experiment '{reference}' ({model.background.kind} background)")
    return experiment, model


def save_experiment(experiment: ExperimentConfig, path: Union[str, Path]):
    Path(path).write_text(experiment.model_dump_json(indent=2, exclude_none=True))
