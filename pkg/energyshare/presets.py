#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Bundled models.

The toy presets drive each agent with its own on/off chain switching at
unit rate; the joint background is the 4-state product chain. Both
batteries hold 10 units and the transfer capacity is 1.5. Agent 1 has
r in {2, -1.5}; agent 2 has the same deficit and a surplus of 2, 2.15 or
2.5, so it is increasingly better off than agent 1.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List

from energyshare.ingestion.demand import DEFAULT_DEMAND_WINDOW, build_demand
from energyshare.ingestion.netgen import net_generation_model
from energyshare.ingestion.synthetic import synthetic_wind_solar
from energyshare.ingestion.traces import expand_hourly
from energyshare.models.model import ModelSpec, Units, product_chain, two_state_chain

TOY_CAPACITY = 10.0
TOY_TRANSFER_CAPACITY = 1.5
TOY_SWITCHING_RATE = 1.0
TOY_SURPLUS = 2.0
TOY_DEFICIT = -1.5
TOY_HORIZON = 1e5

SYNTHETIC_DAYS = 365
SYNTHETIC_CAPACITY = 0.5
SYNTHETIC_TRANSFER_CAPACITY = 16.0


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    build: Callable[[], ModelSpec]
    horizon: Callable[[ModelSpec], float]


def toy_model(surplus2: float) -> ModelSpec:
    agent1 = two_state_chain(TOY_SWITCHING_RATE, TOY_SWITCHING_RATE, TOY_SURPLUS, TOY_DEFICIT, labels=("+", "-"))
    agent2 = two_state_chain(TOY_SWITCHING_RATE, TOY_SWITCHING_RATE, surplus2, TOY_DEFICIT, labels=("+", "-"))
    return ModelSpec(
        background=product_chain(agent1, agent2),
        B1=TOY_CAPACITY,
        B2=TOY_CAPACITY,
        c=TOY_TRANSFER_CAPACITY,
        units=Units(power="units", energy="units x time", time="time"),
    )


def wind_solar_synthetic_model(days: int = SYNTHETIC_DAYS, seed: int = 0) -> ModelSpec:
    """Wind agent 1 with constant demand, solar agent 2 with daytime demand."""
    wind, solar = synthetic_wind_solar(days, seed)
    solar = expand_hourly(solar, wind.sample_period)
    return net_generation_model(
        wind,
        build_demand(wind, "constant"),
        solar,
        build_demand(solar, "windowed", window=DEFAULT_DEMAND_WINDOW),
        B1=SYNTHETIC_CAPACITY,
        B2=SYNTHETIC_CAPACITY,
        c=SYNTHETIC_TRANSFER_CAPACITY,
    )


def _toy_horizon(model: ModelSpec) -> float:
    return TOY_HORIZON


def _trace_horizon(model: ModelSpec) -> float:
    return model.background.duration


PRESETS: Dict[str, Preset] = {
    preset.name: preset
    for preset in [
        Preset("toy-symmetric", "toy model, both agents r in {2, -1.5}", lambda: toy_model(2.0), _toy_horizon),
        Preset("toy-asym1", "toy model, agent 2 surplus 2.15", lambda: toy_model(2.15), _toy_horizon),
        Preset("toy-asym2", "toy model, agent 2 surplus 2.5", lambda: toy_model(2.5), _toy_horizon),
        Preset(
            "wind-solar-synthetic",
            "synthetic wind (agent 1) and solar (agent 2) traces, one year at 5 min",
            wind_solar_synthetic_model,
            _trace_horizon,
        ),
    ]
}


def preset_names() -> List[str]:
    return list(PRESETS)


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset '{name}', expected one of: {', '.join(PRESETS)}") from None
