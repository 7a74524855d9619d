#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from typing import Union

from loguru import logger

from energyshare.errors import TraceError
from energyshare.ingestion.demand import ConstantDemand, WindowedDemand, demand_at
from energyshare.ingestion.traces import GenerationTrace
from energyshare.models.model import ModelSpec, TraceBackground, Units

MINUTES_PER_HOUR = 60.0

TRACE_UNITS = Units(power="MW", energy="MWh", time="h")


def net_generation_model(
    gen1: GenerationTrace,
    demand1: Union[ConstantDemand, WindowedDemand],
    gen2: GenerationTrace,
    demand2: Union[ConstantDemand, WindowedDemand],
    B1: float,
    B2: float,
    c: float,
    units: Units = TRACE_UNITS,
) -> ModelSpec:
    """Trace-driven model with r_i = g_i - d_i sample by sample.

    Model time is in hours: the sample period in minutes is converted, so
    battery capacities are in power x hours.
    """
    if gen1.sample_period != gen2.sample_period:
        raise TraceError(f"sample periods differ: {gen1.sample_period:g} vs {gen2.sample_period:g} min")
    if len(gen1) != len(gen2):
        raise TraceError(f"trace lengths differ: {len(gen1)} vs {len(gen2)} samples")
    if gen1.timestamps[0] != gen2.timestamps[0]:
        raise TraceError(f"traces are not aligned: they start at {gen1.timestamps[0]} and {gen2.timestamps[0]}")

    r1 = gen1.values - demand_at(demand1, gen1.timestamps)
    r2 = gen2.values - demand_at(demand2, gen2.timestamps)
    background = TraceBackground(
        sample_period=gen1.sample_period / MINUTES_PER_HOUR,
        series=tuple(zip(r1.tolist(), r2.tolist())),
    )
    logger.debug(
        f"Net generation model: {len(r1)} samples, mean r=({r1.mean():.4g}, {r2.mean():.4g}) {units.power}"
    )
    return ModelSpec(background=background, B1=B1, B2=B2, c=c, units=units)
