#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Demand curves derived from a generation trace.

Windows are hours of the day in the trace's local civil time. Daylight
saving transitions are not adjusted for.
"""

from typing import Annotated, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from energyshare.ingestion.traces import GenerationTrace

DEFAULT_DEMAND_FRACTION = 0.9
DEFAULT_DEMAND_WINDOW = (7.0, 17.0)


class ConstantDemand(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["constant"] = "constant"
    level: float = Field(ge=0)


class WindowedDemand(BaseModel):
    """Demand of `level` between `window_start` and `window_end` o'clock, zero outside."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["windowed"] = "windowed"
    window_start: float = Field(ge=0, le=24)
    window_end: float = Field(ge=0, le=24)
    level: float = Field(ge=0)

    @model_validator(mode="after")
    def _check_window(self):
        if not self.window_start < self.window_end:
            raise ValueError(f"window start {self.window_start:g} must precede window end {self.window_end:g}")
        return self


DemandCurve = Annotated[Union[ConstantDemand, WindowedDemand], Field(discriminator="kind")]


def _hour_of_day(timestamps: pd.DatetimeIndex) -> np.ndarray:
    return (timestamps.hour + timestamps.minute / 60.0 + timestamps.second / 3600.0).to_numpy(dtype=float)


def _in_window(timestamps: pd.DatetimeIndex, window: Tuple[float, float]) -> np.ndarray:
    hours = _hour_of_day(timestamps)
    return (hours >= window[0]) & (hours < window[1])


def build_demand(
    trace: GenerationTrace,
    mode: str = "constant",
    fraction: float = DEFAULT_DEMAND_FRACTION,
    window: Optional[Tuple[float, float]] = None,
) -> Union[ConstantDemand, WindowedDemand]:
    """Demand set to `fraction` of the trace's mean generation.

    In "windowed" mode the mean is taken over samples inside the daily
    `window` only, and demand is zero outside it.
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"demand fraction must be in (0, 1], got {fraction:g}")

    match mode:
        case "constant":
            return ConstantDemand(level=fraction * float(trace.values.mean()))
        case "windowed":
            if window is None:
                raise ValueError("windowed demand requires a (start, end) window")
            inside = _in_window(trace.timestamps, window)
            if not inside.any():
                raise ValueError(f"no trace samples fall inside the window {window}")
            return WindowedDemand(
                window_start=window[0],
                window_end=window[1],
                level=fraction * float(trace.values[inside].mean()),
            )
        case _:
            raise ValueError(f"unknown demand mode '{mode}', expected 'constant' or 'windowed'")


def demand_at(curve: Union[ConstantDemand, WindowedDemand], timestamps: pd.DatetimeIndex) -> np.ndarray:
    match curve:
        case ConstantDemand():
            return np.full(len(timestamps), curve.level)
        case WindowedDemand():
            inside = _in_window(timestamps, (curve.window_start, curve.window_end))
            return np.where(inside, curve.level, 0.0)
