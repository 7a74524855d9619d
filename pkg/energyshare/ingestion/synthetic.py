#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Synthetic wind-like and solar-like generation traces.

Stand-ins for measured data: a bursty wind trace at 5 minutes (an AR(1)
wind speed pushed through a cubic power curve) and an hourly solar trace
(a clear-sky half sine scaled by a random daily cloud factor). Both are
in megawatts and start at midnight.
"""

from typing import Tuple

import numpy as np
import pandas as pd
from scipy.signal import lfilter

from energyshare.ingestion.traces import GenerationTrace

RATED_POWER = 16.0
WIND_PERIOD = 5.0
SOLAR_PERIOD = 60.0

# Wind speed model, normalised to the rated speed.
WIND_PERSISTENCE = 0.995
WIND_VOLATILITY = 0.04
WIND_MEAN_SPEED = 0.55
CUT_IN_SPEED = 0.25

SUNRISE = 6.0
SUNSET = 18.0
MIN_CLOUD_FACTOR = 0.4

START = pd.Timestamp("2000-01-01 00:00")


def synthetic_wind(days: int, seed: int = 0) -> GenerationTrace:
    rng = np.random.default_rng(seed)
    n = int(days * 24 * 60 / WIND_PERIOD)
    noise = WIND_VOLATILITY * rng.standard_normal(n)
    # Stationary AR(1) deviation around the mean speed.
    deviation = lfilter([1.0], [1.0, -WIND_PERSISTENCE], noise)
    speed = np.clip(WIND_MEAN_SPEED + deviation, 0.0, None)
    fraction = np.clip((speed**3 - CUT_IN_SPEED**3) / (1.0 - CUT_IN_SPEED**3), 0.0, 1.0)
    return GenerationTrace(
        sample_period=WIND_PERIOD,
        timestamps=pd.date_range(START, periods=n, freq=pd.Timedelta(minutes=WIND_PERIOD)),
        values=RATED_POWER * fraction,
    )


def synthetic_solar(days: int, seed: int = 0) -> GenerationTrace:
    rng = np.random.default_rng(seed)
    timestamps = pd.date_range(START, periods=days * 24, freq=pd.Timedelta(minutes=SOLAR_PERIOD))
    # Mid-hour sun elevation, held constant over the hour.
    hours = timestamps.hour.to_numpy(dtype=float) + 0.5
    clear_sky = np.clip(np.sin(np.pi * (hours - SUNRISE) / (SUNSET - SUNRISE)), 0.0, None)
    clouds = np.repeat(rng.uniform(MIN_CLOUD_FACTOR, 1.0, size=days), 24)
    return GenerationTrace(
        sample_period=SOLAR_PERIOD,
        timestamps=timestamps,
        values=RATED_POWER * clear_sky * clouds,
    )


def synthetic_wind_solar(days: int, seed: int = 0) -> Tuple[GenerationTrace, GenerationTrace]:
    """Wind trace (5 min) and hourly solar trace covering the same `days`."""
    if days < 1:
        raise ValueError(f"days must be >= 1, got {days}")
    wind_seed, solar_seed = np.random.SeedSequence(seed).spawn(2)
    return (
        synthetic_wind(days, seed=int(wind_seed.generate_state(1)[0])),
        synthetic_solar(days, seed=int(solar_seed.generate_state(1)[0])),
    )
