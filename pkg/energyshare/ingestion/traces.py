#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Generation traces read from `timestamp,power` CSV files."""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from loguru import logger

from energyshare.errors import TraceError

TRACE_COLUMNS = ["timestamp", "power"]

# Header line plus 1-based numbering.
_FIRST_DATA_LINE = 2


@dataclass(frozen=True)
class GenerationTrace:
    """Uniformly spaced generation samples.

    Attributes:
        sample_period: Spacing of the samples, in minutes.
        timestamps: Sample start times (local civil time).
        values: Generated power per sample (>= 0).
    """

    sample_period: float
    timestamps: pd.DatetimeIndex
    values: np.ndarray

    def __len__(self):
        return len(self.values)

    @property
    def energy(self) -> float:
        """Generated energy, in power units x hours."""
        return float(self.values.sum() * self.sample_period / 60.0)


def load_trace_csv(path: Union[str, Path], sample_period: float) -> GenerationTrace:
    """Loads a generation trace and checks its spacing.

    Raises:
        TraceError: If the file is empty or malformed (with the 1-based line
            number of the first bad row), or if two consecutive timestamps
            are not exactly `sample_period` minutes apart.
    """
    if not sample_period > 0:
        raise TraceError(f"sample period must be > 0 minutes, got {sample_period:g}")

    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise TraceError(f"{path}: empty file, expected a '{','.join(TRACE_COLUMNS)}' header")
    except pd.errors.ParserError as e:
        raise TraceError(f"{path}: {e}")

    if list(frame.columns) != TRACE_COLUMNS:
        raise TraceError(f"{path}: line 1: expected header '{','.join(TRACE_COLUMNS)}', got '{','.join(frame.columns)}'")
    if frame.empty:
        raise TraceError(f"{path}: no samples after the header")

    timestamps = pd.to_datetime(frame["timestamp"], errors="coerce")
    values = pd.to_numeric(frame["power"], errors="coerce")
    bad = timestamps.isna() | values.isna() | ~np.isfinite(values) | (values < 0)
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise TraceError(
            f"{path}: line {row + _FIRST_DATA_LINE}: cannot parse '{frame['timestamp'].iloc[row]},{frame['power'].iloc[row]}' "
            "(expected a timestamp and a finite power >= 0)"
        )

    index = pd.DatetimeIndex(timestamps)
    expected = pd.Timedelta(minutes=sample_period)
    spacing = index[1:] - index[:-1]
    wrong = np.flatnonzero(spacing != expected)
    if len(wrong):
        k = int(wrong[0])
        raise TraceError(
            f"{path}: gap between {index[k]} (line {k + _FIRST_DATA_LINE}) and {index[k + 1]} "
            f"(line {k + 1 + _FIRST_DATA_LINE}): {spacing[k]} instead of {expected}"
        )

    trace = GenerationTrace(sample_period=sample_period, timestamps=index, values=values.to_numpy(dtype=float))
    logger.debug(f"Loaded {len(trace)} samples every {sample_period:g} min from {path}")
    return trace


def expand_hourly(trace: GenerationTrace, target_period: float = 5.0) -> GenerationTrace:
    """Holds every sample constant over its period at a finer spacing.

    The source period must be an integer multiple of `target_period`; each
    value is repeated that many times, which preserves the total energy.
    """
    if not target_period > 0:
        raise TraceError(f"target period must be > 0 minutes, got {target_period:g}")
    ratio = trace.sample_period / target_period
    factor = int(round(ratio))
    if factor < 1 or abs(ratio - factor) > 1e-9:
        raise TraceError(
            f"sample period {trace.sample_period:g} min is not a multiple of the target period {target_period:g} min"
        )
    if factor == 1:
        return trace

    timestamps = pd.date_range(
        start=trace.timestamps[0],
        periods=len(trace) * factor,
        freq=pd.Timedelta(minutes=target_period),
    )
    return GenerationTrace(
        sample_period=target_period,
        timestamps=timestamps,
        values=np.repeat(trace.values, factor),
    )
