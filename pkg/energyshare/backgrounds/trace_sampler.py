#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from energyshare.backgrounds.base_sampler import BaseSampler, Slot
from energyshare.models.model import TraceBackground


class TraceSampler(BaseSampler):
    """Replays a piecewise-constant trace, cycling back to its first sample."""

    def __init__(self, background: TraceBackground):
        self._r = background.r_values()
        self._period = background.sample_period
        self._index = 0

    def start(self, seed: int, initial_index: int = 0):
        # Deterministic replay: the seed has no effect.
        self._index = initial_index % len(self._r)

    def next_slot(self) -> Slot:
        index = self._index
        r1, r2 = self._r[index]
        self._index = (index + 1) % len(self._r)
        return Slot(index=index, duration=self._period, r1=float(r1), r2=float(r2))
