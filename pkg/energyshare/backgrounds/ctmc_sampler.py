#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import math
from typing import Optional

import numpy as np

from energyshare.backgrounds.base_sampler import BaseSampler, Slot
from energyshare.models.model import CTMCBackground

DRAW_BLOCK_SIZE = 4096


class CTMCSampler(BaseSampler):
    """Samples a continuous-time Markov chain by holding times and jumps.

    Holding times are exponential with the state's exit rate and the next
    state is drawn from the embedded jump chain. Random numbers are drawn
    in blocks from a single `numpy.random.Generator`, so the path depends
    only on the seed.
    """

    def __init__(self, background: CTMCBackground):
        q = background.rates()
        self._r = background.r_values()
        self._exit_rates = -np.diag(q).copy()

        jumps = np.where(np.eye(len(q), dtype=bool), 0.0, q)
        totals = jumps.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            probs = np.where(totals > 0, jumps / totals, 0.0)
        self._cumulative = np.cumsum(probs, axis=1)

        self._rng: Optional[np.random.Generator] = None
        self._state = 0
        self._exponentials = np.empty(0)
        self._uniforms = np.empty(0)
        self._cursor = 0

    @property
    def state(self) -> int:
        return self._state

    def start(self, seed: int, initial_index: int = 0):
        self._rng = np.random.default_rng(seed)
        self._state = initial_index
        self._cursor = DRAW_BLOCK_SIZE

    def _draw(self):
        if self._cursor >= DRAW_BLOCK_SIZE:
            if not self._rng:
                raise Exception(f"{self.__class__.__name__} not started, use start().")
            self._exponentials = self._rng.standard_exponential(DRAW_BLOCK_SIZE)
            self._uniforms = self._rng.random(DRAW_BLOCK_SIZE)
            self._cursor = 0
        e = self._exponentials[self._cursor]
        u = self._uniforms[self._cursor]
        self._cursor += 1
        return e, u

    def next_slot(self) -> Slot:
        state = self._state
        rate = self._exit_rates[state]
        r1, r2 = self._r[state]
        if rate <= 0.0:
            return Slot(index=state, duration=math.inf, r1=float(r1), r2=float(r2))

        e, u = self._draw()
        row = self._cumulative[state]
        target = int(np.searchsorted(row, u * row[-1], side="right"))
        self._state = min(target, len(row) - 1)
        return Slot(index=state, duration=float(e / rate), r1=float(r1), r2=float(r2))
