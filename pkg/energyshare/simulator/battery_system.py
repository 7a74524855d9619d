#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import math
from typing import Optional, Tuple

from energyshare.dynamics.rates import RateBundle, RegionLabel, resolve_regions
from energyshare.errors import EventLoopError
from energyshare.models.model import ModelSpec, SharingConfig
from energyshare.simulator.state import DEFAULT_MAX_EVENTS_PER_SLOT, Accumulators, HybridState
from energyshare.utils.base_object import BaseObject

# Relative distance to a boundary below which a battery is snapped onto it.
SNAP_TOLERANCE = 1e-12


class BatterySystem(BaseObject):
    """Hybrid state of both batteries driven by a piecewise-constant (r1, r2).

    Between events the rates are constant, so battery levels are linear in
    time and the next boundary hit is found in closed form. Batteries that
    reach a boundary in the same step are snapped and re-labelled together
    before the rates are evaluated again.

    It emits `on_event` after every step, i.e. at every boundary hit and at
    the end of every slot:

       @system.event_handler("on_event")
       def on_event(system, state, acc):
           ...

    """

    def __init__(
        self,
        model: ModelSpec,
        config: SharingConfig,
        *,
        state: HybridState,
        acc: Optional[Accumulators] = None,
        sharing: bool = True,
        max_events_per_slot: int = DEFAULT_MAX_EVENTS_PER_SLOT,
        name: Optional[str] = None,
    ):
        super().__init__(name=name)
        self._model = model
        self._config = config
        self._sharing = sharing
        self._max_events = max_events_per_slot

        self._t = state.t
        self._bg = state.bg
        self._b = [min(max(state.b1, 0.0), model.B1), min(max(state.b2, 0.0), model.B2)]
        self._capacity = (model.B1, model.B2)
        self._acc = acc.copy() if acc else Accumulators()

        self._r1 = 0.0
        self._r2 = 0.0
        self._regions: Tuple[RegionLabel, RegionLabel] = (RegionLabel.INTERIOR, RegionLabel.INTERIOR)
        self._rates = RateBundle()

        self._register_event_handler("on_event")

    @property
    def state(self) -> HybridState:
        return HybridState(t=self._t, bg=self._bg, b1=self._b[0], b2=self._b[1])

    @property
    def accumulators(self) -> Accumulators:
        return self._acc

    @property
    def rates(self) -> RateBundle:
        return self._rates

    @property
    def config(self) -> SharingConfig:
        return self._config

    def set_background(self, bg: int, r1: float, r2: float):
        self._bg = bg
        self._r1 = r1
        self._r2 = r2
        self._resolve()

    def _resolve(self):
        region1, region2, self._rates = resolve_regions(
            self._b[0],
            self._b[1],
            self._model.B1,
            self._model.B2,
            self._r1,
            self._r2,
            self._config,
            self._model.c,
            sharing=self._sharing,
        )
        self._regions = (region1, region2)

    def _hit_time(self, index: int) -> float:
        if self._regions[index] != RegionLabel.INTERIOR:
            return math.inf
        db = self._rates.db1 if index == 0 else self._rates.db2
        if db < 0.0:
            return self._b[index] / -db
        if db > 0.0:
            return (self._capacity[index] - self._b[index]) / db
        return math.inf

    def next_event_in(self) -> float:
        """Time until the earliest boundary hit under the current rates."""
        return min(self._hit_time(0), self._hit_time(1))

    def step(self, tau: float):
        """Integrates the current rates over `tau`, which must not pass an event."""
        hits = (self._hit_time(0), self._hit_time(1))
        self._acc.accumulate(self._rates, self._r1, self._r2, tau)
        self._t += tau

        for index, db in enumerate((self._rates.db1, self._rates.db2)):
            capacity = self._capacity[index]
            if hits[index] <= tau:
                self._b[index] = 0.0 if db < 0.0 else capacity
                continue
            b = min(max(self._b[index] + db * tau, 0.0), capacity)
            if b <= SNAP_TOLERANCE * capacity:
                b = 0.0
            elif b >= capacity * (1.0 - SNAP_TOLERANCE):
                b = capacity
            self._b[index] = b

        self._resolve()
        if self.has_event_handlers("on_event"):
            self._call_event_handler("on_event", self.state, self._acc)

    def advance(self, dt: float):
        """Advances by `dt` with constant net generation, event by event."""
        remaining = dt
        events = 0
        while remaining > 0.0:
            events += 1
            if events > self._max_events:
                raise EventLoopError(
                    f"{self} exceeded {self._max_events} events in one slot at t={self._t:g} "
                    f"(b={self._b}, r=({self._r1:g}, {self._r2:g}), regions={self._regions})"
                )
            tau = min(self.next_event_in(), remaining)
            self.step(tau)
            remaining -= tau
