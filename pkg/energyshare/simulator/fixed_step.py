#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from typing import Optional

from energyshare.backgrounds.factory import create_sampler
from energyshare.dynamics.rates import resolve_regions
from energyshare.models.model import ModelSpec, SharingConfig
from energyshare.simulator.simulator import check_simulable, initial_state
from energyshare.simulator.state import Accumulators, InitialState, SimulationParams

DEFAULT_FIXED_STEP = 1e-3


def fixed_step_simulate(
    model: ModelSpec,
    config: SharingConfig,
    horizon: float,
    seed: int = 0,
    dt: float = DEFAULT_FIXED_STEP,
    initial: Optional[InitialState] = None,
    *,
    sharing: bool = True,
) -> Accumulators:
    """Explicit fixed-step integration on the same background path as `simulate`.

    Rates are re-evaluated at the start of every step and levels are clipped
    to [0, B_i], so boundary hits are resolved only to within `dt`. Used as
    an independent reference for the event-driven simulator.
    """
    params = SimulationParams(horizon=horizon, warmup=0.0, seed=seed, initial=initial or InitialState())
    check_simulable(model, config, params)

    state = initial_state(model, params.initial)
    sampler = create_sampler(model, seed, state.bg)
    b1, b2 = state.b1, state.b2
    acc = Accumulators()

    t = 0.0
    slot_end = 0.0
    r1 = r2 = 0.0
    while t < horizon:
        while slot_end <= t:
            slot = sampler.next_slot()
            slot_end += slot.duration
            r1, r2 = slot.r1, slot.r2
        h = min(dt, slot_end - t, horizon - t)
        _, _, rates = resolve_regions(b1, b2, model.B1, model.B2, r1, r2, config, model.c, sharing=sharing)
        acc.accumulate(rates, r1, r2, h)
        b1 = min(max(b1 + rates.db1 * h, 0.0), model.B1)
        b2 = min(max(b2 + rates.db2 * h, 0.0), model.B2)
        t += h
    return acc
