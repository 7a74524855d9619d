#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import math
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from energyshare.backgrounds.factory import create_sampler
from energyshare.errors import ModelError
from energyshare.models.model import (
    ModelSpec,
    SharingConfig,
    TraceBackground,
    c_max,
    config_is_valid,
    validate_model,
)
from energyshare.simulator.battery_system import BatterySystem
from energyshare.simulator.state import (
    TRAJECTORY_COLUMNS,
    Accumulators,
    HybridState,
    InitialState,
    SimulationParams,
    SimulationResult,
)

# Violations that make a model impossible to simulate. Missing regeneration
# states or reducibility only void the long-run interpretation.
STRUCTURAL_VIOLATIONS = {
    "rate_matrix shape",
    "rate_matrix negative off-diagonal",
    "rate_matrix row sum",
    "netgen shape",
    "trace empty",
    "sample_period",
}


def check_simulable(model: ModelSpec, config: SharingConfig, params: SimulationParams):
    report = validate_model(model)
    structural = [v for v in report.violations if v.code in STRUCTURAL_VIOLATIONS]
    if structural:
        raise ModelError(f"model cannot be simulated: {', '.join(v.code for v in structural)}")
    if not config_is_valid(model, config):
        raise ModelError(
            f"sharing configuration {config} exceeds (c1max, c2max) = "
            f"({c_max(model, 1):g}, {c_max(model, 2):g})"
        )
    if params.resolved_warmup >= params.horizon:
        raise ModelError(f"horizon {params.horizon:g} must exceed warmup {params.resolved_warmup:g}")


def initial_state(model: ModelSpec, initial: InitialState) -> HybridState:
    b1 = model.B1 / 2 if initial.b1 is None else initial.b1
    b2 = model.B2 / 2 if initial.b2 is None else initial.b2
    if b1 > model.B1 or b2 > model.B2:
        raise ModelError(f"initial levels ({b1:g}, {b2:g}) exceed capacities ({model.B1:g}, {model.B2:g})")
    num_states = len(model.r_values())
    if initial.bg >= num_states:
        raise ModelError(f"initial background state {initial.bg} out of range, the background has {num_states} states")
    return HybridState(t=0.0, bg=initial.bg, b1=b1, b2=b2)


def advance_slot(
    state: HybridState,
    r1: float,
    r2: float,
    dt: float,
    config: SharingConfig,
    model: ModelSpec,
    acc: Accumulators,
    *,
    sharing: bool = True,
) -> Tuple[HybridState, Accumulators]:
    """Advances the hybrid state by one constant-rate slot of length `dt`."""
    if not dt > 0:
        raise ValueError(f"slot length must be > 0, got {dt:g}")
    system = BatterySystem(model, config, state=state, acc=acc, sharing=sharing)
    system.set_background(state.bg, r1, r2)
    system.advance(dt)
    return system.state, system.accumulators


def run(
    model: ModelSpec,
    config: SharingConfig,
    params: SimulationParams,
    *,
    sharing: bool = True,
) -> SimulationResult:
    """Simulates one system over `params.horizon` and estimates both LLRs."""
    check_simulable(model, config, params)

    start = initial_state(model, params.initial)
    sampler = create_sampler(model, params.seed, start.bg)
    system = BatterySystem(
        model,
        config,
        state=start,
        sharing=sharing,
        max_events_per_slot=params.max_events_per_slot,
    )

    trajectory: Optional[List[dict]] = None
    if params.trajectory:
        trajectory = [_trajectory_row(start, system.accumulators)]

        @system.event_handler("on_event")
        def on_event(system, state, acc):
            trajectory.append(_trajectory_row(state, acc))

    if isinstance(model.background, TraceBackground) and params.horizon > model.background.duration:
        logger.debug(f"{system} horizon {params.horizon:g} exceeds the trace, cycling")

    warmup = params.resolved_warmup
    measured = params.measured_time
    batch = measured / params.batches
    checkpoints = [warmup] + [warmup + k * batch for k in range(1, params.batches)] + [params.horizon]

    snapshots: List[Accumulators] = []
    t = 0.0
    slot_left = 0.0
    for checkpoint in checkpoints:
        while t < checkpoint:
            if slot_left <= 0.0:
                slot = sampler.next_slot()
                slot_left = slot.duration
                system.set_background(slot.index, slot.r1, slot.r2)
            if slot_left >= checkpoint - t:
                dt = checkpoint - t
                t = checkpoint
            else:
                dt = slot_left
                t += dt
            system.advance(dt)
            slot_left -= dt
        snapshots.append(system.accumulators.copy())

    total = system.accumulators.minus(snapshots[0])
    batch_llr = np.array(
        [
            [(later.lost(agent) - earlier.lost(agent)) / batch for agent in (1, 2)]
            for earlier, later in zip(snapshots[:-1], snapshots[1:])
        ]
    )
    se = batch_llr.std(axis=0, ddof=1) / math.sqrt(len(batch_llr))

    result = SimulationResult(
        llr1=total.lost(1) / measured,
        llr2=total.lost(2) / measured,
        se1=float(se[0]),
        se2=float(se[1]),
        accumulators=system.accumulators.copy(),
        initial_state=start,
        final_state=system.state,
        params=params,
        trajectory=trajectory,
    )
    logger.debug(
        f"{system} config {config} sharing={sharing} horizon={params.horizon:g} seed={params.seed}: "
        f"llr=({result.llr1:.6g}, {result.llr2:.6g}) se=({result.se1:.2g}, {result.se2:.2g})"
    )
    return result


def _trajectory_row(state: HybridState, acc: Accumulators) -> dict:
    values = (state.t, state.bg, state.b1, state.b2, acc.lost1, acc.lost2, acc.over1, acc.over2)
    return dict(zip(TRAJECTORY_COLUMNS, values))


def simulate(
    model: ModelSpec,
    config: SharingConfig,
    horizon: float,
    warmup: Optional[float] = None,
    seed: int = 0,
    initial: Optional[InitialState] = None,
    **kwargs,
) -> SimulationResult:
    """Simulates the sharing system and returns per-agent LLR estimates.

    The result is fully determined by the arguments. Extra keyword arguments
    are passed to `SimulationParams` (e.g. `batches`, `trajectory`).
    """
    params = SimulationParams(
        horizon=horizon,
        warmup=warmup,
        seed=seed,
        initial=initial or InitialState(),
        **kwargs,
    )
    return run(model, config, params)


def standalone_result(
    model: ModelSpec,
    horizon: float,
    warmup: Optional[float] = None,
    seed: int = 0,
    initial: Optional[InitialState] = None,
    **kwargs,
) -> SimulationResult:
    """Simulates both agents with no transfers of any kind.

    Both agents evolve independently, so one run yields both standalone
    LLRs on the same background path `simulate` would see with this seed.
    """
    params = SimulationParams(
        horizon=horizon,
        warmup=warmup,
        seed=seed,
        initial=initial or InitialState(),
        **kwargs,
    )
    return run(model, SharingConfig(), params, sharing=False)


def simulate_standalone(
    model: ModelSpec,
    agent: int,
    horizon: float,
    warmup: Optional[float] = None,
    seed: int = 0,
    **kwargs,
) -> float:
    """Standalone loss of load rate LLR_i^sa of `agent`."""
    if agent not in (1, 2):
        raise ValueError(f"agent must be 1 or 2, got {agent}")
    return standalone_result(model, horizon, warmup, seed, **kwargs).llr(agent)


def conservation_residual(result: SimulationResult) -> float:
    """Relative residual of the energy balance over the whole run.

    (b1(T) + b2(T)) - (b1(0) + b2(0)) must equal the integral of r1 + r2
    plus the lost load minus the overflow.
    """
    acc = result.accumulators
    start, end = result.initial_state, result.final_state
    stored = (end.b1 + end.b2) - (start.b1 + start.b2)
    balance = acc.supply1 + acc.supply2 + acc.lost1 + acc.lost2 - acc.over1 - acc.over2
    scale = abs(acc.supply1) + abs(acc.supply2) + acc.lost1 + acc.lost2 + acc.over1 + acc.over2
    scale = max(scale, start.b1 + start.b2, 1e-300)
    return abs(stored - balance) / scale
