#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import math

import numpy as np
import pytest

from energyshare.backgrounds.ctmc_sampler import CTMCSampler
from energyshare.backgrounds.factory import create_sampler
from energyshare.backgrounds.trace_sampler import TraceSampler
from energyshare.errors import EventLoopError, ModelError
from energyshare.models.model import CTMCBackground, ModelSpec, SharingConfig, TraceBackground, c_max
from energyshare.presets import toy_model, wind_solar_synthetic_model
from energyshare.simulator.battery_system import BatterySystem
from energyshare.simulator.fixed_step import fixed_step_simulate
from energyshare.simulator.simulator import (
    advance_slot,
    conservation_residual,
    simulate,
    simulate_standalone,
    standalone_result,
)
from energyshare.simulator.state import TRAJECTORY_COLUMNS, Accumulators, HybridState, InitialState

UNIT = ModelSpec(
    background=TraceBackground(sample_period=1.0, series=((1.0, -1.0),)),
    B1=1.0,
    B2=1.0,
    c=10.0,
)


def _constant_model(r1: float, r2: float) -> ModelSpec:
    return ModelSpec(
        background=CTMCBackground(
            states=("a", "b"),
            rate_matrix=((-1.0, 1.0), (1.0, -1.0)),
            netgen=((r1, r2), (r1, r2)),
        ),
        B1=1.0,
        B2=1.0,
        c=1.0,
    )


def test_advance_slot_empty_agent_covers_from_surplus():
    state = HybridState(t=0.0, bg=0, b1=0.0, b2=0.0)
    config = SharingConfig(c1=10.0, c2=10.0)
    state, acc = advance_slot(state, 1.0, -1.0, 1.0, config, UNIT, Accumulators())
    assert (state.b1, state.b2) == (0.0, 0.0)
    assert (acc.lost1, acc.lost2) == (0.0, 0.0)
    assert acc.xfer_1to2 == pytest.approx(1.0)
    assert state.t == pytest.approx(1.0)


def test_advance_slot_partial_cover():
    state = HybridState(t=0.0, bg=0, b1=0.0, b2=0.0)
    config = SharingConfig(c1=10.0, c2=10.0)
    state, acc = advance_slot(state, -2.0, 1.0, 1.0, config, UNIT, Accumulators())
    assert (state.b1, state.b2) == (0.0, 0.0)
    assert acc.lost1 == pytest.approx(1.0)
    assert acc.xfer_2to1 == pytest.approx(1.0)
    assert acc.served1 == pytest.approx(1.0)


def test_advance_slot_zero_dynamics():
    state = HybridState(t=0.0, bg=0, b1=0.5, b2=0.5)
    state, acc = advance_slot(state, 0.0, 0.0, 5.0, SharingConfig(c1=0.3, c2=0.2), UNIT, Accumulators())
    assert (state.b1, state.b2) == (0.5, 0.5)
    assert acc == Accumulators(elapsed=5.0)


def test_advance_slot_hits_boundary_mid_slot():
    state = HybridState(t=0.0, bg=0, b1=0.5, b2=0.5)
    state, acc = advance_slot(state, -1.0, 0.0, 2.0, SharingConfig(), UNIT, Accumulators())
    # Empties after 0.5, then loses load for the remaining 1.5.
    assert state.b1 == 0.0
    assert acc.lost1 == pytest.approx(1.5)
    assert acc.served1 == pytest.approx(0.5)


def test_advance_slot_rejects_empty_slot():
    with pytest.raises(ValueError):
        advance_slot(HybridState(t=0.0, bg=0, b1=0.5, b2=0.5), 0.0, 0.0, 0.0, SharingConfig(), UNIT, Accumulators())


def test_battery_system_emits_events():
    system = BatterySystem(UNIT, SharingConfig(), state=HybridState(t=0.0, bg=0, b1=0.5, b2=0.5))
    events = []

    @system.event_handler("on_event")
    def on_event(system, state, acc):
        events.append(state)

    system.set_background(0, 1.0, -1.0)
    system.advance(2.0)
    # Both batteries hit a boundary at t = 0.5, then the slot ends.
    assert [e.t for e in events] == pytest.approx([0.5, 2.0])
    assert (events[0].b1, events[0].b2) == (1.0, 0.0)


def test_event_loop_cap():
    system = BatterySystem(
        UNIT, SharingConfig(), state=HybridState(t=0.0, bg=0, b1=0.5, b2=0.5), max_events_per_slot=1
    )
    system.set_background(0, 1.0, -1.0)
    with pytest.raises(EventLoopError):
        system.advance(2.0)


def test_ctmc_sampler_is_reproducible(toy_symmetric):
    first, second = CTMCSampler(toy_symmetric.background), CTMCSampler(toy_symmetric.background)
    first.start(42)
    second.start(42)
    assert [first.next_slot() for _ in range(5000)] == [second.next_slot() for _ in range(5000)]


def test_ctmc_sampler_holding_times(toy_symmetric):
    sampler = create_sampler(toy_symmetric, seed=1)
    slots = [sampler.next_slot() for _ in range(20000)]
    # Every state of the toy chain is left at rate 2.
    assert np.mean([s.duration for s in slots]) == pytest.approx(0.5, rel=0.03)
    for earlier, later in zip(slots[:-1], slots[1:]):
        assert earlier.index != later.index


def test_trace_sampler_cycles():
    background = TraceBackground(sample_period=0.5, series=((1.0, 2.0), (3.0, 4.0)))
    sampler = TraceSampler(background)
    sampler.start(seed=123)
    slots = [sampler.next_slot() for _ in range(3)]
    assert [s.index for s in slots] == [0, 1, 0]
    assert (slots[1].r1, slots[1].r2) == (3.0, 4.0)
    assert all(s.duration == 0.5 for s in slots)


def test_simulate_is_deterministic(toy_symmetric):
    config = SharingConfig(c1=0.75, c2=0.5)
    first = simulate(toy_symmetric, config, horizon=2000.0, seed=3)
    second = simulate(toy_symmetric, config, horizon=2000.0, seed=3)
    assert first == second


def test_simulate_rejects_invalid_config(toy_symmetric):
    with pytest.raises(ModelError):
        simulate(toy_symmetric, SharingConfig(c1=2.0, c2=0.0), horizon=100.0)


def test_simulate_rejects_warmup_beyond_horizon(toy_symmetric):
    with pytest.raises(ModelError):
        simulate(toy_symmetric, SharingConfig(), horizon=100.0, warmup=100.0)


def test_no_deficit_means_no_lost_load():
    result = simulate(_constant_model(0.0, 0.0), SharingConfig(), horizon=100.0)
    assert (result.llr1, result.llr2) == (0.0, 0.0)


def test_standalone_without_deficit_is_zero():
    assert simulate_standalone(_constant_model(1.0, 0.5), 1, horizon=100.0) == 0.0


def test_standalone_rejects_unknown_agent(toy_symmetric):
    with pytest.raises(ValueError):
        simulate_standalone(toy_symmetric, 3, horizon=100.0)


def test_constant_deficit_llr():
    # Battery 1 empties after 0.5 and then loses 0.5 per unit time.
    model = _constant_model(-0.5, 0.0)
    result = simulate(model, SharingConfig(), horizon=101.0, warmup=1.0)
    assert result.llr1 == pytest.approx(0.5)
    assert result.llr2 == 0.0
    assert result.se1 == pytest.approx(0.0, abs=1e-12)


def test_llr_is_measured_after_warmup(toy_symmetric):
    config = SharingConfig(c1=1.0, c2=0.5)
    full = simulate(toy_symmetric, config, horizon=400.0, warmup=0.0, seed=3)
    assert full.llr1 == pytest.approx(full.accumulators.lost(1) / 400.0)
    assert full.llr2 == pytest.approx(full.accumulators.lost(2) / 400.0)
    assert full.params.measured_time == 400.0

    late = simulate(toy_symmetric, config, horizon=400.0, warmup=100.0, seed=3)
    assert late.params.measured_time == 300.0
    assert late.accumulators.elapsed == pytest.approx(400.0)


def test_conservation(toy_symmetric, random_model, random_config):
    rng = np.random.default_rng(2025)
    runs = [(toy_symmetric, SharingConfig(c1=1.5, c2=1.5))]
    runs += [(model, random_config(rng, model, interior=False)) for model in (random_model(rng) for _ in range(10))]
    for model, config in runs:
        result = simulate(model, config, horizon=500.0, seed=int(rng.integers(1000)))
        assert conservation_residual(result) <= 1e-6
        assert 0.0 <= result.final_state.b1 <= model.B1
        assert 0.0 <= result.final_state.b2 <= model.B2


@pytest.mark.parametrize("share", [0.0, 0.5, 1.0])
def test_conservation_on_a_trace(share):
    model = wind_solar_synthetic_model(days=3, seed=0)
    config = SharingConfig(c1=share * c_max(model, 1), c2=share * c_max(model, 2))
    # Longer than the trace, so the replay wraps around.
    horizon = model.background.duration + 28.0
    result = simulate(model, config, horizon=horizon, warmup=0.0, trajectory=True)
    assert conservation_residual(result) <= 1e-6
    for row in result.trajectory:
        assert 0.0 <= row["b1"] <= model.B1
        assert 0.0 <= row["b2"] <= model.B2


def test_trajectory_log(toy_symmetric):
    result = simulate(toy_symmetric, SharingConfig(c1=1.0, c2=1.0), horizon=200.0, trajectory=True)
    rows = result.trajectory
    assert list(rows[0]) == TRAJECTORY_COLUMNS
    times = [row["t"] for row in rows]
    assert times == sorted(times)
    assert times[-1] == pytest.approx(200.0)
    for row in rows:
        assert 0.0 <= row["b1"] <= toy_symmetric.B1
        assert 0.0 <= row["b2"] <= toy_symmetric.B2


def test_initial_state_defaults_to_half_capacity(toy_symmetric):
    result = simulate(toy_symmetric, SharingConfig(), horizon=10.0)
    assert (result.initial_state.b1, result.initial_state.b2) == (5.0, 5.0)
    assert result.initial_state.bg == 0


def test_initial_state_above_capacity(toy_symmetric):
    with pytest.raises(ModelError):
        simulate(toy_symmetric, SharingConfig(), horizon=10.0, initial=InitialState(b1=11.0))


def test_initial_state_background_out_of_range(toy_symmetric):
    with pytest.raises(ModelError, match="out of range"):
        simulate(toy_symmetric, SharingConfig(), horizon=10.0, initial=InitialState(bg=7))
    with pytest.raises(ModelError, match="out of range"):
        simulate(UNIT, SharingConfig(), horizon=10.0, initial=InitialState(bg=1))


def test_trace_background_replays():
    model = ModelSpec(
        background=TraceBackground(sample_period=1.0, series=((1.0, -1.0), (-1.0, 1.0))),
        B1=0.5,
        B2=0.5,
        c=0.0,
    )
    result = simulate(model, SharingConfig(), horizon=100.0, warmup=0.0, seed=1)
    again = simulate(model, SharingConfig(), horizon=100.0, warmup=0.0, seed=99)
    assert result.llr1 == again.llr1
    # Each battery fills by 0.5 then drains 1.0 per two-unit cycle.
    assert result.llr1 == pytest.approx(0.25, rel=0.02)


def test_scaling_model_scales_llr(toy_symmetric):
    from energyshare.models.model import scaled, scaled_config

    config = SharingConfig(c1=1.0, c2=0.5)
    base = simulate(toy_symmetric, config, horizon=1000.0, seed=4)
    big = simulate(scaled(toy_symmetric, 2.0), scaled_config(config, 2.0), horizon=1000.0, seed=4)
    assert big.llr1 == pytest.approx(2 * base.llr1, rel=1e-9, abs=1e-12)
    assert big.llr2 == pytest.approx(2 * base.llr2, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("surplus2", [2.0, 2.15, 2.5])
def test_overflow_sharing_beats_standalone(surplus2):
    model = toy_model(surplus2)
    shared = simulate(model, SharingConfig(), horizon=20000.0, seed=8)
    standalone = standalone_result(model, horizon=20000.0, seed=8)
    assert shared.llr1 < standalone.llr1
    assert shared.llr2 < standalone.llr2


@pytest.mark.slow
@pytest.mark.parametrize("surplus2", [2.0, 2.15, 2.5])
def test_fixed_step_cross_check(surplus2):
    model = toy_model(surplus2)
    for config in (SharingConfig(), SharingConfig(c1=1.5, c2=0.75)):
        exact = simulate(model, config, horizon=2000.0, warmup=0.0, seed=5, batches=2)
        reference = fixed_step_simulate(model, config, horizon=2000.0, seed=5, dt=1e-3)
        assert reference.total_lost() == pytest.approx(exact.accumulators.total_lost(), rel=0.01, abs=0.05)


def test_fixed_step_matches_on_a_trace():
    model = ModelSpec(
        background=TraceBackground(sample_period=1.0, series=((2.0, -1.0), (-1.5, 0.5), (-1.0, -1.0))),
        B1=1.0,
        B2=1.0,
        c=1.0,
    )
    config = SharingConfig(c1=0.5, c2=0.5)
    exact = simulate(model, config, horizon=30.0, warmup=0.0, batches=2)
    reference = fixed_step_simulate(model, config, horizon=30.0, dt=1e-3)
    assert reference.lost1 == pytest.approx(exact.accumulators.lost1, rel=0.01, abs=0.05)
    assert reference.lost2 == pytest.approx(exact.accumulators.lost2, rel=0.01, abs=0.05)
    assert math.isclose(reference.elapsed, 30.0)
