#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Two systems driven by one background sample path.

Both systems see the same slots (common random numbers) and are stepped
to the earliest event of either, so their states can be compared at
every event instant of the merged timeline.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from loguru import logger

from energyshare.backgrounds.factory import create_sampler
from energyshare.errors import EventLoopError
from energyshare.models.model import ModelSpec, SharingConfig
from energyshare.simulator.battery_system import BatterySystem
from energyshare.simulator.simulator import check_simulable, initial_state
from energyshare.simulator.state import Accumulators, InitialState, SimulationParams

COUPLED_COLUMNS = ["t", "b1", "b2", "lost1", "lost2", "over1", "over2"]

PATHWISE_SLACK = 1e-9


@dataclass
class CoupledReport:
    """Merged event timeline of an original system A and a perturbed system B.

    `a` and `b` map each of `COUPLED_COLUMNS` (except "t") to an array with
    one entry per merged event instant in `times`.
    """

    config_a: SharingConfig
    config_b: SharingConfig
    times: np.ndarray
    a: Dict[str, np.ndarray]
    b: Dict[str, np.ndarray]
    final_a: Accumulators
    final_b: Accumulators
    horizon: float


@dataclass
class PathwiseCheck:
    name: str
    passed: bool
    worst: float

    def __str__(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} (worst margin {self.worst:.3g})"


@dataclass
class PathwiseReport:
    agent: int
    epsilon: float
    checks: List[PathwiseCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def __str__(self):
        lines = [f"perturbed agent: {self.agent}, epsilon: {self.epsilon:g}"]
        lines += [str(check) for check in self.checks]
        return "\n".join(lines)


def coupled_simulate(
    model: ModelSpec,
    config_a: SharingConfig,
    config_b: SharingConfig,
    horizon: float,
    seed: int = 0,
    initial: Optional[InitialState] = None,
    **kwargs,
) -> CoupledReport:
    """Runs both configurations against one background path from one initial state."""
    params = SimulationParams(horizon=horizon, warmup=0.0, seed=seed, initial=initial or InitialState(), **kwargs)
    check_simulable(model, config_a, params)
    check_simulable(model, config_b, params)

    start = initial_state(model, params.initial)
    sampler = create_sampler(model, params.seed, start.bg)
    system_a = BatterySystem(model, config_a, state=start, max_events_per_slot=params.max_events_per_slot, name="original")
    system_b = BatterySystem(model, config_b, state=start, max_events_per_slot=params.max_events_per_slot, name="perturbed")

    rows: List[tuple] = []

    def record(t: float):
        rows.append((t, *_snapshot(system_a), *_snapshot(system_b)))

    record(0.0)
    t = 0.0
    while t < horizon:
        slot = sampler.next_slot()
        system_a.set_background(slot.index, slot.r1, slot.r2)
        system_b.set_background(slot.index, slot.r1, slot.r2)

        remaining = min(slot.duration, horizon - t)
        events = 0
        while remaining > 0.0:
            events += 1
            if events > 2 * params.max_events_per_slot:
                raise EventLoopError(f"coupled run exceeded {2 * params.max_events_per_slot} events in one slot at t={t:g}")
            tau = min(system_a.next_event_in(), system_b.next_event_in(), remaining)
            system_a.step(tau)
            system_b.step(tau)
            remaining -= tau
            t += tau
            record(t)

    table = np.asarray(rows, dtype=float)
    width = len(COUPLED_COLUMNS) - 1
    names = COUPLED_COLUMNS[1:]
    report = CoupledReport(
        config_a=config_a,
        config_b=config_b,
        times=table[:, 0],
        a={name: table[:, 1 + k] for k, name in enumerate(names)},
        b={name: table[:, 1 + width + k] for k, name in enumerate(names)},
        final_a=system_a.accumulators.copy(),
        final_b=system_b.accumulators.copy(),
        horizon=horizon,
    )
    logger.debug(f"Coupled run {config_a} vs {config_b}: {len(rows)} merged event instants")
    return report


def _snapshot(system: BatterySystem) -> tuple:
    state, acc = system.state, system.accumulators
    return (state.b1, state.b2, acc.lost1, acc.lost2, acc.over1, acc.over2)


def _perturbation(report: CoupledReport):
    d1 = report.config_b.c1 - report.config_a.c1
    d2 = report.config_b.c2 - report.config_a.c2
    if d2 == 0.0 or (d1 != 0.0 and abs(d1) >= abs(d2)):
        return 1, d1
    return 2, d2


def _at_most(name: str, lhs: np.ndarray, rhs: np.ndarray, slack: float) -> PathwiseCheck:
    """Checks lhs <= rhs elementwise with a slack relative to the magnitudes."""
    tolerance = slack * np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    margin = rhs - lhs
    worst = float(margin.min()) if len(margin) else 0.0
    return PathwiseCheck(name=name, passed=bool(np.all(margin >= -tolerance)), worst=worst)


def pathwise_check(
    report: CoupledReport, slack: float = PATHWISE_SLACK, agent: Optional[int] = None
) -> PathwiseReport:
    """Evaluates the coupling inequalities at every merged event instant.

    With system B sharing epsilon more than system A from agent i:
    both batteries of B never exceed those of A, agent i loses at least as
    much load in B, but at most epsilon * t more, B overflows no more from
    either battery, and B loses no more load in total.
    """
    detected, epsilon = _perturbation(report)
    if agent is None:
        agent = detected
    else:
        epsilon = report.config_b.get(agent) - report.config_a.get(agent)
    a, b = report.a, report.b
    lost_i = f"lost{agent}"
    checks = [
        _at_most("battery 1 ordering", b["b1"], a["b1"], slack),
        _at_most("battery 2 ordering", b["b2"], a["b2"], slack),
        _at_most(f"agent {agent} lost load ordering", a[lost_i], b[lost_i], slack),
        _at_most("overflow 1 ordering", b["over1"], a["over1"], slack),
        _at_most("overflow 2 ordering", b["over2"], a["over2"], slack),
        _at_most("total lost load ordering", b["lost1"] + b["lost2"], a["lost1"] + a["lost2"], slack),
        _at_most(f"agent {agent} lipschitz bound", b[lost_i], a[lost_i] + abs(epsilon) * report.times, slack),
    ]
    return PathwiseReport(agent=agent, epsilon=epsilon, checks=checks)
