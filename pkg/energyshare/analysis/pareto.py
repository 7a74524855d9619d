#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Pareto frontier enumeration and the egalitarian solution.

Every Pareto-optimal configuration has at least one agent sharing at its
maximum, so the frontier is the two outer edges of the configuration
rectangle. It is walked as one "flattened" path

    (0, c2max) -> (c1max, c2max) -> (c1max, 0)

with `flatten_coord` increasing along it.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from loguru import logger

from energyshare.analysis.runner import SimulationJob, SimulationRunner
from energyshare.models.model import ModelSpec, SharingConfig, c_max
from energyshare.simulator.state import InitialState, SimulationParams
from energyshare.utils.utils import pos

# Relative tolerance when placing grid points on an edge.
GRID_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FrontierPoint:
    config: SharingConfig
    llr1: float
    llr2: float
    benefit1: float
    benefit2: float
    flatten_coord: float
    se1: float = 0.0
    se2: float = 0.0

    @property
    def min_benefit(self) -> float:
        return min(self.benefit1, self.benefit2)

    def with_baseline(self, llr_sa: Tuple[float, float]) -> "FrontierPoint":
        return FrontierPoint(
            config=self.config,
            llr1=self.llr1,
            llr2=self.llr2,
            benefit1=pos(llr_sa[0] - self.llr1),
            benefit2=pos(llr_sa[1] - self.llr2),
            flatten_coord=self.flatten_coord,
            se1=self.se1,
            se2=self.se2,
        )


def _edge(length: float, step: float) -> List[float]:
    """Grid 0, step, 2 step, ... on [0, length] with `length` always included."""
    if length <= 0.0:
        return [0.0]
    count = math.floor(length / step * (1.0 + GRID_TOLERANCE))
    values = [k * step for k in range(count + 1)]
    if length - values[-1] > GRID_TOLERANCE * length:
        values.append(length)
    else:
        values[-1] = length
    return values


def flattened_path(c1max: float, c2max: float, grid_step: float) -> List[Tuple[SharingConfig, float]]:
    """Configurations along the flattened frontier with their `flatten_coord`.

    The top edge is walked left to right, then the right edge top to
    bottom. Both ends are always included. The corner (c1max, c2max) is
    included once, unless the step exceeds both edges, in which case the
    frontier is the two end points only.

    >>> [(p.c1, p.c2, x) for p, x in flattened_path(1.5, 1.5, 0.75)]
    [(0.0, 1.5, 0.0), (0.75, 1.5, 0.75), (1.5, 1.5, 1.5), (1.5, 0.75, 2.25), (1.5, 0.0, 3.0)]
    """
    if not grid_step > 0:
        raise ValueError(f"grid step must be > 0, got {grid_step:g}")
    if c1max < 0 or c2max < 0:
        raise ValueError(f"c_max must be >= 0, got ({c1max:g}, {c2max:g})")

    if grid_step > c1max and grid_step > c2max and c1max + c2max > 0:
        return [(SharingConfig(c1=0.0, c2=c2max), 0.0), (SharingConfig(c1=c1max, c2=0.0), c1max + c2max)]

    path = [(SharingConfig(c1=c1, c2=c2max), c1) for c1 in _edge(c1max, grid_step)]
    for drop in _edge(c2max, grid_step)[1:]:
        c2 = max(c2max - drop, 0.0)
        path.append((SharingConfig(c1=c1max, c2=c2), c1max + drop))
    return path


def pareto_sweep(
    model: ModelSpec,
    grid_step: float,
    horizon: float,
    warmup: Optional[float] = None,
    seed: int = 0,
    jobs: int = 1,
    initial: Optional[InitialState] = None,
    **kwargs,
) -> Tuple[List[FrontierPoint], Tuple[float, float]]:
    """Simulates every frontier configuration on one background path.

    All configurations and the standalone baseline use the same seed, so
    differences along the frontier come from the configuration only.

    Returns:
        The frontier points ordered by `flatten_coord` and the standalone
        LLRs used for the benefits.
    """
    params = SimulationParams(
        horizon=horizon,
        warmup=warmup,
        seed=seed,
        initial=initial or InitialState(),
        **kwargs,
    )
    path = flattened_path(c_max(model, 1), c_max(model, 2), grid_step)

    batch = [SimulationJob(model=model, config=SharingConfig(), params=params, sharing=False, label="standalone")]
    batch += [SimulationJob(model=model, config=config, params=params, label=f"frontier {config}") for config, _ in path]

    runner = SimulationRunner(jobs=jobs)
    standalone, *results = runner.run(batch)
    llr_sa = (standalone.llr1, standalone.llr2)

    frontier = [
        FrontierPoint(
            config=config,
            llr1=result.llr1,
            llr2=result.llr2,
            benefit1=pos(llr_sa[0] - result.llr1),
            benefit2=pos(llr_sa[1] - result.llr2),
            flatten_coord=coord,
            se1=result.se1,
            se2=result.se2,
        )
        for (config, coord), result in zip(path, results)
    ]
    logger.debug(f"Swept {len(frontier)} frontier configurations, standalone llr=({llr_sa[0]:.6g}, {llr_sa[1]:.6g})")
    return frontier, llr_sa


def egalitarian_solution(frontier: List[FrontierPoint], llr_sa: Tuple[float, float]) -> FrontierPoint:
    """Frontier point maximising the smaller of the two benefits.

    Benefits are measured against the standalone LLRs `llr_sa`. Ties go to
    the point with the smaller `flatten_coord`.
    """
    if not frontier:
        raise ValueError("egalitarian solution of an empty frontier")

    best: Optional[FrontierPoint] = None
    for point in sorted(frontier, key=lambda p: p.flatten_coord):
        candidate = point.with_baseline(llr_sa)
        if best is None or candidate.min_benefit > best.min_benefit:
            best = candidate

    if best.min_benefit <= 0.0:
        logger.warning(f"No frontier configuration benefits both agents, egalitarian point {best.config} has min-benefit 0")
    return best
