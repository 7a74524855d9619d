#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from loguru import logger

from energyshare.analysis.runner import SimulationJob, SimulationRunner
from energyshare.errors import ModelError
from energyshare.models.model import ModelSpec, SharingConfig, c_max, config_is_valid, is_interior
from energyshare.simulator.coupling import PathwiseReport, coupled_simulate, pathwise_check
from energyshare.simulator.state import InitialState, SimulationParams

# Number of batch-means standard errors an estimate must move by to count.
STATISTICAL_SLACK = 2.0

DEFAULT_THETA_GRID = (-1.0, -0.5, 0.0, 0.5, 1.0, 2.0)


def mutual_benefit_search(
    model: ModelSpec,
    base: SharingConfig,
    step: float,
    theta_grid: Sequence[float] = DEFAULT_THETA_GRID,
    horizon: float = 1e5,
    seed: int = 0,
    warmup: Optional[float] = None,
    jobs: int = 1,
) -> Optional[SharingConfig]:
    """Looks for a configuration that lowers both agents' LLR below `base`.

    Probes `base + step * (1, theta)` for every theta, clipped to the
    configuration rectangle, on the same background path as `base`. The
    first probe (in `theta_grid` order) where both LLRs drop by more than
    `STATISTICAL_SLACK` standard errors is returned.
    """
    if not is_interior(model, base):
        raise ModelError(
            f"base configuration {base} is not interior: (c1max, c2max) = "
            f"({c_max(model, 1):g}, {c_max(model, 2):g})"
        )
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step:g}")

    c1max, c2max = c_max(model, 1), c_max(model, 2)
    probes: List[SharingConfig] = []
    for theta in theta_grid:
        c1 = min(max(base.c1 + step, 0.0), c1max)
        c2 = min(max(base.c2 + step * theta, 0.0), c2max)
        probes.append(SharingConfig(c1=c1, c2=c2))

    params = SimulationParams(horizon=horizon, warmup=warmup, seed=seed)
    batch = [SimulationJob(model=model, config=base, params=params, label=f"base {base}")]
    batch += [SimulationJob(model=model, config=probe, params=params, label=f"probe {probe}") for probe in probes]
    base_result, *results = SimulationRunner(jobs=jobs).run(batch)

    for theta, probe, result in zip(theta_grid, probes, results):
        improved = all(
            result.llr(i) < base_result.llr(i) - STATISTICAL_SLACK * max(result.se(i), base_result.se(i))
            for i in (1, 2)
        )
        if improved:
            logger.debug(
                f"Mutually beneficial direction theta={theta:g}: {base} -> {probe}, "
                f"llr ({base_result.llr1:.6g}, {base_result.llr2:.6g}) -> ({result.llr1:.6g}, {result.llr2:.6g})"
            )
            return probe
    logger.debug(f"No mutually beneficial probe around {base} with step {step:g}")
    return None


@dataclass
class ProbeDeltas:
    """Finite differences of the LLRs when one agent's c_i grows by epsilon."""

    agent: int
    epsilon: float
    d_llr1: float
    d_llr2: float
    pathwise: PathwiseReport

    @property
    def d_sum(self) -> float:
        return self.d_llr1 + self.d_llr2

    def d_llr(self, agent: int) -> float:
        return self.d_llr1 if agent == 1 else self.d_llr2

    def signs_hold(self, tolerance: float = 0.0) -> bool:
        """Own LLR non-decreasing, other LLR and total non-increasing."""
        other = 2 if self.agent == 1 else 1
        return (
            self.d_llr(self.agent) >= -tolerance
            and self.d_llr(other) <= tolerance
            and self.d_sum <= tolerance
        )

    def __str__(self):
        return (
            f"c{self.agent} + {self.epsilon:g}: d_llr1={self.d_llr1:+.6g} "
            f"d_llr2={self.d_llr2:+.6g} d_sum={self.d_sum:+.6g}"
        )


@dataclass
class MonotonicityDeltas:
    config: SharingConfig
    by_agent: Dict[int, ProbeDeltas]

    def __getitem__(self, agent: int) -> ProbeDeltas:
        return self.by_agent[agent]


def _perturbed(config: SharingConfig, agent: int, epsilon: float) -> SharingConfig:
    if agent == 1:
        return SharingConfig(c1=config.c1 + epsilon, c2=config.c2)
    return SharingConfig(c1=config.c1, c2=config.c2 + epsilon)


def monotonicity_probe(
    model: ModelSpec,
    config: SharingConfig,
    epsilon: float,
    horizon: float,
    seed: int = 0,
    initial: Optional[InitialState] = None,
) -> MonotonicityDeltas:
    """Coupled finite differences of (llr1, llr2, llr1 + llr2) in c1 and in c2.

    Each perturbed system is driven by the same background path as the
    original, so the signs of the differences hold pathwise.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon:g}")

    by_agent: Dict[int, ProbeDeltas] = {}
    for agent in (1, 2):
        perturbed = _perturbed(config, agent, epsilon)
        if not config_is_valid(model, perturbed):
            raise ModelError(f"perturbed configuration {perturbed} exceeds c{agent}max = {c_max(model, agent):g}")
        report = coupled_simulate(model, config, perturbed, horizon, seed=seed, initial=initial)
        a, b = report.final_a, report.final_b
        by_agent[agent] = ProbeDeltas(
            agent=agent,
            epsilon=epsilon,
            d_llr1=(b.lost(1) - a.lost(1)) / horizon,
            d_llr2=(b.lost(2) - a.lost(2)) / horizon,
            pathwise=pathwise_check(report, agent=agent),
        )
    return MonotonicityDeltas(config=config, by_agent=by_agent)
