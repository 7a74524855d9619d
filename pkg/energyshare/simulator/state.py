#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from energyshare.dynamics.rates import RateBundle
from energyshare.utils.utils import neg

DEFAULT_WARMUP_FRACTION = 0.01
DEFAULT_BATCHES = 20
DEFAULT_MAX_EVENTS_PER_SLOT = 10_000

TRAJECTORY_COLUMNS = ["t", "bg", "b1", "b2", "lost1", "lost2", "over1", "over2"]


@dataclass(frozen=True)
class HybridState:
    """Simulated time, background state (or trace index) and battery levels."""

    t: float
    bg: int
    b1: float
    b2: float


@dataclass
class Accumulators:
    """Cumulative energies of a run; every field is non-decreasing."""

    lost1: float = 0.0
    lost2: float = 0.0
    served1: float = 0.0
    served2: float = 0.0
    over1: float = 0.0
    over2: float = 0.0
    xfer_1to2: float = 0.0
    xfer_2to1: float = 0.0
    elapsed: float = 0.0
    # Signed integral of r_i, kept for the energy balance.
    supply1: float = 0.0
    supply2: float = 0.0

    def accumulate(self, rates: RateBundle, r1: float, r2: float, tau: float):
        self.lost1 += rates.loss1 * tau
        self.lost2 += rates.loss2 * tau
        self.served1 += (neg(r1) - rates.loss1) * tau
        self.served2 += (neg(r2) - rates.loss2) * tau
        self.over1 += rates.over1 * tau
        self.over2 += rates.over2 * tau
        self.xfer_1to2 += rates.xfer_1to2 * tau
        self.xfer_2to1 += rates.xfer_2to1 * tau
        self.supply1 += r1 * tau
        self.supply2 += r2 * tau
        self.elapsed += tau

    def copy(self) -> "Accumulators":
        return Accumulators(**asdict(self))

    def minus(self, other: "Accumulators") -> "Accumulators":
        return Accumulators(**{f.name: getattr(self, f.name) - getattr(other, f.name) for f in fields(self)})

    def lost(self, agent: int) -> float:
        return self.lost1 if agent == 1 else self.lost2

    def total_lost(self) -> float:
        return self.lost1 + self.lost2


class InitialState(BaseModel):
    """Optional initial condition; missing levels default to B_i / 2."""

    model_config = ConfigDict(frozen=True)

    b1: Optional[float] = Field(default=None, ge=0)
    b2: Optional[float] = Field(default=None, ge=0)
    bg: int = Field(default=0, ge=0)


class SimulationParams(BaseModel):
    """Parameters of a single simulation run.

    Attributes:
        horizon: Total simulated time.
        warmup: Time discarded before averaging; defaults to 1% of the horizon.
        seed: Seed of the background sample path.
        initial: Initial battery levels and background state.
        batches: Number of batches for the batch-means standard error.
        max_events_per_slot: Event-loop iteration cap within one slot.
        trajectory: Whether to record one row per event instant.
    """

    model_config = ConfigDict(frozen=True)

    horizon: float = Field(gt=0)
    warmup: Optional[float] = Field(default=None, ge=0)
    seed: int = 0
    initial: InitialState = InitialState()
    batches: int = Field(default=DEFAULT_BATCHES, ge=2)
    max_events_per_slot: int = Field(default=DEFAULT_MAX_EVENTS_PER_SLOT, gt=0)
    trajectory: bool = False

    @property
    def resolved_warmup(self) -> float:
        return DEFAULT_WARMUP_FRACTION * self.horizon if self.warmup is None else self.warmup

    @property
    def measured_time(self) -> float:
        return self.horizon - self.resolved_warmup


@dataclass
class SimulationResult:
    """LLR estimates and accumulated energies of one run."""

    llr1: float
    llr2: float
    se1: float
    se2: float
    accumulators: Accumulators
    initial_state: HybridState
    final_state: HybridState
    params: SimulationParams
    trajectory: Optional[List[Dict[str, Any]]] = None

    def llr(self, agent: int) -> float:
        return self.llr1 if agent == 1 else self.llr2

    def se(self, agent: int) -> float:
        return self.se1 if agent == 1 else self.se2
