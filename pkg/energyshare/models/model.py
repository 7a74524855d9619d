#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Two-agent energy sharing model.

A model is a common background process (a finite CTMC or a piecewise
constant trace) that sets the net generation (r1, r2) of both agents, the
battery capacities B1, B2 and the physical transfer capacity c. A sharing
configuration (c1, c2) bounds the rate at which each agent covers the
other's deficit.
"""

from typing import Annotated, List, Literal, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.sparse.csgraph import connected_components

from energyshare.utils.utils import neg

Power = Annotated[float, Field(ge=0, description="Power (energy per time unit)")]
Energy = Annotated[float, Field(gt=0, description="Energy (power x time unit)")]
NetGen = Tuple[float, float]

ROW_SUM_TOLERANCE = 1e-9


class Units(BaseModel):
    """Unit labels carried into every output for provenance."""

    model_config = ConfigDict(frozen=True)

    power: str = "kW"
    energy: str = "kWh"
    time: str = "h"


class CTMCBackground(BaseModel):
    """Background process given by a finite continuous-time Markov chain.

    Attributes:
        states: State labels, in the order used by `rate_matrix` and `netgen`.
        rate_matrix: Dense row-major generator matrix (rates per time unit).
        netgen: Per-state net generation pair (r1, r2).
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["ctmc"] = "ctmc"
    states: Tuple[str, ...]
    rate_matrix: Tuple[Tuple[float, ...], ...]
    netgen: Tuple[NetGen, ...]

    @property
    def num_states(self) -> int:
        return len(self.states)

    def rates(self) -> np.ndarray:
        return np.asarray(self.rate_matrix, dtype=float)

    def r_values(self) -> np.ndarray:
        return np.asarray(self.netgen, dtype=float).reshape(-1, 2)


class TraceBackground(BaseModel):
    """Background process given by a piecewise-constant (r1, r2) series.

    Attributes:
        sample_period: Duration of each sample, in model time units.
        series: Ordered (r1, r2) samples.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["trace"] = "trace"
    sample_period: float
    series: Tuple[NetGen, ...]

    def r_values(self) -> np.ndarray:
        return np.asarray(self.series, dtype=float).reshape(-1, 2)

    @property
    def duration(self) -> float:
        return self.sample_period * len(self.series)


BackgroundSpec = Annotated[Union[CTMCBackground, TraceBackground], Field(discriminator="kind")]


class ModelSpec(BaseModel):
    """Background driver, battery capacities and transfer capacity."""

    model_config = ConfigDict(frozen=True)

    background: BackgroundSpec
    B1: Energy
    B2: Energy
    c: Power
    units: Units = Units()

    def r_values(self) -> np.ndarray:
        return self.background.r_values()


class SharingConfig(BaseModel):
    """Peak rates (c1, c2) at which each agent covers the other's deficit."""

    model_config = ConfigDict(frozen=True)

    c1: Power = 0.0
    c2: Power = 0.0

    def get(self, agent: int) -> float:
        return self.c1 if agent == 1 else self.c2

    def swapped(self) -> "SharingConfig":
        return SharingConfig(c1=self.c2, c2=self.c1)

    def __str__(self):
        return f"({self.c1:g}, {self.c2:g})"


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    code: str
    message: str


class ValidationReport(BaseModel):
    """Violated model assumptions. An empty report means the model is valid."""

    violations: List[Violation] = []
    notes: List[str] = []

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> List[str]:
        return [v.code for v in self.violations]

    def add(self, code: str, message: str):
        self.violations.append(Violation(code=code, message=message))

    def __str__(self):
        lines = [f"valid: {self.valid}"]
        lines += [f"violation [{v.code}]: {v.message}" for v in self.violations]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def _validate_ctmc(bg: CTMCBackground, report: ValidationReport):
    n = len(bg.rate_matrix)
    widths = [len(row) for row in bg.rate_matrix]
    if n == 0 or any(width != n for width in widths):
        report.add("rate_matrix shape", f"expected a square matrix, got rows of length {widths}")
        return
    if len(bg.netgen) != n or bg.num_states != n:
        report.add("netgen shape", f"expected {n} states and (r1, r2) pairs, got {bg.num_states} and {len(bg.netgen)}")
        return
    q = bg.rates()

    off_diagonal = q[~np.eye(n, dtype=bool)]
    if np.any(off_diagonal < 0):
        report.add("rate_matrix negative off-diagonal", "off-diagonal rates must be >= 0")

    tolerance = ROW_SUM_TOLERANCE * (1.0 + np.abs(q).max(initial=0.0))
    for row, total in enumerate(q.sum(axis=1)):
        if abs(total) > tolerance:
            report.add("rate_matrix row sum", f"row {row} ({bg.states[row]}) sums to {total:g}")

    graph = (q > 0) & ~np.eye(n, dtype=bool)
    num_components, _ = connected_components(graph.astype(int), directed=True, connection="strong")
    if num_components != 1:
        report.add("irreducible", f"transition graph has {num_components} strongly connected components")

    r = bg.r_values()
    r1, r2 = r[:, 0], r[:, 1]
    regeneration = {
        "s1": (r1 > 0) & (r2 > 0),
        "s2": (r1 < 0) & (r2 < 0),
        "s3": (r1 > 0) & (r2 < 0) & (r2 <= r2.min()),
        "s4": (r1 < 0) & (r2 > 0) & (r1 <= r1.min()),
    }
    for label, mask in regeneration.items():
        if not mask.any():
            report.add(f"{label} missing", f"no regeneration state {label} in the background chain")
        else:
            index = int(np.flatnonzero(mask)[0])
            report.notes.append(f"regeneration state {label}: {bg.states[index]}")


def _validate_trace(bg: TraceBackground, report: ValidationReport):
    if not bg.series:
        report.add("trace empty", "trace background has no samples")
    if not bg.sample_period > 0:
        report.add("sample_period", f"sample period must be > 0, got {bg.sample_period:g}")
    report.notes.append("regeneration states: not applicable to trace backgrounds")


def validate_model(model: ModelSpec) -> ValidationReport:
    """Checks every background and capacity assumption individually.

    Field constraints (B_i > 0, c >= 0) are enforced when the model is
    built; this reports the structural ones, which are data, not failures.
    """
    report = ValidationReport()
    match model.background:
        case CTMCBackground() as bg:
            _validate_ctmc(bg, report)
        case TraceBackground() as bg:
            _validate_trace(bg, report)
    return report


def c_max(model: ModelSpec, agent: int) -> float:
    """Largest useful deficit-covering rate of `agent`.

    c_{i,max} = min(c, max_s [r_{-i}(s)]_-): beyond the other agent's
    largest deficit, a higher c_i never changes the realised transfers.
    """
    other = model.r_values()[:, 1 if agent == 1 else 0]
    deepest = max((neg(float(r)) for r in other), default=0.0)
    return min(model.c, deepest)


def config_is_valid(model: ModelSpec, config: SharingConfig, tolerance: float = 1e-12) -> bool:
    return all(config.get(i) <= c_max(model, i) + tolerance for i in (1, 2))


def is_interior(model: ModelSpec, config: SharingConfig) -> bool:
    """Whether `config` lies in X°, i.e. neither agent shares at its maximum."""
    return config.c1 < c_max(model, 1) and config.c2 < c_max(model, 2)


def two_state_chain(
    rate_up: float, rate_down: float, r_on: float, r_off: float, labels: Sequence[str] = ("on", "off")
) -> CTMCBackground:
    """On/off chain of a single agent; `netgen` holds (r, r) for each state.

    `rate_up` is the off->on rate and `rate_down` the on->off rate.
    """
    return CTMCBackground(
        states=tuple(labels),
        rate_matrix=((-rate_down, rate_down), (rate_up, -rate_up)),
        netgen=((r_on, r_on), (r_off, r_off)),
    )


def product_chain(chain1: CTMCBackground, chain2: CTMCBackground) -> CTMCBackground:
    """Joint background of two independent per-agent chains.

    The generator is the Kronecker sum Q1 (+) Q2; agent 1's net generation
    is read from `chain1` and agent 2's from `chain2`.
    """
    q1, q2 = chain1.rates(), chain2.rates()
    n1, n2 = chain1.num_states, chain2.num_states
    q = np.kron(q1, np.eye(n2)) + np.kron(np.eye(n1), q2)
    r1 = chain1.r_values()[:, 0]
    r2 = chain2.r_values()[:, 1]
    states = tuple(f"{a}|{b}" for a in chain1.states for b in chain2.states)
    netgen = tuple((float(r1[i]), float(r2[j])) for i in range(n1) for j in range(n2))
    return CTMCBackground(
        states=states,
        rate_matrix=tuple(tuple(float(x) for x in row) for row in q),
        netgen=netgen,
    )


def scaled(model: ModelSpec, k: float) -> ModelSpec:
    """Multiplies every power and capacity of the model by `k` (> 0)."""
    bg = model.background
    match bg:
        case CTMCBackground():
            background = bg.model_copy(update={"netgen": tuple((k * a, k * b) for a, b in bg.netgen)})
        case TraceBackground():
            background = bg.model_copy(update={"series": tuple((k * a, k * b) for a, b in bg.series)})
    return ModelSpec(
        background=background,
        B1=k * model.B1,
        B2=k * model.B2,
        c=k * model.c,
        units=model.units,
    )


def scaled_config(config: SharingConfig, k: float) -> SharingConfig:
    return SharingConfig(c1=k * config.c1, c2=k * config.c2)
