#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Instantaneous battery dynamics of the two-agent sharing mechanism.

Given the region of each battery (empty, intermediate or full), the net
generation pair and the sharing configuration, this module returns the
battery derivatives and the transfer, loss-of-load and overflow rates.
Transfers follow the sharing rules:

- agent j faces a deficit when its battery is empty and r_j < 0;
- agent i covers that deficit from an intermediate battery at
  min(c_i, -r_j), from an empty battery only out of its own surplus,
  min([r_i]_+, c_i, -r_j), and from a full battery at
  max(min(c_i, -r_j), min(c, [r_i]_+));
- a full battery with surplus overflows to the other agent up to c,
  whether or not the other agent faces a deficit.

Loss and overflow are whatever the balance identity leaves over once the
battery derivative is clipped at its boundary.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from energyshare.errors import RateConsistencyError
from energyshare.models.model import SharingConfig
from energyshare.utils.utils import neg, pos

RATE_TOLERANCE = 1e-12


class RegionLabel(Enum):
    EMPTY = 1
    INTERIOR = 2
    FULL = 3


@dataclass(frozen=True)
class RateBundle:
    """Instantaneous rates at a hybrid state. All but db1, db2 are >= 0."""

    db1: float = 0.0
    db2: float = 0.0
    xfer_1to2: float = 0.0
    xfer_2to1: float = 0.0
    loss1: float = 0.0
    loss2: float = 0.0
    over1: float = 0.0
    over2: float = 0.0

    def swapped(self) -> "RateBundle":
        return RateBundle(
            db1=self.db2,
            db2=self.db1,
            xfer_1to2=self.xfer_2to1,
            xfer_2to1=self.xfer_1to2,
            loss1=self.loss2,
            loss2=self.loss1,
            over1=self.over2,
            over2=self.over1,
        )

    def balance(self, agent: int, r: float) -> float:
        """Residual of r_i + in_i - out_i - db_i + loss_i - over_i (exactly 0)."""
        if agent == 1:
            return r + self.xfer_2to1 - self.xfer_1to2 - self.db1 + self.loss1 - self.over1
        return r + self.xfer_1to2 - self.xfer_2to1 - self.db2 + self.loss2 - self.over2


def region_of(b: float, capacity: float) -> RegionLabel:
    if b <= 0.0:
        return RegionLabel.EMPTY
    if b >= capacity:
        return RegionLabel.FULL
    return RegionLabel.INTERIOR


def _in_deficit(region: RegionLabel, r: float) -> bool:
    return region == RegionLabel.EMPTY and r < 0.0


def _cover_rate(region_i: RegionLabel, r_i: float, c_i: float, deficit_j: float, c: float) -> float:
    """Rate at which agent i covers agent j's deficit."""
    match region_i:
        case RegionLabel.INTERIOR:
            return min(c_i, deficit_j)
        case RegionLabel.EMPTY:
            return min(pos(r_i), c_i, deficit_j)
        case RegionLabel.FULL:
            # Either the nominal rate (discharging if r_i falls short) or
            # the whole surplus up to c, whichever is larger.
            return max(min(c_i, deficit_j), min(c, pos(r_i)))


def _transfer_rate(
    region_i: RegionLabel,
    region_j: RegionLabel,
    r_i: float,
    r_j: float,
    c_i: float,
    c: float,
) -> float:
    if _in_deficit(region_j, r_j):
        return _cover_rate(region_i, r_i, c_i, -r_j, c)
    if region_i == RegionLabel.FULL and r_i > 0.0:
        if region_j == RegionLabel.FULL:
            # Only what j is discharging can be absorbed; the rest is lost.
            return min(c, r_i, neg(r_j))
        return min(c, r_i)
    return 0.0


def _clip(region: RegionLabel, raw: float) -> float:
    if region == RegionLabel.EMPTY and raw < 0.0:
        return 0.0
    if region == RegionLabel.FULL and raw > 0.0:
        return 0.0
    return raw


def instantaneous_rates(
    region1: RegionLabel,
    region2: RegionLabel,
    r1: float,
    r2: float,
    config: SharingConfig,
    c: float,
    *,
    sharing: bool = True,
) -> RateBundle:
    """Battery derivatives, transfers, lost load and overflow at one instant.

    With `sharing=False` no energy moves between the agents at all, which
    is the standalone setting (not the same as configuration (0, 0), where
    overflow is still shared).
    """
    if sharing:
        x12 = _transfer_rate(region1, region2, r1, r2, config.c1, c)
        x21 = _transfer_rate(region2, region1, r2, r1, config.c2, c)
    else:
        x12 = x21 = 0.0

    raw1 = r1 + x21 - x12
    raw2 = r2 + x12 - x21
    db1 = _clip(region1, raw1)
    db2 = _clip(region2, raw2)

    rates = RateBundle(
        db1=db1,
        db2=db2,
        xfer_1to2=x12,
        xfer_2to1=x21,
        loss1=pos(db1 - raw1),
        loss2=pos(db2 - raw2),
        over1=pos(raw1 - db1),
        over2=pos(raw2 - db2),
    )
    _check_consistency(rates, region1, region2, r1, r2, c)
    return rates


def _check_consistency(
    rates: RateBundle, region1: RegionLabel, region2: RegionLabel, r1: float, r2: float, c: float
):
    for agent, region, r, loss, over in (
        (1, region1, r1, rates.loss1, rates.over1),
        (2, region2, r2, rates.loss2, rates.over2),
    ):
        if loss > RATE_TOLERANCE and not _in_deficit(region, r):
            raise RateConsistencyError(f"agent {agent} loses load at {loss:g} outside a deficit ({region.name}, r={r:g})")
        if over > RATE_TOLERANCE and region != RegionLabel.FULL:
            raise RateConsistencyError(f"agent {agent} overflows at {over:g} from a {region.name} battery")
        scale = 1.0 + abs(r) + rates.xfer_1to2 + rates.xfer_2to1
        if abs(rates.balance(agent, r)) > RATE_TOLERANCE * scale:
            raise RateConsistencyError(f"agent {agent} balance residual {rates.balance(agent, r):g}")
    if max(rates.xfer_1to2, rates.xfer_2to1) > c + RATE_TOLERANCE:
        raise RateConsistencyError(f"transfer above capacity c={c:g}: {rates}")


def table_derivatives(
    region1: RegionLabel,
    region2: RegionLabel,
    r1: float,
    r2: float,
    config: SharingConfig,
    c: float,
) -> Tuple[float, float]:
    """Battery derivatives from the closed-form cell of each region pair.

    Kept as a reference for `instantaneous_rates`. The two differ only in
    (FULL, EMPTY) when the full agent discharges and the empty one has no
    deficit, and in (FULL, FULL) with one surplus and one deficit, where
    the literal formulas are not consistent with the sharing rules.
    """
    c1, c2 = config.c1, config.c2
    m1 = min(c1, neg(r2))
    m2 = min(c2, neg(r1))

    match (region1, region2):
        case (RegionLabel.EMPTY, RegionLabel.EMPTY):
            return pos(r1 - m1), pos(r2 - m2)
        case (RegionLabel.EMPTY, RegionLabel.INTERIOR):
            return max(0.0, r1), r2 - m2
        case (RegionLabel.EMPTY, RegionLabel.FULL):
            db1 = pos(r1 + min(c, pos(r2))) if r2 >= m2 else 0.0
            db2 = (r2 - m2) if r2 < m2 else 0.0
            return db1, db2
        case (RegionLabel.INTERIOR, RegionLabel.EMPTY):
            return r1 - m1, max(0.0, r2)
        case (RegionLabel.INTERIOR, RegionLabel.INTERIOR):
            return r1, r2
        case (RegionLabel.INTERIOR, RegionLabel.FULL):
            return r1 + min(c, pos(r2)), min(0.0, r2)
        case (RegionLabel.FULL, RegionLabel.EMPTY):
            db1 = (r1 - m1) if r1 < m1 else 0.0
            db2 = pos(r2 + min(c, pos(r1))) if r1 >= m1 else 0.0
            return db1, db2
        case (RegionLabel.FULL, RegionLabel.INTERIOR):
            return min(0.0, r1), r2 + min(c, pos(r1))
        case (RegionLabel.FULL, RegionLabel.FULL):
            return min(0.0, r1), min(0.0, r2)
    raise ValueError(f"unknown regions ({region1}, {region2})")


def resolve_regions(
    b1: float,
    b2: float,
    B1: float,
    B2: float,
    r1: float,
    r2: float,
    config: SharingConfig,
    c: float,
    *,
    sharing: bool = True,
) -> Tuple[RegionLabel, RegionLabel, RateBundle]:
    """Region labels and rates after applying boundary stickiness.

    A battery at a boundary keeps its boundary label while its derivative
    points outward (or is zero) and is re-labelled intermediate as soon as
    it points inward. Each battery can leave its boundary at most once, so
    the iteration reaches a fixed point in at most three evaluations.
    """
    regions = [region_of(b1, B1), region_of(b2, B2)]
    rates = instantaneous_rates(regions[0], regions[1], r1, r2, config, c, sharing=sharing)
    for _ in range(2):
        changed = False
        for index, db in enumerate((rates.db1, rates.db2)):
            region = regions[index]
            if (region == RegionLabel.EMPTY and db > 0.0) or (region == RegionLabel.FULL and db < 0.0):
                regions[index] = RegionLabel.INTERIOR
                changed = True
        if not changed:
            break
        rates = instantaneous_rates(regions[0], regions[1], r1, r2, config, c, sharing=sharing)
    return regions[0], regions[1], rates
