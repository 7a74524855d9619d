#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from pathlib import Path
from typing import Any, List, Mapping, Optional, Sequence, Tuple, Union

from energyshare.analysis.pareto import FrontierPoint
from energyshare.models.model import SharingConfig
from energyshare.serializers.base_serializer import ResultSerializer
from energyshare.simulator.simulator import conservation_residual
from energyshare.simulator.state import TRAJECTORY_COLUMNS, SimulationResult

FRONTIER_COLUMNS = ["flatten_coord", "c1", "c2", "llr1", "llr2", "benefit1", "benefit2", "se1", "se2"]

RESULT_COLUMNS = [
    "label",
    "c1",
    "c2",
    "llr1",
    "llr2",
    "se1",
    "se2",
    "lost1",
    "lost2",
    "served1",
    "served2",
    "over1",
    "over2",
    "xfer_1to2",
    "xfer_2to1",
    "conservation_residual",
]


class FrontierSerializer(ResultSerializer):
    @property
    def columns(self) -> List[str]:
        return FRONTIER_COLUMNS

    def rows(self, data: Sequence[FrontierPoint]) -> List[Mapping[str, Any]]:
        return [
            {
                "flatten_coord": p.flatten_coord,
                "c1": p.config.c1,
                "c2": p.config.c2,
                "llr1": p.llr1,
                "llr2": p.llr2,
                "benefit1": p.benefit1,
                "benefit2": p.benefit2,
                "se1": p.se1,
                "se2": p.se2,
            }
            for p in data
        ]


class SimulationSerializer(ResultSerializer):
    """One row per run, labelled (e.g. "shared" or "standalone")."""

    @property
    def columns(self) -> List[str]:
        return RESULT_COLUMNS

    def rows(self, data: Sequence[Tuple[str, SharingConfig, SimulationResult]]) -> List[Mapping[str, Any]]:
        rows = []
        for label, config, result in data:
            acc = result.accumulators
            rows.append(
                {
                    "label": label,
                    "c1": config.c1,
                    "c2": config.c2,
                    "llr1": result.llr1,
                    "llr2": result.llr2,
                    "se1": result.se1,
                    "se2": result.se2,
                    "lost1": acc.lost1,
                    "lost2": acc.lost2,
                    "served1": acc.served1,
                    "served2": acc.served2,
                    "over1": acc.over1,
                    "over2": acc.over2,
                    "xfer_1to2": acc.xfer_1to2,
                    "xfer_2to1": acc.xfer_2to1,
                    "conservation_residual": conservation_residual(result),
                }
            )
        return rows


class TrajectorySerializer(ResultSerializer):
    """Event log with one row per event instant."""

    @property
    def columns(self) -> List[str]:
        return TRAJECTORY_COLUMNS

    def rows(self, data: Sequence[Mapping[str, Any]]) -> List[Mapping[str, Any]]:
        return list(data)


def write_frontier_csv(
    points: Sequence[FrontierPoint],
    path: Union[str, Path],
    provenance: Optional[Mapping[str, Any]] = None,
):
    FrontierSerializer().write(points, path, provenance)
