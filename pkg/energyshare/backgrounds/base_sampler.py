#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from abc import ABC, abstractmethod
from dataclasses import dataclass


@dataclass(frozen=True)
class Slot:
    """A stretch of time over which the net generation pair is constant."""

    index: int
    duration: float
    r1: float
    r2: float


class BaseSampler(ABC):
    """Produces the background sample path as a sequence of slots.

    Two samplers created from the same background and started with the
    same seed produce identical paths, which is what couples the systems
    compared by the analysis layer.
    """

    @abstractmethod
    def start(self, seed: int, initial_index: int = 0):
        pass

    @abstractmethod
    def next_slot(self) -> Slot:
        pass
