#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from energyshare.backgrounds.base_sampler import BaseSampler
from energyshare.backgrounds.ctmc_sampler import CTMCSampler
from energyshare.backgrounds.trace_sampler import TraceSampler
from energyshare.models.model import CTMCBackground, ModelSpec, TraceBackground


def create_sampler(model: ModelSpec, seed: int, initial_index: int = 0) -> BaseSampler:
    match model.background:
        case CTMCBackground() as bg:
            sampler = CTMCSampler(bg)
        case TraceBackground() as bg:
            sampler = TraceSampler(bg)
    sampler.start(seed, initial_index)
    return sampler
