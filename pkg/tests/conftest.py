#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import numpy as np
import pytest

from energyshare.models.model import CTMCBackground, ModelSpec, SharingConfig, c_max
from energyshare.presets import toy_model


def make_random_model(rng: np.random.Generator, max_states: int = 6) -> ModelSpec:
    """Irreducible CTMC model where both agents can face a deficit."""
    n = int(rng.integers(2, max_states + 1))
    q = rng.uniform(0.2, 2.0, size=(n, n))
    np.fill_diagonal(q, 0.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    netgen = rng.uniform(-2.0, 2.0, size=(n, 2))
    netgen[0] = (rng.uniform(0.5, 2.0), -rng.uniform(0.5, 2.0))
    netgen[1] = (-rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0))
    return ModelSpec(
        background=CTMCBackground(
            states=tuple(f"s{i}" for i in range(n)),
            rate_matrix=tuple(tuple(float(x) for x in row) for row in q),
            netgen=tuple((float(a), float(b)) for a, b in netgen),
        ),
        B1=float(rng.uniform(0.5, 5.0)),
        B2=float(rng.uniform(0.5, 5.0)),
        c=float(rng.uniform(0.5, 3.0)),
    )


def make_random_config(rng: np.random.Generator, model: ModelSpec, interior: bool = True) -> SharingConfig:
    c1max, c2max = c_max(model, 1), c_max(model, 2)
    scale = 0.9 if interior else 1.0
    return SharingConfig(c1=float(rng.uniform(0, scale * c1max)), c2=float(rng.uniform(0, scale * c2max)))


@pytest.fixture
def toy_symmetric() -> ModelSpec:
    return toy_model(2.0)


@pytest.fixture
def random_model():
    return make_random_model


@pytest.fixture
def random_config():
    return make_random_config
