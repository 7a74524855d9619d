#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import numpy as np
import pytest

from energyshare.analysis.search import monotonicity_probe
from energyshare.errors import ModelError
from energyshare.models.model import SharingConfig, c_max
from energyshare.simulator.coupling import COUPLED_COLUMNS, coupled_simulate, pathwise_check


def test_identical_configs_give_identical_paths(toy_symmetric):
    config = SharingConfig(c1=0.5, c2=1.0)
    report = coupled_simulate(toy_symmetric, config, config, horizon=500.0, seed=2)
    for name in COUPLED_COLUMNS[1:]:
        assert np.array_equal(report.a[name], report.b[name])
    assert report.final_a == report.final_b
    assert pathwise_check(report).passed


def test_toy_perturbation_passes(toy_symmetric):
    report = coupled_simulate(
        toy_symmetric, SharingConfig(c1=0.5, c2=0.5), SharingConfig(c1=0.75, c2=0.5), horizon=2000.0, seed=1
    )
    pathwise = pathwise_check(report)
    assert pathwise.agent == 1
    assert pathwise.epsilon == pytest.approx(0.25)
    assert pathwise.passed, str(pathwise)
    assert report.times[0] == 0.0
    assert report.times[-1] == pytest.approx(2000.0)
    assert np.all(np.diff(report.times) >= 0.0)


def test_coupled_rejects_invalid_config(toy_symmetric):
    with pytest.raises(ModelError):
        coupled_simulate(toy_symmetric, SharingConfig(), SharingConfig(c1=1.75, c2=0.0), horizon=10.0)


def test_pathwise_inequalities_on_random_models(random_model, random_config):
    rng = np.random.default_rng(20250101)
    for _ in range(50):
        model = random_model(rng)
        config = random_config(rng, model)
        agent = int(rng.integers(1, 3))
        room = c_max(model, agent) - config.get(agent)
        epsilon = float(rng.uniform(0.0, room))
        if agent == 1:
            perturbed = SharingConfig(c1=config.c1 + epsilon, c2=config.c2)
        else:
            perturbed = SharingConfig(c1=config.c1, c2=config.c2 + epsilon)
        report = coupled_simulate(model, config, perturbed, horizon=200.0, seed=int(rng.integers(1 << 30)))
        pathwise = pathwise_check(report, agent=agent)
        assert pathwise.passed, f"{model}\n{config} -> {perturbed}\n{pathwise}"


def test_monotonicity_signs_on_random_models(random_model, random_config):
    rng = np.random.default_rng(77)
    for _ in range(5):
        model = random_model(rng)
        for _ in range(10):
            config = random_config(rng, model)
            epsilon = 0.5 * min(c_max(model, 1) - config.c1, c_max(model, 2) - config.c2)
            deltas = monotonicity_probe(model, config, epsilon, horizon=100.0, seed=int(rng.integers(1 << 30)))
            for agent in (1, 2):
                probe = deltas[agent]
                assert probe.signs_hold(tolerance=1e-9), str(probe)
                assert abs(probe.d_llr(agent)) <= epsilon + 1e-9
                assert probe.pathwise.passed, str(probe.pathwise)


def test_monotonicity_probe_toy(toy_symmetric):
    deltas = monotonicity_probe(toy_symmetric, SharingConfig(c1=0.5, c2=0.5), 0.25, horizon=5000.0, seed=3)
    c1 = deltas[1]
    assert c1.d_llr1 > 0.0
    assert c1.d_llr2 < 0.0
    assert c1.d_sum < 0.0
    assert deltas[2].signs_hold(tolerance=1e-12)


def test_zero_epsilon_gives_zero_deltas(toy_symmetric):
    deltas = monotonicity_probe(toy_symmetric, SharingConfig(c1=0.5, c2=0.5), 0.0, horizon=500.0, seed=3)
    for agent in (1, 2):
        assert (deltas[agent].d_llr1, deltas[agent].d_llr2, deltas[agent].d_sum) == (0.0, 0.0, 0.0)


def test_monotonicity_probe_rejects_overshoot(toy_symmetric):
    with pytest.raises(ModelError):
        monotonicity_probe(toy_symmetric, SharingConfig(c1=1.4, c2=0.5), 0.25, horizon=10.0)
