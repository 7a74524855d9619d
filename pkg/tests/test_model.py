#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import numpy as np
import pytest
from pydantic import ValidationError

from energyshare.models.model import (
    CTMCBackground,
    ModelSpec,
    SharingConfig,
    TraceBackground,
    c_max,
    config_is_valid,
    is_interior,
    product_chain,
    scaled,
    two_state_chain,
    validate_model,
)
from energyshare.presets import toy_model


def _ctmc_model(rate_matrix, netgen, c=1.5):
    return ModelSpec(
        background=CTMCBackground(
            states=tuple(f"s{i}" for i in range(len(netgen))),
            rate_matrix=rate_matrix,
            netgen=netgen,
        ),
        B1=10.0,
        B2=10.0,
        c=c,
    )


def test_toy_symmetric_is_valid(toy_symmetric):
    report = validate_model(toy_symmetric)
    assert report.valid
    assert report.codes == []
    for label in ("s1", "s2", "s3", "s4"):
        assert any(note.startswith(f"regeneration state {label}") for note in report.notes)


def test_row_sum_violation():
    model = _ctmc_model(((-1.0, 1.0), (1.0, -0.5)), ((2.0, -1.0), (-1.0, 2.0)))
    assert "rate_matrix row sum" in validate_model(model).codes


def test_reducible_chain():
    model = _ctmc_model(((-1.0, 1.0), (0.0, 0.0)), ((2.0, -1.0), (-1.0, 2.0)))
    report = validate_model(model)
    assert "irreducible" in report.codes
    assert "rate_matrix row sum" not in report.codes


def test_missing_regeneration_states():
    model = _ctmc_model(((-1.0, 1.0), (1.0, -1.0)), ((1.0, 1.0), (-1.0, -1.0)))
    codes = validate_model(model).codes
    assert "s1 missing" not in codes
    assert "s2 missing" not in codes
    assert "s3 missing" in codes
    assert "s4 missing" in codes


def test_netgen_shape():
    model = _ctmc_model(((-1.0, 1.0), (1.0, -1.0)), ((1.0, 1.0),))
    assert validate_model(model).codes == ["netgen shape"]


def test_ragged_rate_matrix():
    model = _ctmc_model(((0.0,), (1.0, -1.0)), ((2.0, -1.0), (-1.0, 2.0)))
    assert validate_model(model).codes == ["rate_matrix shape"]


def test_empty_rate_matrix():
    model = _ctmc_model((), ())
    assert validate_model(model).codes == ["rate_matrix shape"]


def test_trace_model_reports_regeneration_not_applicable():
    model = ModelSpec(background=TraceBackground(sample_period=1.0, series=((1.0, -1.0),)), B1=1.0, B2=1.0, c=1.0)
    report = validate_model(model)
    assert report.valid
    assert any("not applicable" in note for note in report.notes)


def test_empty_trace_is_a_violation():
    model = ModelSpec(background=TraceBackground(sample_period=1.0, series=()), B1=1.0, B2=1.0, c=1.0)
    assert "trace empty" in validate_model(model).codes


@pytest.mark.parametrize("field,value", [("B1", 0.0), ("B2", -1.0), ("c", -0.5)])
def test_field_constraints(toy_symmetric, field, value):
    data = toy_symmetric.model_dump()
    data[field] = value
    with pytest.raises(ValidationError):
        ModelSpec.model_validate(data)


def test_negative_sharing_rate_rejected():
    with pytest.raises(ValidationError):
        SharingConfig(c1=-0.1, c2=0.0)


@pytest.mark.parametrize(
    "c,surplus2,expected",
    [
        (1.5, 2.15, 1.5),
        (10.0, 2.0, 1.5),
    ],
)
def test_c_max(c, surplus2, expected):
    model = toy_model(surplus2).model_copy(update={"c": c})
    assert c_max(model, 1) == pytest.approx(expected)
    assert c_max(model, 2) == pytest.approx(expected)


def test_c_max_without_deficit_is_zero():
    model = _ctmc_model(((-1.0, 1.0), (1.0, -1.0)), ((-1.0, 0.5), (1.0, 0.0)))
    assert c_max(model, 1) == 0.0
    assert c_max(model, 2) == pytest.approx(1.0)


def test_config_membership(toy_symmetric):
    assert config_is_valid(toy_symmetric, SharingConfig(c1=1.5, c2=1.5))
    assert not config_is_valid(toy_symmetric, SharingConfig(c1=1.6, c2=0.0))
    assert is_interior(toy_symmetric, SharingConfig(c1=0.0, c2=0.0))
    assert not is_interior(toy_symmetric, SharingConfig(c1=1.5, c2=0.0))
    assert not is_interior(toy_symmetric, SharingConfig(c1=0.3, c2=1.5))


def test_product_chain():
    chain1 = two_state_chain(1.0, 2.0, 2.0, -1.5)
    chain2 = two_state_chain(3.0, 0.5, 2.5, -1.0)
    joint = product_chain(chain1, chain2)
    q = joint.rates()
    assert q.shape == (4, 4)
    assert np.allclose(q.sum(axis=1), 0.0)
    assert joint.states == ("on|on", "on|off", "off|on", "off|off")
    assert joint.netgen == ((2.0, 2.5), (2.0, -1.0), (-1.5, 2.5), (-1.5, -1.0))
    # on|on -> off|on is agent 1 switching off.
    assert q[0, 2] == pytest.approx(2.0)
    assert q[0, 3] == 0.0


def test_product_of_irreducible_chains_is_irreducible(toy_symmetric):
    assert "irreducible" not in validate_model(toy_symmetric).codes


def test_scaled_model(toy_symmetric):
    model = scaled(toy_symmetric, 2.0)
    assert model.B1 == 20.0
    assert model.c == 3.0
    assert model.background.netgen[0] == (4.0, 4.0)
    assert c_max(model, 1) == pytest.approx(2 * c_max(toy_symmetric, 1))


def test_json_round_trip(toy_symmetric):
    assert ModelSpec.model_validate_json(toy_symmetric.model_dump_json()) == toy_symmetric


def test_validate_model_is_deterministic(toy_symmetric):
    assert validate_model(toy_symmetric) == validate_model(toy_symmetric)
