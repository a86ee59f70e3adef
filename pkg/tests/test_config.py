import json

import numpy as np
import pytest

from conftest import random_hermitian, random_state
from openfuture.config import dump_scenario, load_scenario
from openfuture.errors import ConfigParseError, ScenarioValidationError
from openfuture.universe import real_experiences


def minimal(**overrides):
    doc = {
        "name": "idle",
        "dims": [2],
        "observer_dims": [2],
        "initial": [[1, 0], [0, 0]],
        "dynamics": {"hamiltonian": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]},
        "basis": {"labels": ["up", "down"]},
    }
    doc.update(overrides)
    return doc


def test_minimal_config():
    sc = load_scenario(json.dumps(minimal()))
    assert sc.name == "idle"
    assert real_experiences(sc.branches_at(3.0)) == ["up"]


def test_step_dynamics_config():
    doc = minimal(dims=[2, 2], initial=[[1, 0]] + [[0, 0]] * 3,
                  dynamics={"dt": 0.5, "steps": [{"unitary": [[0, 1], [1, 0]], "targets": [0]}]})
    sc = load_scenario(json.dumps(doc))
    assert real_experiences(sc.branches_at(0.5)) == ["down"]
    assert sc.t_max == 0.5


def test_non_hermitian():
    doc = minimal(dynamics={"hamiltonian": [[0, 1], [0, 0]]})
    with pytest.raises(ScenarioValidationError, match="hermiticity") as info:
        load_scenario(json.dumps(doc))
    assert info.value.invariant == "hermiticity"


def test_unnormalized_initial():
    with pytest.raises(ScenarioValidationError, match="normalization"):
        load_scenario(json.dumps(minimal(initial=[[0.5, 0], [0, 0]])))


def test_non_unitary_step():
    doc = minimal(dynamics={"dt": 1, "steps": [{"unitary": [[1, 1], [0, 1]], "targets": [0]}]})
    with pytest.raises(ScenarioValidationError, match="unitarity"):
        load_scenario(json.dumps(doc))


@pytest.mark.parametrize("doc,invariant", [
    (minimal(basis={"labels": ["a", "a"]}), "labels"),
    (minimal(basis={"labels": ["a"]}), "dimension"),
    (minimal(basis={"labels": ["a", "b"], "vectors": [[1, 0], [1, 0]]}), "orthonormality"),
    (minimal(observer_dims=[3]), "dimension"),
    (minimal(initial=[[1, 0]]), "dimension"),
    (minimal(dynamics={}), "schema"),
    (minimal(dynamics={"dt": 0, "steps": []}), "dynamics"),
    (minimal(dynamics={"dt": 1, "steps": [{"unitary": [[1]], "targets": [4]}]}), "targets"),
    ({"dims": [2]}, "schema"),
    (minimal(initial=[["a", 0], [0, 0]]), "schema"),
])
def test_validation_names_invariant(doc, invariant):
    with pytest.raises(ScenarioValidationError) as info:
        load_scenario(json.dumps(doc))
    assert info.value.invariant == invariant
    assert invariant in str(info.value)


def test_parse_error_position():
    with pytest.raises(ConfigParseError) as info:
        load_scenario('{\n  "name": "x",\n  "dims": [2,,]\n}')
    assert (info.value.line, info.value.column) == (3, 14)


def test_nan_rejected():
    with pytest.raises(ConfigParseError, match="NaN") as info:
        load_scenario('{"name": "x",\n "initial": [[NaN, 0]]}')
    assert (info.value.line, info.value.column) == (2, 15)


def test_round_trip(rng):
    H = random_hermitian(rng, 6)
    psi = random_state(rng, 6)
    doc = minimal(dims=[3, 2], observer_dims=[3], initial=[[z.real, z.imag] for z in psi],
                  dynamics={"hamiltonian": [[[z.real, z.imag] for z in row] for row in H]},
                  basis={"labels": ["a", "b", "c"]})
    sc = load_scenario(json.dumps(doc))
    again = load_scenario(dump_scenario(sc))
    assert again.dims == sc.dims
    assert np.array_equal(again.hamiltonian.matrix, sc.hamiltonian.matrix)
    assert again.state_at(1.3).allclose(sc.state_at(1.3), atol=0)
