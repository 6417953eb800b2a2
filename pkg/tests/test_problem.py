import json

import numpy as np
import pytest

from conftest import random_sphere
from polypotential.errors import DomainError, SchemaError
from polypotential.problem import Preset, ProblemSpec, oracle_spec
from polypotential.quadrature import Budget


def test_oracle_spec_roundtrip():
    spec = oracle_spec(3, 3)
    again = ProblemSpec.from_json(json.dumps(spec.to_json()))
    assert again == spec
    assert [p.name for p in spec.phis] == ["zero", "const", "const", "zero"]
    assert spec.norms() == [20.0, 120.0, 0.0]


def test_unknown_keys_rejected():
    doc = oracle_spec(3, 2).to_json()
    doc["extra"] = 1
    with pytest.raises(SchemaError):
        ProblemSpec.from_json(doc)
    doc = oracle_spec(3, 2).to_json()
    doc["phi"][0]["colour"] = "red"
    with pytest.raises(SchemaError):
        ProblemSpec.from_json(doc)


@pytest.mark.parametrize(
    "doc",
    [
        "{not json",
        {"n": 3, "m": 2},
        {"n": 2, "m": 2, "phi": []},
        {"n": 3, "m": 1, "phi": [{"preset": "zero"}, {"preset": "zero"}]},
        {"n": 3, "m": 2, "phi": [{"preset": "zero"}]},
        {"n": 3, "m": 2, "phi": [{"preset": "const"}, {"preset": "zero"}, {"preset": "zero"}]},
        {"n": 3, "m": 2, "phi": [{"preset": "coordinate", "index": 3}, {"preset": "zero"}, {"preset": "zero"}]},
        {"n": 3, "m": 2, "phi": [{"preset": "zero"}] * 3, "budget": {"radial": 0}},
        {"n": 3, "m": 2, "phi": [{"preset": "zero"}] * 3, "budget": {"grid_radial": 2}},
    ],
)
def test_malformed_specs(doc):
    with pytest.raises(SchemaError):
        ProblemSpec.from_json(doc if isinstance(doc, str) else json.dumps(doc))


def test_inconsistent_target_dims():
    doc = {"n": 3, "m": 2, "phi": [{"preset": "const", "value": [1, 2]}, {"preset": "const", "value": [1]}, {"preset": "zero"}]}
    with pytest.raises(SchemaError):
        ProblemSpec.from_json(doc)


def test_budget_from_json():
    doc = oracle_spec(3, 2).to_json()
    doc["budget"] = {"sphere_level": 12, "grid_level": 4}
    spec = ProblemSpec.from_json(doc)
    assert spec.budget == Budget(sphere_level=12, grid_level=4)


def test_preset_values(rng):
    z = random_sphere(rng, 3, 30)
    np.testing.assert_array_equal(Preset("zero", 3, 2)(z), 0.0)
    np.testing.assert_array_equal(Preset("const", 3, 1, {"value": [2.5]})(z), 2.5)
    np.testing.assert_allclose(Preset("coordinate", 3, 1, {"index": 2})(z)[:, 0], z[:, 2])
    np.testing.assert_allclose(Preset("coordinate", 3, 3, {"matrix": np.eye(3).tolist()})(z), z)
    s = Preset("hemisphere_sign", 3, 1)(z)[:, 0]
    np.testing.assert_array_equal(s, np.sign(z[:, 2]))
    p = Preset("radial_poly", 3, 1, {"coeffs": [1, -1]})(0.5 * z)[:, 0]
    np.testing.assert_allclose(p, 0.75)


def test_preset_sup_norms():
    assert Preset("const", 3, 2, {"value": [3, 4]}).sup_norm() == 5.0
    assert Preset("radial_poly", 3, 1, {"coeffs": [0, 4, -4]}).sup_norm("sphere") == 0.0
    assert Preset("radial_poly", 3, 1, {"coeffs": [0, 4, -4]}).sup_norm("ball") == pytest.approx(1.0)
    assert Preset("coordinate", 3, 3, {"matrix": np.diag([2, 1, 1]).tolist()}).sup_norm() == pytest.approx(2.0)
    assert Preset("hemisphere_sign", 3, 1).sup_norm() == 1.0
    assert Preset("hemisphere_sign", 3, 1).lipschitz() is None


def test_preset_derivative_matches_differences(rng):
    p = Preset("radial_poly", 4, 2, {"coeffs": [0.5, -1, 2], "value": [1, -3]})
    y = np.array([[0.1, 0.2, -0.3, 0.4]])
    h = 1e-6
    cols = []
    for i in range(4):
        e = np.zeros(4)
        e[i] = h
        cols.append((p(y + e) - p(y - e))[0] / (2 * h))
    np.testing.assert_allclose(p.derivative(y)[0], np.stack(cols, axis=1), rtol=1e-6)
    with pytest.raises(DomainError):
        Preset("hemisphere_sign", 4, 1).derivative(y)
