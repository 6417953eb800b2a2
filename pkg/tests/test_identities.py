import csv
import io
import json

import numpy as np
import pytest

from polypotential.identities import (
    singular_integral_rows,
    moment_by_quadrature,
    moment_rows,
    random_ball_points,
    random_singular_triples,
    run_identities,
)
from polypotential.kernels import KernelContext
from polypotential.quadrature import Budget


def test_default_run_n3_passes():
    rep = run_identities([3])
    assert rep.passed, [r for r in rep.failures]
    names = {r.identity for r in rep.rows}
    assert names == {"green_mass", "weighted_mass_I1", "moment_series", "moment_quadrature", "sphere_singular_integral"}


def test_reduced_budget_n5_relaxed():
    rep = run_identities([5], samples=5, budget=Budget(sphere_level=12, radial=24), tol=5e-3)
    assert rep.passed, rep.failures


def test_too_small_budget_fails():
    rep = run_identities([3], samples=5, budget=Budget(sphere_level=2, radial=2), tol=1e-6)
    assert not rep.passed


def test_moment_quadrature_independent():
    ctx = KernelContext(3)
    for s in (0.0, 0.3, 0.7, 0.9):
        assert moment_by_quadrature(3, s) == pytest.approx(ctx.sphere_moment(np.array([s, 0, 0])), rel=1e-10)
    assert all(r.passed for r in moment_rows(4))


def test_singular_integral_rows():
    rng = np.random.default_rng(0)
    rows = singular_integral_rows(random_singular_triples(20, rng))
    assert len(rows) == 20
    assert max(r.rel_err for r in rows) <= 1e-8


def test_points_in_ball():
    pts = random_ball_points(4, 200, np.random.default_rng(2))
    assert pts.shape == (200, 4)
    assert np.all(np.linalg.norm(pts, axis=1) <= 0.95)


def test_serialisation_is_deterministic():
    a = run_identities([3], seed=7, samples=3)
    b = run_identities([3], seed=7, samples=3)
    assert a.to_json() == b.to_json()
    assert a.to_csv() == b.to_csv()
    doc = json.loads(a.to_json())
    assert doc["schema_version"] == 1 and doc["meta"]["seed"] == 7
    rows = list(csv.DictReader(io.StringIO(a.to_csv())))
    assert {"closed_form", "numeric", "rel_err", "passed"} <= set(rows[0])
    assert run_identities([3], seed=8, samples=3).to_json() != a.to_json()
