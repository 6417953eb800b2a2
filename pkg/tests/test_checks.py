import numpy as np
import pytest

from conftest import random_ball, random_sphere
from polypotential import specfun
from polypotential.errors import DomainError, HypothesisNotMet
from polypotential.inequality_lab import (
    I2_bound_check,
    I2_value,
    I3_I4,
    delta_n,
    gradient_bound_check,
    gradient_bounds,
    heinz_liminf_check,
    heinz_rhs,
    schwarz_bound_check,
)
from polypotential.problem import Preset, ProblemSpec, oracle_spec


def _spec(n, *items, target_dim=1):
    phis = tuple(Preset(name, n, target_dim, params) for name, params in items)
    return ProblemSpec(n=n, m=len(phis) - 1, phis=phis, target_dim=target_dim)


def test_schwarz_zero_data(rng):
    spec = _spec(3, ("zero", {}), ("zero", {}), ("zero", {}))
    rep = schwarz_bound_check(spec, random_ball(rng, 3, 5))
    assert rep.passed
    assert all(e.lhs == 0.0 and e.rhs == 0.0 for e in rep.entries)


def test_schwarz_oracle_is_tight_at_boundary(rng):
    spec = oracle_spec(3, 2)
    pts = np.vstack([random_ball(rng, 3, 10, 0.99), random_sphere(rng, 3, 2)])
    rep = schwarz_bound_check(spec, pts)
    assert rep.passed
    # P[phi_0] = 0, so both sides are exactly (1 - |x|^2) for this family
    for e in rep.entries:
        t = np.sum(np.square(e.point))
        assert e.rhs == pytest.approx(1 - t, abs=1e-12)
        assert e.lhs == pytest.approx(1 - t, abs=1e-4)


def test_schwarz_sign_data(rng):
    spec = _spec(3, ("hemisphere_sign", {}), ("const", {"value": [1.0]}), ("zero", {}))
    rep = schwarz_bound_check(spec, random_ball(rng, 3, 10, 0.999))
    assert rep.passed, rep.violations


def identity(n):
    return Preset("coordinate", n, n, {"matrix": np.eye(n).tolist()})


def test_heinz_identity_extension():
    n = 3
    spec = ProblemSpec(n=n, m=2, phis=(identity(n), Preset("zero", n, n), Preset("zero", n, n)), target_dim=n)
    zeta = np.array([0.0, 0.6, 0.8])
    rep = heinz_liminf_check(spec, zeta)
    assert rep.passed
    for e in rep.entries:
        assert e.lhs == pytest.approx(1.0, abs=1e-6)
        assert e.rhs == pytest.approx(specfun.heinz_constant(3))


def test_heinz_sharp_for_harmonic_measure():
    spec = _spec(3, ("hemisphere_sign", {}), ("zero", {}), ("zero", {}))
    rep = heinz_liminf_check(spec, np.array([0.0, 0.0, 1.0]), radii=(0.99, 0.999))
    assert rep.passed
    L = specfun.heinz_constant(3)
    assert rep.entries[-1].lhs == pytest.approx(L, abs=5e-2)


def test_heinz_hypotheses():
    spec = _spec(3, ("const", {"value": [0.5]}), ("zero", {}), ("zero", {}))
    with pytest.raises(HypothesisNotMet):
        heinz_liminf_check(spec, np.array([0.0, 0.0, 1.0]))
    spec = _spec(3, ("const", {"value": [1.0]}), ("zero", {}), ("zero", {}))
    with pytest.raises(HypothesisNotMet):
        heinz_liminf_check(spec, np.array([0.0, 0.0, 1.0]))
    with pytest.raises(DomainError):
        heinz_liminf_check(spec, np.array([0.0, 0.0, 0.5]))


def test_heinz_rhs_affine_in_norms():
    vals = [heinz_rhs(_spec(3, ("zero", {}), ("const", {"value": [s]}), ("zero", {}))) for s in (0, 0.1, 0.2, 0.3)]
    steps = np.diff(vals)
    assert np.all(steps < 0)
    np.testing.assert_allclose(steps, steps[0], rtol=1e-12)
    assert vals[0] == specfun.heinz_constant(3)


def test_gradient_zero_data(rng):
    spec = _spec(3, ("zero", {}), ("zero", {}), ("zero", {}), ("zero", {}))
    for k in (1, 2, 3):
        rep = gradient_bound_check(spec, k, random_ball(rng, 3, 2), boundary_points=random_sphere(rng, 3, 1))
        assert rep.passed
        assert all(e.lhs == 0.0 and e.rhs == 0.0 for e in rep.entries)


def test_gradient_k1_oracle_attains_boundary_bound(rng):
    spec = oracle_spec(3, 2)
    interior, boundary = gradient_bounds(spec, 1)
    assert interior == pytest.approx(4.5)
    assert boundary == pytest.approx(2.0)
    rep = gradient_bound_check(spec, 1, random_ball(rng, 3, 4, 0.9), boundary_points=random_sphere(rng, 3, 2))
    assert rep.passed
    for e in rep.entries:
        if e.name == "boundary":
            assert e.lhs == pytest.approx(2.0, rel=1e-4)
        else:
            assert e.lhs == pytest.approx(2 * np.linalg.norm(e.point), rel=1e-4)


def test_gradient_k2_boundary_constant():
    # G[G[1]] = (n + 4 - n t)(1 - t) / (8 n^2 (n + 2)) with t = r^2, whose
    # radial derivative at r = 1 is -1/(n^2 (n + 2)): twice the stated constant
    n = 3
    spec = oracle_spec(n, 3)
    _, stated = gradient_bounds(spec, 2)
    _, corrected = gradient_bounds(spec, 2, corrected=True)
    assert corrected == pytest.approx(2 * stated)
    zeta = np.array([[0.0, 0.6, 0.8]])
    rep_stated = gradient_bound_check(spec, 2, np.empty((0, n)), boundary_points=zeta)
    rep_fixed = gradient_bound_check(spec, 2, np.empty((0, n)), boundary_points=zeta, corrected=True)
    exact = spec.norms()[1] / (n * n * (n + 2))
    assert rep_fixed.entries[0].lhs == pytest.approx(exact, rel=1e-4)
    assert rep_fixed.entries[0].lhs == pytest.approx(corrected, rel=1e-4)
    assert rep_fixed.passed
    assert not rep_stated.passed


def test_gradient_interior_k2(rng):
    spec = oracle_spec(3, 3)
    rep = gradient_bound_check(spec, 2, random_ball(rng, 3, 3, 0.9))
    assert rep.passed


def test_gradient_k_range():
    with pytest.raises(DomainError):
        gradient_bound_check(oracle_spec(3, 2), 3, np.zeros((1, 3)))


def test_I2_at_center():
    exact = 1 - 1 / 3 - 1 / 4 + 1 / 6
    est = I2_value(3, np.zeros(3))
    assert est.value == pytest.approx(exact, rel=1e-6)
    i3, i4 = I3_I4(3, np.zeros(3))
    assert i3 + i4 == pytest.approx(exact, rel=1e-10)
    assert exact <= delta_n(3)


@pytest.mark.parametrize("n", [3, 4])
def test_I2_center_any_dimension(n):
    exact = 1 - 1 / 3 - 1 / (n + 1) + 1 / (n + 3)
    assert I2_value(n, np.zeros(n)).value == pytest.approx(exact, rel=1e-6)


def test_I2_bound_sweep(rng):
    pts = np.vstack([random_ball(rng, 3, 5, 0.9), 0.999 * random_sphere(rng, 3, 2)])
    rep = I2_bound_check(3, pts)
    assert rep.passed, rep.violations
    assert rep.meta["delta"] == pytest.approx(0.8815, abs=1e-4)


def test_I2_domain():
    with pytest.raises(DomainError):
        I2_bound_check(6, np.zeros((1, 6)))
