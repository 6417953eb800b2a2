import math

import numpy as np
import pytest

from polypotential.errors import DomainError
from polypotential.inequality_lab import boundary_jacobian, boundary_jacobian_bounds, gram_ratio, lambda_integral
from polypotential.inequality_lab.boundary import correction_term
from polypotential.problem import Preset, ProblemSpec
from polypotential.specfun import sphere_singular_integral


def _rotation(n, seed=0):
    Q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, n)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    return Q


def identity(n):
    return Preset("coordinate", n, n, {"matrix": np.eye(n).tolist()})


T3 = np.array([0.48, 0.6, 0.64])


@pytest.mark.parametrize("n", [3, 4, 5])
def test_lambda_identity(n):
    t = np.eye(n)[0]
    # |eta - t|^(2-n) averaged over the sphere, from the closed form at r = 1
    exact = sphere_singular_integral(n - 1, (n - 2) / 2, 1.0) / sphere_singular_integral(n - 1, 1e-300, 0.0)
    assert lambda_integral(identity(n), t) == pytest.approx(exact, rel=1e-6)
    assert lambda_integral(identity(n), t) == pytest.approx(1.0, rel=1e-6)


def test_lambda_constant_and_rotation():
    assert lambda_integral(Preset("const", 3, 2, {"value": [1.0, 2.0]}), T3) == 0.0
    Q = _rotation(3)
    rot = Preset("coordinate", 3, 3, {"matrix": Q.tolist()})
    assert lambda_integral(rot, T3) == pytest.approx(1.0, rel=1e-6)


def test_lambda_domain():
    with pytest.raises(DomainError):
        lambda_integral(Preset("hemisphere_sign", 3, 1), T3)
    with pytest.raises(DomainError):
        lambda_integral(identity(3), 0.5 * T3)


def test_gram_ratio():
    theta = np.array([0.7, 1.9])
    assert gram_ratio(identity(3), theta) == pytest.approx(1.0, rel=1e-8)
    Q = _rotation(3, 1)
    assert gram_ratio(Preset("coordinate", 3, 3, {"matrix": Q.tolist()}), theta) == pytest.approx(1.0, rel=1e-8)
    assert gram_ratio(Preset("coordinate", 3, 3, {"matrix": (2 * np.eye(3)).tolist()}), theta) == pytest.approx(4.0, rel=1e-8)
    with pytest.raises(DomainError):
        gram_ratio(identity(3), np.array([0.0, 1.0]))


def test_identity_bounds_pin_jacobian():
    rep = boundary_jacobian_bounds(identity(3), np.array([0.9, 2.2]), jacobian=1.0)
    assert rep.meta["lower"] == pytest.approx(1.0, abs=1e-6)
    assert rep.meta["upper"] == pytest.approx(1.0, abs=1e-6)
    assert rep.passed


def test_rotation_bounds_match_identity():
    theta = np.array([1.2, 0.4])
    Q = _rotation(3, 2)
    a = boundary_jacobian_bounds(identity(3), theta)
    b = boundary_jacobian_bounds(Preset("coordinate", 3, 3, {"matrix": Q.tolist()}), theta)
    assert b.meta["lower"] == pytest.approx(a.meta["lower"], abs=1e-6)
    assert b.meta["upper"] == pytest.approx(a.meta["upper"], abs=1e-6)


def test_constant_map_forces_zero():
    rep = boundary_jacobian_bounds(Preset("const", 3, 3, {"value": [1.0, 0, 0]}), np.array([1.0, 1.0]), jacobian=0.0)
    assert rep.meta["lower"] == 0.0 and rep.meta["upper"] == 0.0
    assert rep.passed


def test_correction_widens_bounds():
    base = boundary_jacobian_bounds(identity(3), np.array([1.0, 1.0]))
    wide = boundary_jacobian_bounds(identity(3), np.array([1.0, 1.0]), phi_norms=(0.3, 0.6))
    X = correction_term(3, [0.3, 0.6])
    assert X == pytest.approx(0.1 + 0.6 / 45)
    assert wide.meta["upper"] - base.meta["upper"] == pytest.approx(X, rel=1e-6)


def test_solver_jacobian_of_identity_extension():
    n = 3
    spec = ProblemSpec(n=n, m=2, phis=(identity(n), Preset("zero", n, n), Preset("zero", n, n)), target_dim=n)
    theta = np.array([0.9, 2.2])
    t = np.array([math.cos(0.9), math.sin(0.9) * math.cos(2.2), math.sin(0.9) * math.sin(2.2)])
    J = boundary_jacobian(spec, t)
    assert J == pytest.approx(1.0, abs=1e-3)
    assert boundary_jacobian_bounds(identity(n), theta, jacobian=J).passed
