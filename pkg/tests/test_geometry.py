import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_ball, random_sphere
from polypotential.errors import DegenerateError, DomainError
from polypotential.geometry import (
    as_point,
    bracket,
    det,
    householder_to,
    min_stretch,
    mobius,
    mobius_jacobian_abs,
    operator_norm,
    qc_dilatation,
    singular_values,
)

def ball_points(n=3):
    # every coordinate below 0.95/sqrt(n) keeps |x| <= 0.95 in any dimension
    bound = 0.95 / np.sqrt(n)
    return arrays(float, (n,), elements=st.floats(-bound, bound, allow_nan=False))


def test_as_point_rejects_low_dimension_and_nan():
    with pytest.raises(DomainError):
        as_point([0.1, 0.2])
    with pytest.raises(DomainError):
        as_point([0.1, np.nan, 0.0])
    with pytest.raises(DomainError):
        as_point(0.3)


def test_bracket_at_origin_is_one(rng):
    y = random_ball(rng, 4, 10)
    np.testing.assert_allclose(bracket(np.zeros(4), y), 1.0, rtol=0, atol=1e-15)


def test_bracket_on_sphere_is_distance(rng):
    x = random_ball(rng, 3, 50)
    z = random_sphere(rng, 3, 50)
    np.testing.assert_allclose(bracket(x, z), np.linalg.norm(x - z, axis=1), rtol=1e-12)


@given(ball_points(), ball_points())
def test_bracket_symmetric(x, y):
    assert bracket(x, y) == pytest.approx(bracket(y, x), rel=1e-14, abs=1e-15)


def test_bracket_symmetry_100_pairs(rng):
    x, y = random_ball(rng, 5, 100), random_ball(rng, 5, 100)
    np.testing.assert_allclose(bracket(x, y), bracket(y, x), rtol=1e-14)


def test_mobius_swaps_zero_and_center(rng):
    for x in random_ball(rng, 3, 10):
        np.testing.assert_allclose(mobius(x, np.zeros(3)), x, atol=1e-15)
        np.testing.assert_allclose(mobius(x, x), 0.0, atol=1e-15)


@given(ball_points(), ball_points())
def test_mobius_is_involution(x, y):
    np.testing.assert_allclose(mobius(x, mobius(x, y)), y, atol=1e-12)


@given(ball_points(4), ball_points(4))
def test_mobius_modulus_identity(x, y):
    lhs = np.linalg.norm(mobius(x, y))
    assert lhs == pytest.approx(np.linalg.norm(x - y) / bracket(x, y), rel=1e-12, abs=1e-14)


@given(ball_points(), ball_points())
def test_one_minus_modulus_squared(x, z):
    y = mobius(x, z)
    lhs = 1.0 - y @ y
    rhs = (1.0 - x @ x) * (1.0 - z @ z) / bracket(x, z) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-11)


def test_mobius_rejects_boundary_center():
    with pytest.raises(DomainError):
        mobius(np.array([1.0, 0, 0]), np.zeros(3))


def test_mobius_degenerate_pair():
    e = np.array([1.0 - 1e-16, 0.0, 0.0])
    with pytest.raises(DegenerateError):
        mobius(e, np.array([1.0, 0, 0]))


def test_mobius_jacobian_at_origin(rng):
    np.testing.assert_allclose(mobius_jacobian_abs(np.zeros(3), random_ball(rng, 3, 20)), 1.0)


def _fd_jacobian(fn, y, h=1e-5):
    cols = []
    for i in range(len(y)):
        e = np.zeros(len(y))
        e[i] = h
        cols.append((fn(y + e) - fn(y - e)) / (2 * h))
    return np.stack(cols, axis=1)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_mobius_jacobian_matches_differences(rng, n):
    for x, y in zip(random_ball(rng, n, 10, 0.8), random_ball(rng, n, 10, 0.8)):
        J = abs(np.linalg.det(_fd_jacobian(lambda z: mobius(x, z), y)))
        assert mobius_jacobian_abs(x, y) == pytest.approx(J, rel=1e-5)


def test_householder_maps_e1(rng):
    for a in random_sphere(rng, 5, 10):
        H = householder_to(a)
        np.testing.assert_allclose(H @ np.eye(5)[0], a, atol=1e-14)
        np.testing.assert_allclose(H @ H.T, np.eye(5), atol=1e-14)
        np.testing.assert_allclose(H, H.T)


def test_matrix_norms_identity():
    I = np.eye(3)
    assert operator_norm(I) == 1.0
    assert min_stretch(I) == 1.0
    assert det(I) == 1.0


def test_matrix_norms_diagonal():
    A = np.diag([2.0, 1.0, 1.0])
    assert operator_norm(A) == pytest.approx(2.0)
    assert min_stretch(A) == pytest.approx(1.0)
    assert det(A) == pytest.approx(2.0)


@given(arrays(float, (4, 4), elements=st.floats(-3, 3, allow_nan=False)))
def test_singular_values_match_lapack(A):
    ref = np.linalg.svd(A, compute_uv=False)
    np.testing.assert_allclose(singular_values(A), ref, atol=1e-10 * max(1.0, ref[0]))


def test_norm_ordering(rng):
    for _ in range(20):
        A = rng.standard_normal((4, 4))
        d = abs(det(A)) ** 0.25
        assert min_stretch(A) <= d * (1 + 1e-12)
        assert d <= operator_norm(A) * (1 + 1e-12)


def test_dilatation_orthogonal_and_conformal(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    assert qc_dilatation(Q) == pytest.approx(1.0, abs=1e-12)
    assert qc_dilatation(2.5 * np.eye(4)) == pytest.approx(1.0, abs=1e-12)


def test_dilatation_diagonal():
    assert qc_dilatation(np.diag([2.0, 1.0, 1.0])) == pytest.approx(4.0)


def test_dilatation_rejects_orientation_reversal():
    with pytest.raises(DegenerateError):
        qc_dilatation(np.diag([-1.0, 1.0, 1.0]))
