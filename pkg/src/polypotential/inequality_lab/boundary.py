"""Boundary quantities: the energy integral Lambda and the Jacobian sandwich.

For a boundary map ``phi_0`` and a point ``t = T(theta)`` of the sphere,

    Lambda(t) = int |phi_0(t) - phi_0(eta)|^2 / |eta - t|^n dsigma(eta),

and the boundary Jacobian of the solution obeys

    (M_x / M_T) (Lambda - X) <= J_f(t) <= (M_x / M_T) (Lambda + X),
    X = ||phi_1||/n + sum_(k>=2) ||phi_k|| c^(k-2) / (n^2 (n+2)),

where ``M_x`` and ``M_T`` are square roots of the Gram determinants of the
derivatives of ``phi_0 o T`` and ``T`` in the chart angles.
"""

import math

import numpy as np

from ..errors import DomainError
from ..geometry import as_point, norm
from ..problem import Preset
from ..quadrature import aligned_sphere_rule
from ..reports import BoundsReport
from ..solver import get_solver, potential_factor


def lambda_integral(phi0, t, level=32, n=None):
    """``Lambda(t)`` by a sphere rule graded toward ``t``.

    For Lipschitz ``phi_0`` the integrand is ``O(|eta - t|^(2-n))``, which
    the polar measure ``sin^(n-2)`` cancels, so panels graded toward the
    pole resolve it.

    Raises
    ------
    DomainError
        If ``phi0`` is a preset without a Lipschitz constant or ``|t| != 1``.
    """
    if isinstance(phi0, Preset):
        if phi0.lipschitz() is None:
            raise DomainError(f"preset {phi0.name!r} is not Lipschitz")
        n = phi0.n
    t = as_point(t)
    n = n or t.shape[0]
    if t.shape != (n,) or abs(float(norm(t)) - 1.0) > 1e-12:
        raise DomainError("t must be a point of the unit sphere")
    rule = aligned_sphere_rule(n, t, level, scale=1e-2)
    ft = np.asarray(phi0(t[None, :]), dtype=float)
    diff = np.asarray(phi0(rule.nodes), dtype=float) - ft
    d = norm(rule.nodes - t)
    return float(rule.weights @ (np.sum(diff.reshape(len(d), -1) ** 2, axis=1) / d**n))


def _chart(theta):
    # the spherical chart without range checks, for difference stencils
    m = len(theta)
    out = np.empty(m + 1)
    prod = 1.0
    for j in range(m):
        out[j] = prod * math.cos(theta[j])
        prod *= math.sin(theta[j])
    out[m] = prod
    return out


def _fd_columns(fn, theta, h):
    cols = []
    for j in range(len(theta)):
        e = np.zeros(len(theta))
        e[j] = h
        cols.append((np.ravel(fn(theta + e)) - np.ravel(fn(theta - e))) / (2.0 * h))
    return np.stack(cols, axis=1)


def _gram_root(D):
    return math.sqrt(max(0.0, float(np.linalg.det(D.T @ D))))


def gram_ratio(phi0, theta, h=1e-5):
    """``M_x(theta) / M_T(theta)`` from central-difference derivatives."""
    theta = np.asarray(theta, dtype=float)
    MT = _gram_root(_fd_columns(_chart, theta, h))
    if MT < 1e-8:
        raise DomainError("theta is at a degeneracy of the spherical chart")
    Mx = _gram_root(_fd_columns(lambda th: phi0(_chart(th)[None, :]), theta, h))
    return Mx / MT


def correction_term(n, phi_norms):
    """``||phi_1||/n + sum_(k>=2) ||phi_k|| c^(k-2) / (n^2(n+2))``."""
    if not phi_norms:
        return 0.0
    c = potential_factor(n)
    return phi_norms[0] / n + sum(
        v * c ** (k - 2) / (n * n * (n + 2.0)) for k, v in enumerate(phi_norms[1:], start=2)
    )


def boundary_jacobian_bounds(phi0, theta, phi_norms=(), jacobian=None, tol=1e-3, level=32):
    """The sandwich bounds for ``J_f(T(theta))``.

    Parameters
    ----------
    phi0 : Preset
        Differentiable boundary map.
    theta : sequence of float
        Chart angles, away from degeneracies.
    phi_norms : sequence of float
        ``||phi_1||, ..., ||phi_m||``.
    jacobian : float, optional
        A computed boundary Jacobian to test against the bounds.
    tol : float
        Tolerance for that test.

    Returns
    -------
    BoundsReport
        ``meta`` holds ``ratio``, ``lambda``, ``correction``, ``lower``
        and ``upper``; with ``jacobian`` given there are two entries.
    """
    n = phi0.n
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (n - 1,):
        raise DomainError(f"theta must have {n - 1} angles")
    t = _chart(theta)
    ratio = gram_ratio(phi0, theta)
    lam = lambda_integral(phi0, t, level=level)
    X = correction_term(n, list(phi_norms))
    lower, upper = ratio * (lam - X), ratio * (lam + X)
    report = BoundsReport(
        "boundary jacobian",
        meta={"n": n, "ratio": ratio, "lambda": lam, "correction": X, "lower": lower, "upper": upper},
    )
    if jacobian is not None:
        report.add("J<=upper", float(jacobian), upper, tol, "le", tuple(t))
        report.add("J>=lower", float(jacobian), lower, tol, "ge", tuple(t))
    return report


def boundary_jacobian(spec, t, gap=1e-3, h=1e-4, budget=None):
    """``J_f`` near the boundary point ``t``: the determinant of the difference
    Jacobian of the solution at ``(1 - gap) t``."""
    if spec.target_dim != spec.n:
        raise DomainError("the Jacobian needs target_dim == n")
    solver = get_solver(spec, budget)
    x = (1.0 - gap) * as_point(t)
    cols = []
    for i in range(spec.n):
        e = np.zeros(spec.n)
        e[i] = h
        cols.append((solver.solve(x + e).value - solver.solve(x - e).value) / (2.0 * h))
    return float(np.linalg.det(np.stack(cols, axis=1)))
