"""Points of the unit ball, Moebius automorphisms and linear distortion.

All point arguments are array-like with the coordinate axis last, so the
functions broadcast over leading axes. The bracket is evaluated through the
smooth closed form ``sqrt(|x|^2 |y|^2 - 2<x, y> + 1)``, which stays defined
when either point is the origin.
"""

import numpy as np

from .errors import DegenerateError, DomainError

DEGENERACY_TOL = 1e-12


def as_point(x, name="x"):
    """Return ``x`` as a float array of points in R^n with n >= 3."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        raise DomainError(f"{name} must be a vector, got a scalar")
    if arr.shape[-1] < 3:
        raise DomainError(f"{name} must live in R^n with n >= 3, got n={arr.shape[-1]}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr


def _pair(x, y):
    x = as_point(x, "x")
    y = as_point(y, "y")
    if x.shape[-1] != y.shape[-1]:
        raise DomainError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    return x, y


def norm(x):
    return np.sqrt(np.sum(np.square(x), axis=-1))


def bracket(x, y):
    """The bracket ``[x, y]`` of two points of the closed unit ball.

    Symmetric in its arguments, equal to 1 when either point is 0 and equal
    to ``|x - y|`` when ``|y| = 1``.
    """
    x, y = _pair(x, y)
    xx = np.sum(x * x, axis=-1)
    yy = np.sum(y * y, axis=-1)
    xy = np.sum(x * y, axis=-1)
    return np.sqrt(np.maximum(xx * yy - 2.0 * xy + 1.0, 0.0))


def _check_center(x):
    r = norm(x)
    if np.any(r >= 1.0):
        raise DomainError("Moebius center must satisfy |x| < 1")
    return r


def mobius(x, y):
    """The ball automorphism ``phi_x`` applied to ``y``.

    ``phi_x`` swaps 0 and ``x`` and is an involution.

    Raises
    ------
    DomainError
        If ``|x| >= 1``.
    DegenerateError
        If ``[x, y]`` falls below 1e-12 (both points at one boundary point).
    """
    x, y = _pair(x, y)
    rx = _check_center(x)
    b = bracket(x, y)
    if np.any(b < DEGENERACY_TOL):
        raise DegenerateError("[x, y] vanishes: x and y collapse onto a boundary point")
    dxy = np.sum((x - y) ** 2, axis=-1)
    num = dxy[..., None] * x - (1.0 - rx**2)[..., None] * (y - x)
    return num / (b**2)[..., None]


def mobius_jacobian_abs(x, y):
    """``|det D phi_x(y)| = (1 - |x|^2)^n / [x, y]^(2n)``."""
    x, y = _pair(x, y)
    rx = _check_center(x)
    n = x.shape[-1]
    return (1.0 - rx**2) ** n / bracket(x, y) ** (2 * n)


def householder_to(axis):
    """Symmetric orthogonal matrix sending e_1 to the unit vector ``axis``."""
    a = np.asarray(axis, dtype=float)
    n = a.shape[-1]
    e1 = np.zeros(n)
    e1[0] = 1.0
    v = e1 - a
    vv = float(v @ v)
    if vv < 1e-30:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(v, v) / vv


# -- linear distortion -------------------------------------------------------


def singular_values(A, tol=1e-15, max_sweeps=60):
    """Singular values of a square matrix, in decreasing order.

    One-sided Jacobi: plane rotations orthogonalise the columns of ``A``; the
    column norms of the result are the singular values. Sweeps visit column
    pairs in a fixed order, so the output is deterministic.
    """
    U = np.array(A, dtype=float, copy=True)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DomainError("expected a square matrix")
    if not np.all(np.isfinite(U)):
        raise DomainError("matrix has non-finite entries")
    n = U.shape[1]
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = U[:, p] @ U[:, p]
                beta = U[:, q] @ U[:, q]
                gamma = U[:, p] @ U[:, q]
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                # a tiny gamma can overflow zeta to inf, giving t = 0 (no rotation)
                with np.errstate(over="ignore"):
                    zeta = (beta - alpha) / (2.0 * gamma)
                    t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                up = U[:, p].copy()
                U[:, p] = c * up - s * U[:, q]
                U[:, q] = s * up + c * U[:, q]
        if not rotated:
            break
    return np.sort(np.sqrt(np.sum(U * U, axis=0)))[::-1]


def operator_norm(A):
    """``|A| = max |A theta|`` over unit vectors: the largest singular value."""
    return float(singular_values(A)[0])


def min_stretch(A):
    """``l(A) = min |A theta|`` over unit vectors: the smallest singular value."""
    return float(singular_values(A)[-1])


def det(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("expected a square matrix")
    return float(np.linalg.det(A))


def qc_dilatation(A):
    """Smallest ``K >= 1`` with ``|A|^n / K <= det A <= K l(A)^n``.

    Raises
    ------
    DegenerateError
        If ``det A <= 0`` (orientation reversing or singular).
    """
    A = np.asarray(A, dtype=float)
    J = det(A)
    if J <= 0.0:
        raise DegenerateError(f"det A = {J:.3g} <= 0: not sense preserving")
    n = A.shape[0]
    sv = singular_values(A)
    # J = prod(sv) exactly in exact arithmetic; use it so K >= 1 holds to rounding
    J = float(np.prod(sv))
    return max(1.0, sv[0] ** n / J, J / sv[-1] ** n)
