"""Numerical checks of the Schwarz, Heinz and gradient inequalities.

Each check evaluates both sides at sample points and records one
:class:`~polypotential.reports.Entry` per statement. The tolerance of an
entry is the numerical error bar of its left-hand side, so a reported
violation is one that survives the quadrature uncertainty.
"""

import math

import numpy as np

from .. import specfun
from .._parallel import pmap
from ..errors import DomainError, HypothesisNotMet
from ..geometry import as_point, norm
from ..kernels import KernelContext
from ..quadrature import Budget, Estimate, composite_gauss, graded_edges, mobius_rule
from ..reports import BoundsReport
from ..solver import get_solver, potential_factor
from .constants import c0, delta_n

ABS_TOL = 1e-12


def _evaluate(solution, x):
    out = solution(x)
    if isinstance(out, Estimate):
        return np.atleast_1d(np.asarray(out.value, dtype=float)), float(out.error)
    return np.atleast_1d(np.asarray(out, dtype=float)), 0.0


def _points(samples, n):
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[1] != n:
        raise DomainError(f"samples must be points of R^{n}")
    return samples


def potential_sum(spec, t):
    """``sum_k (||phi_k|| / 2n) c^(k-1) (1 - t)``, the bound for the Green part."""
    n = spec.n
    c = potential_factor(n)
    return sum(v / (2.0 * n) * c ** (k - 1) for k, v in enumerate(spec.norms(), start=1)) * (1.0 - t)


# -- Schwarz-type bound -----------------------------------------------------------------


def schwarz_bound_check(spec, samples, solution=None, budget=None):
    """``|f(x) - (1-|x|^2)(1+|x|^2)^(-n/2) P[phi_0](0)| <= ||P[phi_0]|| U(|x|N) + sum_k ...``.

    ``||P[phi_0]||`` is the sup of ``|phi_0|`` over the sphere, which every
    preset knows exactly (for continuous data it equals the sup of the
    Poisson integral; for the hemisphere sign it is approached at the
    boundary). Samples may lie on the sphere.
    """
    n = spec.n
    solver = get_solver(spec, budget)
    solution = solution or solver.solve
    samples = _points(samples, n)
    ctx = KernelContext(n)
    p0 = solver.poisson_extend(spec.phis[0], np.zeros(n))
    sup_p = spec.phis[0].sup_norm("sphere")

    def one(x):
        t = min(1.0, float(x @ x))
        fx, ferr = _evaluate(solution, x)
        scale = (1.0 - t) / (1.0 + t) ** (n / 2.0)
        lhs = float(np.linalg.norm(fx - scale * p0.value))
        r = math.sqrt(t)
        U = 1.0 if r >= 1.0 else ctx.harmonic_measure_U(r)
        rhs = sup_p * U + potential_sum(spec, t)
        return lhs, rhs, ferr + scale * p0.error + ABS_TOL

    report = BoundsReport("schwarz bound", meta={"n": n, "m": spec.m, "norm_P_phi0": sup_p})
    for x, (lhs, rhs, tol) in zip(samples, pmap(one, samples)):
        report.add("schwarz", lhs, rhs, tol, "le", tuple(x))
    return report


# -- Heinz liminf bound -----------------------------------------------------------------


def heinz_rhs(spec):
    """``L(n) - sum_k (||phi_k|| / n) c^(k-1) (1 + 2^(-n/2))``."""
    n = spec.n
    c = potential_factor(n)
    corr = sum(v / n * c ** (k - 1) for k, v in enumerate(spec.norms(), start=1))
    return specfun.heinz_constant(n) - corr * (1.0 + 2.0 ** (-n / 2.0))


def heinz_liminf_check(spec, zeta, radii=(0.99, 0.999), solution=None, budget=None, tol=1e-2):
    """Boundary difference quotients ``|f(zeta) - f(r zeta)| / (1 - r)`` against the Heinz bound.

    Raises
    ------
    HypothesisNotMet
        If ``|f(zeta)|`` is not within ``tol`` of 1 or ``f(0)`` is not
        within ``tol`` of 0.
    """
    n = spec.n
    zeta = as_point(zeta)
    if zeta.shape != (n,) or abs(float(norm(zeta)) - 1.0) > 1e-12:
        raise DomainError("zeta must be a point of the unit sphere")
    solver = get_solver(spec, budget)
    solution = solution or solver.solve
    f_zeta = np.atleast_1d(np.asarray(spec.phis[0](zeta[None, :]), dtype=float)[0])
    if abs(float(np.linalg.norm(f_zeta)) - 1.0) > tol:
        raise HypothesisNotMet("the boundary value |f(zeta)| is not 1")
    f0, _ = _evaluate(solution, np.zeros(n))
    if float(np.linalg.norm(f0)) > tol:
        raise HypothesisNotMet("the solution is not normalised by f(0) = 0")
    rhs = heinz_rhs(spec)
    report = BoundsReport(
        "heinz liminf", meta={"n": n, "m": spec.m, "heinz_constant": specfun.heinz_constant(n)}
    )
    for r in radii:
        if not 0.0 < r < 1.0:
            raise DomainError("radii must lie in (0, 1)")
        fr, err = _evaluate(solution, r * zeta)
        quotient = float(np.linalg.norm(f_zeta - fr)) / (1.0 - r)
        report.add("heinz", quotient, rhs, err / (1.0 - r) + ABS_TOL, "ge", tuple(r * zeta))
    return report


# -- gradient bounds ----------------------------------------------------------------------


def gradient_bounds(spec, k, corrected=False):
    """Interior and boundary bounds for ``|D G_k[phi_k]|``.

    With ``corrected=True`` the boundary constant for ``k >= 2`` is
    ``1/(n^2(n+2))`` instead of ``1/(2n^2(n+2))``; that is what the normal
    derivative of the Green function (the Poisson kernel) actually gives,
    since ``(1/omega) int P(y, e)(1 - |y|^2) dV(y) = 2/(n(n+2))``.
    """
    n = spec.n
    c = potential_factor(n)
    v = spec.norms()[k - 1]
    if k == 1:
        return n / (n + 1.0) * v, v / n
    interior = v / (2.0 * n) * c ** (k - 2) * delta_n(n)
    factor = 1.0 if corrected else 2.0
    return interior, v / (factor * n * n * (n + 2.0)) * c ** (k - 2)


def _central_jacobian(fn, x, h):
    cols = []
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = h
        cols.append((fn(x + e) - fn(x - e)) / (2.0 * h))
    return np.stack(cols, axis=-1)


def interior_derivative(fn, x, h=1e-4):
    """Richardson-extrapolated central difference Jacobian and its error estimate."""
    x = as_point(x)
    h = min(h, (1.0 - float(norm(x))) / 4.0)
    if not h > 1e-9:
        raise DomainError("point too close to the sphere for central differences")
    coarse = _central_jacobian(fn, x, h)
    fine = _central_jacobian(fn, x, h / 2.0)
    D = (4.0 * fine - coarse) / 3.0
    return D, float(np.max(np.abs(fine - coarse)))


def boundary_radial_derivative(fn, zeta, h=1e-2):
    """``d/dr fn(r zeta)`` at ``r = 1`` for ``fn`` vanishing on the sphere.

    One-sided second-order stencil ``(3 g(1) - 4 g(1 - h) + g(1 - 2h)) / (2h)``
    with ``g(1) = 0``, Richardson-combined with step ``h/2``.
    """
    zeta = as_point(zeta)

    def est(s):
        return (-4.0 * fn((1.0 - s) * zeta) + fn((1.0 - 2.0 * s) * zeta)) / (2.0 * s)

    coarse, fine = est(h), est(h / 2.0)
    return (4.0 * fine - coarse) / 3.0, float(np.max(np.abs(fine - coarse)))


def gradient_bound_check(spec, k, samples, boundary_points=(), h=1e-4, h_boundary=1e-2,
                         corrected=False, budget=None):
    """Finite-difference ``|D G_k[phi_k]|`` against the interior and boundary bounds.

    ``samples`` are interior points; ``boundary_points`` lie on the sphere,
    where the tangential derivatives vanish and ``|D|`` is the length of
    the radial derivative.
    """
    n = spec.n
    if not 1 <= k <= spec.m:
        raise DomainError(f"k must lie in 1..{spec.m}")
    solver = get_solver(spec, budget)
    interior, boundary = gradient_bounds(spec, k, corrected)

    def value(x):
        return np.atleast_1d(np.asarray(solver.green_chain(k, x).value, dtype=float))

    report = BoundsReport(
        f"gradient bound k={k}",
        meta={"n": n, "m": spec.m, "k": k, "boundary_constant": "corrected" if corrected else "as stated"},
    )
    samples = _points(samples, n)

    def one(x):
        D, err = interior_derivative(value, x, h)
        return float(np.linalg.norm(D, 2)), err

    for x, (lhs, err) in zip(samples, pmap(one, samples)):
        report.add("interior", lhs, interior, err + ABS_TOL, "le", tuple(x))
    if len(boundary_points):
        bpts = _points(boundary_points, n)

        def two(z):
            d, err = boundary_radial_derivative(value, z, h_boundary)
            return float(np.linalg.norm(d)), err

        for z, (lhs, err) in zip(bpts, pmap(two, bpts)):
            report.add("boundary", lhs, boundary, err + ABS_TOL, "le", tuple(z))
    return report


# -- I2 <= delta(n) ------------------------------------------------------------------------


def I2_value(n, x, budget=None):
    """``int |grad_x G(x, y)| (1 - |y|^2) dV(y)`` with an error bar.

    The Möbius rule centered at ``x`` absorbs the ``|x - y|^(1-n)``
    singularity of the gradient.
    """
    budget = budget or Budget()
    ctx = KernelContext(n)
    x = as_point(x)
    vals = []
    for b in (budget, budget.halved()):
        y, w = mobius_rule(n, x, b.sphere_level, b.radial, b.max_nodes)
        g = norm(ctx.grad_green(x[None, :], y))
        vals.append(float(w @ (g * (1.0 - np.sum(y * y, axis=1)))))
    return Estimate(value=vals[0], error=abs(vals[0] - vals[1]))


def _radial_integral(fn, s, q=16):
    edges = np.concatenate([[0.0], 1.0 - graded_edges(0.5, max(1.0 - s, 1e-6))[::-1]])
    r, w = composite_gauss(edges, q)
    return float(w @ np.array([fn(ri) for ri in r]))


def I3_I4(n, x):
    """The two majorants ``I_3(x)`` and ``I_4(x)`` of ``I_2(x)``."""
    x = as_point(x)
    s = float(norm(x))
    t = s * s

    def f3(r):
        return (1 - r * r) * (1 - r ** (n - 2)) * specfun.sphere_power_mean(n, n + 3, r * s)

    def f4(r):
        return (1 - r * r) ** 2 * r ** (n - 2) * specfun.sphere_power_mean(n, n + 4, r * s)

    return (1 - t) ** 2 * _radial_integral(f3, s), (1 - t) ** 2 * _radial_integral(f4, s)


def I2_bound_check(n, samples, budget=None):
    """``I_2(x) <= delta(n)`` and ``I_2(x) <= I_3(x) + I_4(x)`` at each sample."""
    if n not in (3, 4, 5):
        raise DomainError("I2_bound_check supports n = 3, 4, 5")
    samples = _points(samples, n)
    delta = delta_n(n)
    report = BoundsReport("I2 bound", meta={"n": n, "c0": c0(), "delta": delta})

    def one(x):
        est = I2_value(n, x, budget)
        i3, i4 = I3_I4(n, x)
        return est, i3 + i4

    for x, (est, total) in zip(samples, pmap(one, samples)):
        report.add("I2<=delta", est.value, delta, est.error + ABS_TOL, "le", tuple(x))
        report.add("I2<=I3+I4", est.value, total, est.error + 1e-9, "le", tuple(x))
    return report
