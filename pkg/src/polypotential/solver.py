"""Polyharmonic Dirichlet problems on the unit ball.

For ``Delta^m f = phi_m`` in the ball with ``Delta^k f = phi_k`` on the
sphere (``k < m``) the solution is

    f = P[phi_0] + sum_(k=1..m) (-1)^k G_k[phi_k],

where ``G_k`` applies ``k`` Green integrations to ``P[phi_k]`` and ``G_m``
applies ``m`` of them to the source ``phi_m`` itself. With the convention
``Delta G[u] = -u`` the signs come out as written; the test
``f = 1 - |x|^2`` for ``phi_1 = -2n`` pins them.

Iterated integrals are carried on a tensor grid (a :class:`BallRule`) by
a dense discrete Green operator. Each operator row is a Möbius-substituted
Green rule centered at a grid node, followed by interpolation from the
grid. The grid is invariant under rotations in the last coordinate plane,
so only the rows of one angular slice are assembled and the rest are
obtained by cyclic shifts. The last Green integration is done at the
evaluation point itself.

Every value comes with an error bar: the difference between a fine pass
(cubic interpolation in every coordinate, full budget) and a coarse one
(linear interpolation, halved budget). The coarse pass is deliberately
the weaker one, so the bar over-covers the fine value.
"""

import json
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._parallel import pmap
from .errors import DomainError
from .geometry import as_point, norm
from .kernels import KernelContext
from .problem import Preset, ProblemSpec
from .quadrature import (
    Budget,
    Estimate,
    _local_poisson_rule,
    ball_rule,
    cartesian_to_spherical,
    green_rule,
    poisson_rule,
)
from .reports import BoundsReport

BOUNDARY_GAP = 1e-6
ROW_CACHE = 512


def potential_factor(n):
    """``(n + 4) / (4n(n + 2))``, the contraction of ``G`` against ``1 - |y|^2``."""
    return (n + 4) / (4.0 * n * (n + 2))


# -- interpolation stencils ----------------------------------------------------------


def _lagrange_stencil(nodes_1d, u, k):
    # Lagrange interpolation on k consecutive nodes, window clipped at the ends
    R = len(nodes_1d)
    k = min(k, R)
    pos = np.searchsorted(nodes_1d, u)
    start = np.clip(pos - k // 2, 0, R - k)
    idx = start[:, None] + np.arange(k)[None, :]
    nodes = nodes_1d[idx]
    coef = np.ones(idx.shape)
    for a in range(k):
        for b in range(k):
            if a != b:
                coef[:, a] *= (u - nodes[:, b]) / (nodes[:, a] - nodes[:, b])
    return idx, coef


def _periodic_stencil(L, t, k):
    # Lagrange on k uniform nodes of the periodic angle around t
    k = min(k, L)
    u = t * L / (2.0 * math.pi)
    start = np.floor(u).astype(int) - (k // 2 - 1)
    s = u - start
    coef = np.ones((len(t), k))
    for a in range(k):
        for b in range(k):
            if a != b:
                coef[:, a] *= (s - b) / (a - b)
    return (start[:, None] + np.arange(k)[None, :]) % L, coef


def _combine(idx, coef, size, idx2, coef2):
    P = idx.shape[0]
    idx = (idx[:, :, None] * size + idx2[:, None, :]).reshape(P, -1)
    coef = (coef[:, :, None] * coef2[:, None, :]).reshape(P, -1)
    return idx, coef


@dataclass(frozen=True)
class Grid:
    """The solver grid: a BallRule plus interpolation from its nodes."""

    rule: object

    @property
    def n(self):
        return self.rule.n

    @property
    def size(self):
        return len(self.rule.weights)

    @property
    def period(self):
        return len(self.rule.angles[-1])

    @property
    def directions(self):
        """Unit directions of one radial shell, in node order."""
        shell = self.size // len(self.rule.radii)
        return self.rule.nodes[:shell] / self.rule.radii[0]

    @property
    def shape(self):
        return self.rule.shape

    def _axis_stencils(self, points, fine):
        k = 4 if fine else 2
        r, theta = cartesian_to_spherical(points)
        r = np.atleast_1d(r)
        theta = np.atleast_2d(theta)
        out = [_lagrange_stencil(self.rule.radii, r, k)]
        for j, ang in enumerate(self.rule.angles[:-1]):
            out.append(_lagrange_stencil(ang, theta[:, j], k))
        out.append(_periodic_stencil(self.period, theta[:, -1], k))
        return out

    def stencil(self, points, fine=True):
        """Flat node indices and coefficients interpolating at ``points``."""
        axes = self._axis_stencils(points, fine)
        idx, coef = axes[0]
        for (i2, c2), size in zip(axes[1:], self.shape[1:]):
            idx, coef = _combine(idx, coef, size, i2, c2)
        return idx, coef

    def interpolate(self, values, points, fine=True, chunk=20_000):
        out = []
        for a in range(0, len(points), chunk):
            idx, coef = self.stencil(points[a : a + chunk], fine)
            out.append(np.einsum("pk,pkd->pd", coef, values[idx]))
        return np.concatenate(out, axis=0)

    def _split(self):
        # leading axes go into one factor, trailing axes into the other;
        # pick the cut that keeps the two factor widths smallest
        shape = self.shape
        costs = [math.prod(shape[:s]) + math.prod(shape[s:]) for s in range(1, len(shape))]
        return 1 + int(np.argmin(costs))

    def scatter(self, points, weights, fine=True, chunk=20_000):
        """The row vector ``v`` with ``v @ g = sum_j weights_j (interpolated g)(points_j)``.

        The interpolant is a tensor product of one-dimensional Lagrange
        factors, so ``v`` is ``A^T B`` with ``A`` (resp. ``B``) the row-wise
        Kronecker product of the factors of the leading (trailing) axes.
        """
        shape = self.shape
        cut = self._split()
        out = np.zeros((math.prod(shape[:cut]), math.prod(shape[cut:])))
        for a in range(0, len(points), chunk):
            axes = self._axis_stencils(points[a : a + chunk], fine)
            Q = len(axes[0][0])
            rows = np.arange(Q)[:, None]
            mats = []
            for (idx, coef), size in zip(axes, shape):
                M = np.zeros((Q, size))
                M[rows, idx] = coef
                mats.append(M)
            A = weights[a : a + chunk, None] * _row_kron(mats[:cut])
            out += A.T @ _row_kron(mats[cut:])
        return out.ravel()


def _row_kron(mats):
    out = mats[0]
    for M in mats[1:]:
        out = (out[:, :, None] * M[:, None, :]).reshape(out.shape[0], -1)
    return out


@lru_cache(maxsize=8)
def solver_grid(n, grid_level, grid_radial):
    return Grid(ball_rule(n, grid_level, grid_radial))


# -- the discrete Green operator -------------------------------------------------------


@dataclass(frozen=True)
class GreenOperator:
    """``(A g)_i ~ int G(x_i, y) g(y) dV(y)`` for grid functions ``g``.

    ``rows`` holds the rows of the first angular slice (nodes whose last
    angle is 0); row ``(i, s)`` is row ``i`` applied to ``g`` shifted by
    ``s`` steps in the periodic angle.
    """

    grid: Grid
    rows: np.ndarray

    def apply(self, g):
        g = np.asarray(g, dtype=float)
        N, L = self.grid.size, self.grid.period
        G = g.reshape(N // L, L, -1)
        out = np.empty_like(G)
        for s in range(L):
            out[:, s, :] = self.rows @ np.roll(G, -s, axis=1).reshape(N, -1)
        return out.reshape(g.shape)


@lru_cache(maxsize=8)
def green_operator(n, budget, fine=True):
    """The (cached) operator for dimension ``n`` at ``budget``.

    ``fine=False`` gives the coarse companion used for error bars.
    """
    grid = solver_grid(n, budget.grid_level_for(n), budget.grid_radial)
    rule_budget = budget if fine else budget.halved()
    N, L = grid.size, grid.period

    def row(i):
        y, w = green_rule(n, grid.rule.nodes[i * L], rule_budget.sphere_level, rule_budget.radial, budget.max_nodes)
        return grid.scatter(y, w, fine)

    rows = np.array(pmap(row, range(N // L)))
    rows.setflags(write=False)
    return GreenOperator(grid=grid, rows=rows)


def poisson_on_grid(grid, phi, level, n1, chunk=1_500_000):
    """``P[phi]`` at every grid node, one radial shell at a time.

    All nodes of a shell share the local Poisson rule of their radius; it
    is rotated to each direction by a Householder reflection.
    """
    n = grid.n
    dirs = grid.directions
    v = -dirs
    v[:, 0] += 1.0
    vv = np.sum(v * v, axis=1)
    scale = np.where(vv > 1e-30, 2.0 / np.where(vv > 1e-30, vv, 1.0), 0.0)
    out = []
    for r in grid.rule.radii:
        zeta, w = _local_poisson_rule(n, float(r), int(level))
        step = max(1, chunk // len(w))
        shell = np.empty((len(dirs), n1))
        for a in range(0, len(dirs), step):
            vb = v[a : a + step]
            proj = zeta @ vb.T
            pts = zeta[None, :, :] - (proj.T * scale[a : a + step, None])[:, :, None] * vb[:, None, :]
            vals = np.asarray(phi(pts.reshape(-1, n)), dtype=float).reshape(len(vb), len(w), n1)
            shell[a : a + step] = np.einsum("q,aqd->ad", w, vals)
        out.append(shell)
    return np.concatenate(out, axis=0)


# -- the solver ------------------------------------------------------------------------


def _as_datum(phi, n, n1):
    if isinstance(phi, Preset):
        return phi
    if callable(phi):
        return phi
    raise DomainError("boundary data must be a preset or a callable")


def _is_zero(phi):
    return isinstance(phi, Preset) and phi.is_zero


class Solver:
    """Evaluates the representation formula for one :class:`ProblemSpec`.

    Grid layers (potentials carried on the grid) are cached, so repeated
    evaluations at many points share all the expensive work.
    """

    def __init__(self, spec, budget=None):
        self.spec = spec
        self.budget = budget or spec.budget
        self.n = spec.n
        self.n1 = spec.target_dim
        self.ctx = KernelContext(spec.n)
        self._layers = {}
        self._rows = OrderedDict()
        self._lock = threading.Lock()

    # -- pieces ----------------------------------------------------------------------

    def _point(self, x, closed=False):
        x = as_point(x)
        if x.shape != (self.n,):
            raise DomainError(f"expected a single point of R^{self.n}")
        r = float(norm(x))
        if r > 1.0 + 1e-12 or (r >= 1.0 and not closed):
            raise DomainError("the evaluation point must lie in the ball")
        return x

    def poisson_extend(self, phi, x):
        """``P[phi](x)`` with an error bar from halving the sphere level."""
        x = self._point(x)
        if float(norm(x)) >= 1.0 - BOUNDARY_GAP:
            raise DomainError("P[phi] is not evaluated within 1e-6 of the sphere; use the boundary value")
        phi = _as_datum(phi, self.n, self.n1)
        if _is_zero(phi):
            return Estimate(value=np.zeros(self.n1), error=0.0)
        lvl = self.budget.sphere_level
        vals = []
        for level in (lvl, max(2, lvl // 2)):
            z, w = poisson_rule(self.n, x, level)
            vals.append(w @ np.asarray(phi(z), dtype=float).reshape(len(w), -1))
        return Estimate(value=vals[0], error=float(np.max(np.abs(vals[0] - vals[1]))))

    def _green_count(self, j):
        return j if j < self.spec.m else self.spec.m

    def _layer(self, j, count, fine):
        """Grid values of ``count - 1`` Green integrations of the base of ``phi_j``."""
        key = (j, count, fine)
        if key in self._layers:
            return self._layers[key]
        b = self.budget
        grid = solver_grid(self.n, b.grid_level_for(self.n), b.grid_radial)
        phi = self.spec.phis[j]
        if count == 1:
            if j < self.spec.m:
                level = b.sphere_level if fine else max(2, b.sphere_level // 2)
                g = poisson_on_grid(grid, phi, level, self.n1)
            else:
                g = np.asarray(phi(grid.rule.nodes), dtype=float)
        else:
            g = green_operator(self.n, b, fine).apply(self._layer(j, count - 1, fine))
        g.setflags(write=False)
        self._layers[key] = g
        return g

    def _final_rows(self, x):
        # the last Green integration at x as weight rows on the grid; every
        # layer evaluated at x shares them, so they are kept in a small LRU
        key = x.tobytes()
        with self._lock:
            if key in self._rows:
                self._rows.move_to_end(key)
                return self._rows[key]
        b = self.budget
        grid = solver_grid(self.n, b.grid_level_for(self.n), b.grid_radial)
        rows = []
        for fine, rb in ((True, b), (False, b.halved())):
            y, w = green_rule(self.n, x, rb.sphere_level, rb.radial, b.max_nodes)
            rows.append(grid.scatter(y, w, fine))
        with self._lock:
            self._rows[key] = rows
            if len(self._rows) > ROW_CACHE:
                self._rows.popitem(last=False)
        return rows

    def _potential(self, j, count, x):
        # count Green integrations applied to P[phi_j] (or to phi_m), at x
        if _is_zero(self.spec.phis[j]):
            return Estimate(value=np.zeros(self.n1), error=0.0)
        rows = self._final_rows(x)
        vals = [row @ self._layer(j, count, fine) for row, fine in zip(rows, (True, False))]
        return Estimate(value=vals[0], error=float(np.max(np.abs(vals[0] - vals[1]))))

    def potential_bound(self, k, x):
        """``(||phi_k|| / 2n) c^(k-1) (1 - |x|^2)``, the a priori size of ``G_k[phi_k](x)``."""
        norm_k = self.spec.norms()[k - 1]
        n = self.n
        t = min(1.0, float(np.sum(as_point(x) ** 2)))
        return norm_k / (2.0 * n) * potential_factor(n) ** (k - 1) * (1.0 - t)

    def green_chain(self, k, x):
        """``G_k[phi_k](x)`` as an Estimate.

        Within 1e-6 of the sphere the potential is replaced by 0 with its a
        priori bound as the error bar.
        """
        if not 1 <= k <= self.spec.m:
            raise DomainError(f"k must lie in 1..{self.spec.m}")
        x = self._point(x, closed=True)
        if float(norm(x)) >= 1.0 - BOUNDARY_GAP:
            return Estimate(value=np.zeros(self.n1), error=self.potential_bound(k, x))
        return self._potential(k, self._green_count(k), x)

    def solve(self, x):
        """``f(x) = P[phi_0](x) + sum_k (-1)^k G_k[phi_k](x)`` on the closed ball."""
        x = self._point(x, closed=True)
        if float(norm(x)) >= 1.0 - BOUNDARY_GAP:
            value = np.asarray(self.spec.phis[0](x[None, :] / norm(x)), dtype=float)[0]
            err = sum(self.potential_bound(k, x) for k in range(1, self.spec.m + 1))
            return Estimate(value=value, error=float(err))
        total = self.poisson_extend(self.spec.phis[0], x)
        value, err = np.array(total.value, dtype=float), total.error
        for k in range(1, self.spec.m + 1):
            term = self.green_chain(k, x)
            value = value + (-1) ** k * term.value
            err += term.error
        return Estimate(value=value, error=float(err))

    def laplacian_chain(self, x):
        """``Delta f(x) = P[phi_1](x) + sum_(k=1..m-1) (-1)^k G_k[phi_(k+1)](x)``.

        The chain is the representation formula for the data shifted by one
        (``phi_1, ..., phi_m`` with order ``m - 1``).
        """
        x = self._point(x)
        total = self.poisson_extend(self.spec.phis[1], x)
        value, err = np.array(total.value, dtype=float), total.error
        for k in range(1, self.spec.m):
            term = self._potential(k + 1, k, x)
            value = value + (-1) ** k * term.value
            err += term.error
        return Estimate(value=value, error=float(err))

    def solve_many(self, points):
        """``solve`` at each row of ``points``, in order."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        # build the shared layers once before fanning out
        if len(points):
            self.solve(np.zeros(self.n))
        return pmap(self.solve, points)


# -- module-level entry points -----------------------------------------------------------


_SOLVERS = {}


def get_solver(spec, budget=None):
    """A cached :class:`Solver` for ``spec`` (keyed by its JSON form and budget)."""
    budget = budget or spec.budget
    key = (json.dumps(spec.to_json(), sort_keys=True), budget)
    if key not in _SOLVERS:
        if len(_SOLVERS) >= 16:
            _SOLVERS.pop(next(iter(_SOLVERS)))
        _SOLVERS[key] = Solver(spec, budget)
    return _SOLVERS[key]


def poisson_extend(spec, phi, x, budget=None):
    return get_solver(spec, budget).poisson_extend(phi, x)


def green_chain(spec, k, x, budget=None):
    return get_solver(spec, budget).green_chain(k, x)


def solve(spec, x, budget=None):
    return get_solver(spec, budget).solve(x)


def laplacian_bound(spec):
    """``||phi_1|| + sum_(k=1..m-1) (||phi_(k+1)|| / 2n) c^(k-1)``, a bound for ``|Delta f|``."""
    n = spec.n
    norms = spec.norms()
    c = potential_factor(n)
    return norms[0] + sum(norms[k] / (2.0 * n) * c ** (k - 1) for k in range(1, spec.m))


def fd_laplacian(fn, x, h):
    """Five-point-per-axis central second difference of ``fn`` at ``x``."""
    x = as_point(x)
    f0 = np.asarray(fn(x), dtype=float)
    acc = np.zeros_like(f0)
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = h
        acc = acc + np.asarray(fn(x + e), dtype=float) + np.asarray(fn(x - e), dtype=float) - 2.0 * f0
    return acc / (h * h)


def residual_check(spec, samples, evaluator=None, reference=None, h=0.05, tol=1e-2, budget=None):
    """Finite-difference Laplacian of the solution against its known value.

    Parameters
    ----------
    spec : ProblemSpec
    samples : array_like, shape (N, n)
        Points with ``|x| <= 0.8``.
    evaluator : callable, optional
        ``x -> f(x)``; defaults to the solver's value.
    reference : callable, optional
        ``x -> Delta f(x)`` (for instance from the radial oracle). Defaults
        to the solver's Laplacian chain.
    h : float
        Difference step.
    tol : float
        Allowed residual.

    Returns
    -------
    BoundsReport
        One residual entry and one Laplacian-bound entry per sample.
    """
    if not h > 1e-8:
        raise DomainError("difference step underflow")
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if np.any(norm(samples) > 0.8):
        raise DomainError("residual samples must satisfy |x| <= 0.8")
    solver = get_solver(spec, budget)
    if evaluator is None:
        def evaluator(x):
            return solver.solve(x).value
    if reference is None:
        def reference(x):
            return solver.laplacian_chain(x).value

    bound = laplacian_bound(spec)
    report = BoundsReport("laplacian residual", meta={"h": h, "n": spec.n, "m": spec.m})

    def one(x):
        lap = fd_laplacian(evaluator, x, h)
        ref = np.asarray(reference(x), dtype=float)
        return lap, ref

    for x, (lap, ref) in zip(samples, pmap(one, samples)):
        resid = float(np.max(np.abs(lap - ref)))
        report.add("residual", resid, 0.0, tol, "le", tuple(x))
        report.add("laplacian bound", float(np.linalg.norm(lap)), bound, tol, "le", tuple(x))
    return report


__all__ = [
    "BOUNDARY_GAP",
    "Grid",
    "GreenOperator",
    "ProblemSpec",
    "Solver",
    "fd_laplacian",
    "get_solver",
    "green_chain",
    "green_operator",
    "laplacian_bound",
    "poisson_extend",
    "poisson_on_grid",
    "potential_factor",
    "residual_check",
    "solve",
    "solver_grid",
]
