"""Spherical coordinates and quadrature on the sphere and the ball.

Coordinates follow the chart

    x_1 = r cos t_1,
    x_j = r sin t_1 ... sin t_(j-1) cos t_j        (2 <= j <= n - 1),
    x_n = r sin t_1 ... sin t_(n-2) sin t_(n-1),

with ``t_j`` in [0, pi] for j < n - 1 and ``t_(n-1)`` in [0, 2 pi).

Product rules use Gauss-Jacobi nodes in ``u = cos t_j`` (the weight
``sin^(n-1-j) t_j dt_j`` becomes a Jacobi weight in ``u``) and the
trapezoid rule in the periodic angle. Integrals against the Green
function are computed after the ball automorphism substitution
``y = phi_x(rho zeta)``, which turns ``G(x, y) dV(y)`` into the bounded
density

    (1 - |x|^2)^2 rho (1 - rho^(n-2)) / ((n - 2) |rho x - zeta|^(n+2)) drho dsigma(zeta).

The density is still sharply peaked at ``rho = 1``, ``zeta = x/|x|`` when
``x`` approaches the sphere, so the rules are graded geometrically toward
that corner on the scale ``1 - |x|``.
"""

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from . import specfun
from .errors import BudgetExceeded, DomainError
from .geometry import as_point, householder_to, mobius, norm

MAX_NODES = 4_000_000


# -- coordinates ---------------------------------------------------------------


def spherical_to_cartesian(r, theta):
    """Map ``(r, t_1, ..., t_(n-1))`` to a point of R^n.

    Broadcasts over leading axes of ``theta`` (shape ``(..., n - 1)``).

    Raises
    ------
    DomainError
        If ``r`` is outside [0, 1] or an angle is outside its range.
    """
    theta = np.asarray(theta, dtype=float)
    r = np.asarray(r, dtype=float)
    if theta.ndim == 0 or theta.shape[-1] < 2:
        raise DomainError("need n - 1 >= 2 angles")
    if np.any(r < 0.0) or np.any(r > 1.0):
        raise DomainError("radius must lie in [0, 1]")
    if np.any(theta[..., :-1] < 0.0) or np.any(theta[..., :-1] > math.pi):
        raise DomainError("polar angles must lie in [0, pi]")
    if np.any(theta[..., -1] < 0.0) or np.any(theta[..., -1] > 2.0 * math.pi):
        raise DomainError("the last angle must lie in [0, 2 pi]")
    m = theta.shape[-1]
    s = np.sin(theta)
    c = np.cos(theta)
    out = np.empty(theta.shape[:-1] + (m + 1,))
    prod = np.ones(theta.shape[:-1])
    for j in range(m):
        out[..., j] = prod * c[..., j]
        prod = prod * s[..., j]
    out[..., m] = prod
    return r[..., None] * out


def cartesian_to_spherical(x):
    """Inverse of :func:`spherical_to_cartesian`; returns ``(r, theta)``.

    At coordinate degeneracies (a vanishing tail ``(x_j, ..., x_n)``) the
    undetermined angles are set to 0.
    """
    x = as_point(x)
    n = x.shape[-1]
    r = norm(x)
    # tail[..., j] = |(x_(j+1), ..., x_n)| in 1-based numbering
    tail = np.sqrt(np.cumsum(x[..., ::-1] ** 2, axis=-1)[..., ::-1])
    theta = np.empty(x.shape[:-1] + (n - 1,))
    for j in range(n - 2):
        theta[..., j] = np.arctan2(tail[..., j + 1], x[..., j])
    theta[..., n - 2] = np.mod(np.arctan2(x[..., n - 1], x[..., n - 2]), 2.0 * math.pi)
    return r, theta


def jacobian_det(r, theta):
    """``det D_S = r^(n-1) sin^(n-2) t_1 sin^(n-3) t_2 ... sin t_(n-2)``."""
    theta = np.asarray(theta, dtype=float)
    m = theta.shape[-1]
    out = np.asarray(r, dtype=float) ** m
    for j in range(m - 1):
        out = out * np.sin(theta[..., j]) ** (m - 1 - j)
    return out


# -- rule containers ---------------------------------------------------------------


@dataclass(frozen=True)
class SphereRule:
    """Nodes on S^(n-1) with weights for the normalised surface measure."""

    n: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f):
        return _apply(self.weights, f(self.nodes))


@dataclass(frozen=True)
class BallRule:
    """Nodes in B^n with weights for Lebesgue measure.

    The rule is a tensor product: ``radii`` (radial-major), then the polar
    angles ``angles[0..n-3]`` and finally ``angles[n-2]``, the uniform
    periodic angle, which is the fastest-varying axis of ``nodes``.
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    radii: np.ndarray
    angles: tuple

    @property
    def shape(self):
        return (len(self.radii),) + tuple(len(a) for a in self.angles)

    def integrate(self, f):
        return _apply(self.weights, f(self.nodes))


@dataclass(frozen=True)
class Estimate:
    """A numerical value together with an error bar."""

    value: np.ndarray
    error: float

    def __float__(self):
        return float(np.asarray(self.value).reshape(-1)[0])


@dataclass(frozen=True)
class Budget:
    """Resolution knobs shared by the integrators and the solver.

    ``sphere_level`` and ``radial`` set the per-point singular rules;
    ``grid_radial`` and ``grid_level`` set the tensor grid that carries the
    intermediate potentials in the solver. ``grid_level=None`` picks a
    dimension-dependent default (see :meth:`grid_level_for`).
    """

    sphere_level: int = 24
    radial: int = 48
    grid_radial: int = 16
    grid_level: int | None = None
    max_nodes: int = MAX_NODES

    def __post_init__(self):
        for name in ("sphere_level", "radial", "grid_radial", "grid_level", "max_nodes"):
            v = getattr(self, name)
            if v is None and name == "grid_level":
                continue
            if int(v) != v or v < 1:
                raise DomainError(f"budget field {name} must be a positive integer")
        if self.grid_radial < 4:
            raise DomainError("grid_radial must be at least 4 for cubic radial interpolation")

    def grid_level_for(self, n):
        """Angular level of the solver grid in dimension ``n``.

        The grid has ``grid_radial * 2 * level^(n-1)`` nodes and the dense
        Green operator stores ``1/(2 level)`` of its square, so the default
        shrinks with ``n``.
        """
        if self.grid_level is not None:
            return self.grid_level
        return {3: 8, 4: 4}.get(n, 3)

    def halved(self):
        return replace(
            self,
            sphere_level=max(2, self.sphere_level // 2),
            radial=max(2, self.radial // 2),
        )


def _apply(weights, values):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError("integrand produced non-finite values")
    if values.ndim == 1:
        return float(np.sum(weights * values))
    return np.sum(weights[:, None] * values.reshape(len(weights), -1), axis=0)


def _check_nodes(count, max_nodes=MAX_NODES):
    if count > max_nodes:
        raise BudgetExceeded(f"rule needs {count} nodes, limit is {max_nodes}")


# -- one-dimensional building blocks ---------------------------------------------------


@lru_cache(maxsize=None)
def _gauss_legendre(q):
    return np.polynomial.legendre.leggauss(q)


@lru_cache(maxsize=None)
def _jacobi_cos_rule(q, a):
    """Nodes ``t`` in (0, pi) and weights for ``int_0^pi g(t) sin^(2a+1) t dt``."""
    u, w = roots_jacobi(q, a, a)
    t = np.arccos(u)
    order = np.argsort(t)
    return t[order], w[order]


@lru_cache(maxsize=None)
def _radial_rule(q, n):
    """Gauss-Jacobi rule for ``int_0^1 g(r) r^(n-1) dr``."""
    s, w = roots_jacobi(q, 0.0, n - 1.0)
    return (s + 1.0) / 2.0, w / 2.0**n


def composite_gauss(edges, q):
    """Composite q-point Gauss-Legendre nodes and weights on the given panels."""
    edges = np.asarray(edges, dtype=float)
    x, w = _gauss_legendre(q)
    a = edges[:-1, None]
    h = np.diff(edges)[:, None] / 2.0
    return (a + h * (x + 1.0)).ravel(), (h * w).ravel()


def graded_edges(length, scale):
    """Panel edges on [0, length], doubling in width from ``scale / 8`` at 0."""
    edges = [0.0]
    e = max(scale, 1e-300) / 8.0
    # stop early enough that the last panel is no thinner than its neighbour
    while e < length / 1.5:
        edges.append(e)
        e *= 2.0
    edges.append(length)
    return np.array(edges)


def _panel_points(level, per):
    return max(1, -(-level // per))


# -- product rules ------------------------------------------------------------------------


def sphere_rule(n, level):
    """Product rule on S^(n-1) with ``level`` nodes per polar angle.

    Polar angles use Gauss-Jacobi in ``cos t_j``, the periodic angle uses
    ``2 * level`` uniform nodes. Weights sum to 1.

    Raises
    ------
    BudgetExceeded
        If the tensor product exceeds the node limit.
    """
    n, level = int(n), int(level)
    if n < 3 or level < 1:
        raise DomainError("sphere_rule needs n >= 3 and level >= 1")
    _check_nodes(level ** (n - 2) * 2 * level)
    return _sphere_rule_cached(n, level)


@lru_cache(maxsize=32)
def _sphere_rule_cached(n, level):
    axes, weights = _sphere_axes(n, level)
    grids = np.meshgrid(*axes, indexing="ij")
    theta = np.stack([g.ravel() for g in grids], axis=-1)
    wgrid = np.ones(())
    for w in weights:
        wgrid = np.multiply.outer(wgrid, w)
    w = wgrid.ravel()
    return SphereRule(n=n, nodes=spherical_to_cartesian(np.ones(len(w)), theta), weights=w / w.sum())


def _sphere_axes(n, level):
    axes, weights = [], []
    for j in range(1, n - 1):
        t, w = _jacobi_cos_rule(level, (n - 2 - j) / 2.0)
        axes.append(t)
        weights.append(w)
    m = 2 * level
    axes.append(2.0 * math.pi * np.arange(m) / m)
    weights.append(np.full(m, 1.0 / m))
    return axes, weights


def ball_rule(n, level, radial=None):
    """Radial Gauss-Jacobi times :func:`sphere_rule`; weights sum to Vol(B^n)."""
    n, level = int(n), int(level)
    radial = level if radial is None else int(radial)
    if n < 3 or level < 1 or radial < 1:
        raise DomainError("ball_rule needs n >= 3 and positive levels")
    _check_nodes(radial * level ** (n - 2) * 2 * level)
    return _ball_rule_cached(n, level, radial)


@lru_cache(maxsize=32)
def _ball_rule_cached(n, level, radial):
    r, wr = _radial_rule(radial, n)
    axes, _ = _sphere_axes(n, level)
    sph = _sphere_rule_cached(n, level)
    omega = 2.0 * math.pi ** (n / 2) / specfun.gamma_fn(n / 2)
    nodes = (r[:, None, None] * sph.nodes[None, :, :]).reshape(-1, n)
    weights = (omega * wr[:, None] * sph.weights[None, :]).ravel()
    return BallRule(n=n, nodes=nodes, weights=weights, radii=r, angles=tuple(axes))


# -- rules aligned with a direction ------------------------------------------------------------


def aligned_sphere_rule(n, axis, level, scale=1.0, per_panel=6):
    """Normalised sphere rule in polar coordinates about ``axis``.

    The angle from ``axis`` is integrated on panels graded toward 0 on the
    length ``scale`` (with a breakpoint at pi/2); the transverse sphere
    S^(n-2) uses a product rule. Suited to integrands peaked at ``axis``.
    Each angular panel carries ``ceil(level / per_panel)`` Gauss points.
    """
    axis = np.asarray(axis, dtype=float)
    t, wt = _polar_angle_rule(n, level, float(scale), per_panel)
    xi, wxi = _transverse_rule(n, level)
    _check_nodes(len(t) * len(wxi))
    local = np.concatenate(
        [
            np.repeat(np.cos(t), len(wxi))[:, None],
            (np.sin(t)[:, None, None] * xi[None, :, :]).reshape(-1, n - 1),
        ],
        axis=1,
    )
    nodes = local @ householder_to(axis)
    w = np.outer(wt, wxi).ravel()
    return SphereRule(n=n, nodes=nodes, weights=w)


def _polar_angle_rule(n, level, scale, per_panel):
    q = _panel_points(level, per_panel)
    half = math.pi / 2
    upper = graded_edges(half, min(scale, half))
    lower = half + np.linspace(0.0, half, 3)
    t, w = composite_gauss(np.concatenate([upper, lower[1:]]), q)
    polar_mass = specfun.beta_fn((n - 1) / 2.0, 0.5)
    return t, w * np.sin(t) ** (n - 2) / polar_mass


@lru_cache(maxsize=64)
def _transverse_rule(n, level):
    if n == 3:
        m = max(4, level)
        phi = 2.0 * math.pi * np.arange(m) / m
        return np.stack([np.cos(phi), np.sin(phi)], axis=1), np.full(m, 1.0 / m)
    sub = _sphere_rule_cached(n - 1, max(2, level // (4 * (n - 3))))
    return sub.nodes, sub.weights


def _radial_panels(delta, radial):
    """Nodes on [0, 1] graded toward 1 on the length ``delta``."""
    q = _panel_points(radial, 8)
    near = 1.0 - graded_edges(0.5, min(delta, 0.5))[::-1]
    edges = np.concatenate([[0.0], near])
    return composite_gauss(edges, q)


def _transverse_size(n, level):
    if n == 3:
        return max(4, level)
    sub = max(2, level // (4 * (n - 3)))
    return sub ** (n - 3) * 2 * sub


def _frame_size(n, rx, level, radial):
    """Node count of the rule for a center of radius ``rx``, without building it."""
    delta = 1.0 - rx
    radial_count = (len(graded_edges(0.5, min(delta, 0.5)))) * _panel_points(radial, 8)
    polar_count = (len(graded_edges(math.pi / 2, min(delta, math.pi / 2))) + 1) * _panel_points(level, 6)
    return radial_count * polar_count * _transverse_size(n, level)


def _axis_of(x, n):
    rx = float(norm(x))
    return rx, (x / rx if rx > 0.0 else np.eye(n)[0])


def _frozen(*arrays):
    for a in arrays:
        a.setflags(write=False)
    return arrays


@lru_cache(maxsize=512)
def _local_frame(n, rx, level, radial):
    """``(rho, zeta, w, d2)`` for the center ``rx e_1``.

    ``d2 = |rho x - zeta|^2 = [x, rho zeta]^2``. The rule depends on ``x``
    only through ``|x|``; rotating the nodes gives the rule for any center
    of that radius.
    """
    delta = 1.0 - rx
    rho, wr = _radial_panels(delta, radial)
    sph = aligned_sphere_rule(n, np.eye(n)[0], level, scale=delta)
    _check_nodes(len(rho) * len(sph.weights))
    d2 = 1.0 - 2.0 * rho[:, None] * (rx * sph.nodes[:, 0])[None, :] + (rho**2)[:, None] * rx * rx
    return rho, sph.nodes, np.outer(wr, sph.weights), d2


def _local_points(n, rx, rho, zeta):
    z = (rho[:, None, None] * zeta[None, :, :]).reshape(-1, n)
    if rx == 0.0:
        # phi_0 is the reflection z -> -z; the polar rule is used as is
        return z
    x = np.zeros(n)
    x[0] = rx
    return mobius(x, z)


@lru_cache(maxsize=512)
def _local_green_rule(n, rx, level, radial):
    rho, zeta, w, d2 = _local_frame(n, rx, level, radial)
    dens = (1.0 - rx * rx) ** 2 * (rho * (1.0 - rho ** (n - 2)))[:, None] / d2 ** ((n + 2) / 2)
    weights = (dens * w / (n - 2)).ravel()
    return _frozen(_local_points(n, rx, rho, zeta), weights)


@lru_cache(maxsize=512)
def _local_mobius_rule(n, rx, level, radial):
    rho, zeta, w, d2 = _local_frame(n, rx, level, radial)
    omega = 2.0 * math.pi ** (n / 2) / specfun.gamma_fn(n / 2)
    jac = (1.0 - rx * rx) ** n / d2**n
    weights = (omega * jac * (rho ** (n - 1))[:, None] * w).ravel()
    return _frozen(_local_points(n, rx, rho, zeta), weights)


@lru_cache(maxsize=512)
def _local_poisson_rule(n, rx, level):
    sph = aligned_sphere_rule(n, np.eye(n)[0], level, scale=1.0 - rx, per_panel=3)
    x = np.zeros(n)
    x[0] = rx
    d = norm(sph.nodes - x)
    w = sph.weights * (1.0 - rx * rx) / d**n
    # the kernel has unit mass; normalising makes constants exact
    return _frozen(sph.nodes, w / w.sum())


def _rotated(x, n, local):
    rx, axis = _axis_of(x, n)
    nodes, w = local
    if rx == 0.0:
        return nodes, w
    return nodes @ householder_to(axis), w


def green_rule(n, x, level=24, radial=48, max_nodes=MAX_NODES):
    """Nodes ``y`` and weights ``W`` with ``sum W f(y) ~ int G(x, y) f(y) dV(y)``.

    Raises
    ------
    DomainError
        If ``|x| >= 1``.
    BudgetExceeded
        If the rule exceeds ``max_nodes``.
    """
    x = _center(x, n)
    rx = float(norm(x))
    _check_nodes(_frame_size(n, rx, int(level), int(radial)), max_nodes)
    local = _local_green_rule(n, rx, int(level), int(radial))
    return _rotated(x, n, local)


def mobius_rule(n, x, level=24, radial=48, max_nodes=MAX_NODES):
    """Nodes ``y = phi_x(z)`` and weights for ``int g(y) dV(y)``.

    The weights carry ``|J_phi_x(z)|``; an integrand with an
    ``|x - y|^(1-n)`` singularity becomes bounded in ``z``.
    """
    x = _center(x, n)
    rx = float(norm(x))
    _check_nodes(_frame_size(n, rx, int(level), int(radial)), max_nodes)
    local = _local_mobius_rule(n, rx, int(level), int(radial))
    return _rotated(x, n, local)


def poisson_rule(n, x, level=24):
    """Boundary nodes and weights with ``sum W phi(zeta) ~ P[phi](x)``.

    The weights are normalised to sum to 1, so constants are reproduced
    to rounding.
    """
    x = _center(x, n)
    return _rotated(x, n, _local_poisson_rule(n, float(norm(x)), int(level)))


def _center(x, n):
    x = as_point(x)
    if x.ndim != 1 or x.shape[0] != n:
        raise DomainError(f"expected a single point of R^{n}")
    if float(norm(x)) >= 1.0:
        raise DomainError("the center must lie in the open ball")
    return x


# -- integrators ---------------------------------------------------------------------------


def green_integrate(n, x, f, budget=None):
    """``int G(x, y) f(y) dV(y)`` with an error bar.

    ``f`` maps an ``(N, n)`` array of points to ``(N,)`` or ``(N, d)``
    values. The error bar is the difference between the result at
    ``budget`` and at ``budget.halved()``.
    """
    budget = budget or Budget()
    hi = _green_once(n, x, f, budget)
    lo = _green_once(n, x, f, budget.halved())
    return Estimate(value=hi, error=float(np.max(np.abs(np.asarray(hi - lo)))))


def _green_once(n, x, f, budget):
    y, w = green_rule(n, x, budget.sphere_level, budget.radial, budget.max_nodes)
    return _apply(w, f(y))


def green_integrate_mc(n, x, f, samples=20000, seed=0):
    """Monte Carlo estimate of ``int G(x, y) f(y) dV(y)`` with a control variate.

    Points ``y`` are drawn uniformly in the ball; ``G(x, y)`` itself, whose
    integral ``(1 - |x|^2)/(2n)`` is known, is the control variate. The
    estimator is unbiased; the error bar is three standard errors.
    """
    from .kernels import KernelContext

    ctx = KernelContext(n)
    x = _center(x, n)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((samples, n))
    g /= norm(g)[:, None]
    y = g * rng.random(samples)[:, None] ** (1.0 / n)
    vol = ctx.volume
    kern = ctx.green(x[None, :], y) * vol
    vals = np.asarray(f(y), dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    h = kern[:, None] * vals
    c = kern - kern.mean()
    beta = (c @ (h - h.mean(axis=0))) / max(float(c @ c), 1e-300)
    adjusted = h - beta[None, :] * (kern - ctx.green_mass(x))[:, None]
    value = adjusted.mean(axis=0)
    err = 3.0 * adjusted.std(axis=0, ddof=1) / math.sqrt(samples)
    out = value if value.size > 1 else float(value[0])
    return Estimate(value=out, error=float(np.max(err)))
