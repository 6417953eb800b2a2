"""The closed-form identity suite: each identity computed two independent ways.

* Green mass ``int G(x, y) dV(y) = (1 - |x|^2)/(2n)``, quadrature vs closed form.
* The weighted mass ``I_1(x) = (n + 4 - n|x|^2)(1 - |x|^2)/(4n(n + 2))``.
* The ``n + 4`` sphere moment: hypergeometric closed form vs its power
  series vs adaptive 1-D quadrature of the polar integral.
* The sphere singular integral ``int_0^pi sin^(l1-1) t (1 + r^2 - 2r cos t)^(-l2) dt``
  in closed form vs adaptive quadrature.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from . import specfun
from .kernels import KernelContext
from .quadrature import Budget, green_integrate
from .reports import SCHEMA_VERSION, rows_to_csv


@dataclass
class IdentityRow:
    identity: str
    n: int
    params: str
    closed_form: float
    numeric: float
    rel_err: float
    tolerance: float

    @property
    def passed(self):
        return self.rel_err <= self.tolerance

    def as_row(self):
        return {**asdict(self), "passed": self.passed}


@dataclass
class IdentityReport:
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    @property
    def failures(self):
        return [r for r in self.rows if not r.passed]

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "meta": self.meta,
            "passed": self.passed,
            "rows": [r.as_row() for r in self.rows],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self):
        return rows_to_csv([r.as_row() for r in self.rows], self.meta)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _fmt(values):
    return " ".join(repr(float(v)) for v in values)


def random_ball_points(n, count, rng, rmax=0.95):
    """``count`` points uniform in the ball of radius ``rmax``."""
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1)[:, None]
    return g * (rmax * rng.random(count) ** (1.0 / n))[:, None]


def green_mass_rows(n, points, budget=None, tol=1e-3):
    ctx = KernelContext(n)
    rows = []
    for x in points:
        est = green_integrate(n, x, lambda y: np.ones(len(y)), budget)
        exact = float(ctx.green_mass(x))
        rows.append(IdentityRow("green_mass", n, _fmt(x), exact, float(est.value), _rel(est.value, exact), tol))
    return rows


def weighted_mass_rows(n, points, budget=None, tol=1e-3):
    ctx = KernelContext(n)
    rows = []
    for x in points:
        est = green_integrate(n, x, lambda y: 1.0 - np.sum(y * y, axis=1), budget)
        exact = float(ctx.weighted_green_mass_I1(x))
        rows.append(IdentityRow("weighted_mass_I1", n, _fmt(x), exact, float(est.value), _rel(est.value, exact), tol))
    return rows


def moment_by_quadrature(n, s, p=None):
    """Mean of ``|s e - zeta|^(-p)`` over the sphere by adaptive quadrature in the polar angle."""
    p = n + 4 if p is None else p
    ctx = KernelContext(n)

    def integrand(t):
        return math.sin(t) ** (n - 2) * (1.0 + s * s - 2.0 * s * math.cos(t)) ** (-p / 2.0)

    val, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=500)
    return val / ctx.polar_mass


def moment_rows(n, s_values=(0.0, 0.3, 0.7, 0.9), tol=1e-6):
    """Closed form, series and quadrature of the ``n + 4`` moment; each pair is one row."""
    ctx = KernelContext(n)
    e = np.zeros(n)
    e[0] = 1.0
    rows = []
    for s in s_values:
        closed = ctx.sphere_moment(s * e)
        series = ctx.sphere_moment_series(s * e)
        quad = moment_by_quadrature(n, s)
        rows.append(IdentityRow("moment_series", n, f"s={s!r}", closed, series, _rel(series, closed), tol))
        rows.append(IdentityRow("moment_quadrature", n, f"s={s!r}", closed, quad, _rel(quad, closed), tol))
    return rows


def singular_integral_by_quadrature(l1, l2, r):
    def integrand(t):
        return math.sin(t) ** (l1 - 1.0) * (1.0 + r * r - 2.0 * r * math.cos(t)) ** (-l2)

    # the integrand peaks at t = 0 on the scale 1 - r
    brk = [min(math.pi / 2, 4.0 * (1.0 - r))] if r > 0.5 else None
    val, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=500, points=brk)
    return val


def random_singular_triples(count, rng):
    """``(lambda1, lambda2, r)`` with ``lambda1`` in (1.2, 8), ``lambda2`` in (0.1, 5), ``r`` in [0, 0.9)."""
    out = []
    for _ in range(count):
        out.append((1.2 + 6.8 * rng.random(), 0.1 + 4.9 * rng.random(), 0.9 * rng.random()))
    return out


def singular_integral_rows(triples, tol=1e-8):
    rows = []
    for l1, l2, r in triples:
        closed = specfun.sphere_singular_integral(l1, l2, r)
        quad = singular_integral_by_quadrature(l1, l2, r)
        rows.append(IdentityRow("sphere_singular_integral", 0, _fmt((l1, l2, r)), closed, quad, _rel(quad, closed), tol))
    return rows


def run_identities(ns, seed=0, samples=20, budget=None, tol=1e-3):
    """The whole suite for each dimension in ``ns``; deterministic for a fixed seed."""
    budget = budget or Budget()
    rng = np.random.default_rng(seed)
    report = IdentityReport(meta={"seed": seed, "samples": samples, "tolerance": tol})
    for n in ns:
        pts = random_ball_points(n, samples, rng)
        report.rows += green_mass_rows(n, pts, budget, tol)
        report.rows += weighted_mass_rows(n, pts, budget, tol)
        report.rows += moment_rows(n)
    report.rows += singular_integral_rows(random_singular_triples(samples, rng))
    return report
