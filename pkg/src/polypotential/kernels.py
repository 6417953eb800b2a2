"""Green function and Poisson kernel of the unit ball in R^n, n >= 3.

Sign convention: ``G >= 0`` in the ball and ``w(x) = int G(x, y) u(y) dV(y)``
solves ``Delta w = -u`` with ``w = 0`` on the sphere.

The harmonic-measure function ``U(r N) = P[X_{S+} - X_{S-}](r N)`` and its
radial derivative are computed from the one-dimensional polar-angle
reduction of the Poisson integral.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import ConvergenceError, DegenerateError, DomainError
from .geometry import _pair, as_point, bracket, norm

SPHERE_TOL = 1e-12

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _composite_gl(fn, edges):
    a = edges[:-1, None]
    h = np.diff(edges)[:, None] / 2.0
    t = a + h * (_GL_NODES + 1.0)
    return float(np.sum(h * _GL_WEIGHTS * fn(t)))


def _sq_dist(r, t):
    # |r N - zeta|^2 = 1 + r^2 - 2 r cos t, written without cancellation near r = 1
    return (1.0 - r) ** 2 + 4.0 * r * np.sin(t / 2) ** 2


def _one_minus_sq(r):
    # 1 - r^2 with full relative accuracy as r -> 1 (1 - r is exact there)
    d = 1.0 - r
    return d * (2.0 - d)


@dataclass(frozen=True)
class KernelContext:
    """Dimension-dependent constants: ``omega = |S^(n-1)|``, ``c_n = 1/((n-2) omega)``.

    ``polar_mass`` is ``int_0^pi sin^(n-2) t dt``, the normaliser of the
    polar-angle reduction of the surface measure.
    """

    n: int
    omega: float = field(init=False)
    c_n: float = field(init=False)
    polar_mass: float = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise DomainError("the ball Green function needs an integer n >= 3")
        omega = 2.0 * math.pi ** (self.n / 2) / specfun.gamma_fn(self.n / 2)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "c_n", 1.0 / ((self.n - 2) * omega))
        object.__setattr__(self, "polar_mass", specfun.beta_fn((self.n - 1) / 2, 0.5))

    @property
    def volume(self):
        """Lebesgue volume of the unit ball."""
        return self.omega / self.n

    def _check_dim(self, *arrays):
        for a in arrays:
            if a.shape[-1] != self.n:
                raise DomainError(f"expected points of R^{self.n}, got R^{a.shape[-1]}")

    # -- kernels -------------------------------------------------------------

    def green(self, x, y):
        """``G(x, y) = c_n (|x - y|^(2-n) - [x, y]^(2-n))``."""
        x, y = _pair(x, y)
        self._check_dim(x)
        if np.any(norm(x) >= 1.0) or np.any(norm(y) > 1.0):
            raise DomainError("Green function needs x in the open ball, y in the closed ball")
        d = norm(x - y)
        if np.any(d == 0.0):
            raise DegenerateError("Green function pole at x = y")
        p = self.n - 2
        return self.c_n * (d ** (-p) - bracket(x, y) ** (-p))

    def poisson(self, x, zeta):
        """``P(x, zeta) = (1 - |x|^2) / |x - zeta|^n`` for ``|zeta| = 1``."""
        x, zeta = _pair(x, zeta)
        self._check_dim(x)
        rx = norm(x)
        if np.any(rx >= 1.0):
            raise DomainError("Poisson kernel needs |x| < 1")
        if np.any(np.abs(norm(zeta) - 1.0) > SPHERE_TOL):
            raise DomainError("zeta must lie on the unit sphere")
        return (1.0 - rx**2) / norm(x - zeta) ** self.n

    def grad_green(self, x, y):
        """Gradient of ``G(., y)`` at ``x``."""
        x, y = _pair(x, y)
        self._check_dim(x)
        d = norm(x - y)
        if np.any(d == 0.0):
            raise DegenerateError("Green function pole at x = y")
        yy = np.sum(y * y, axis=-1)[..., None]
        b = bracket(x, y)[..., None]
        n = self.n
        return -((x - y) / d[..., None] ** n - (yy * x - y) / b**n) / self.omega

    def grad_green_majorant(self, x, y):
        """``(|x - y|^(1-n) + ||y|^2 x - y|^(1-n)) / omega``, a bound for ``|grad G|``."""
        x, y = _pair(x, y)
        yy = np.sum(y * y, axis=-1)[..., None]
        n = self.n
        return (norm(x - y) ** (1 - n) + norm(yy * x - y) ** (1 - n)) / self.omega

    # -- closed-form potentials ---------------------------------------------

    def green_mass(self, x):
        """``int |G(x, y)| dV(y) = (1 - |x|^2) / (2n)``."""
        t = self._sq_radius(x)
        return (1.0 - t) / (2.0 * self.n)

    def weighted_green_mass_I1(self, x):
        """``int (1 - |y|^2) |G(x, y)| dV(y) = (n + 4 - n|x|^2)(1 - |x|^2) / (4n(n + 2))``."""
        t = self._sq_radius(x)
        n = self.n
        return (n + 4 - n * t) * (1.0 - t) / (4.0 * n * (n + 2))

    def _sq_radius(self, x):
        x = as_point(x)
        self._check_dim(x)
        t = np.sum(x * x, axis=-1)
        if np.any(t >= 1.0):
            raise DomainError("need |x| < 1")
        return t

    def sphere_moment(self, x, r=1.0, exponent=None):
        """Mean over the sphere of ``|r x - zeta|^(-exponent)``.

        ``exponent`` defaults to ``n + 4``, where the mean equals
        ``F((n + 4)/2, 3; n/2; r^2 |x|^2)``.
        """
        s = self._moment_arg(x, r)
        p = self.n + 4 if exponent is None else exponent
        return specfun.sphere_power_mean(self.n, p, s)

    def sphere_moment_series(self, x, r=1.0, tol=1e-16, max_terms=100_000):
        """The ``n + 4`` moment summed from its explicit power series in ``(r|x|)^2``."""
        s2 = self._moment_arg(x, r) ** 2
        n = self.n
        total = 0.0
        power = 1.0
        for k in range(max_terms):
            term = (k + 1) * (k + 2) * (n + 2 * k) * (n + 2 * k + 2) / (2.0 * n * (n + 2)) * power
            total += term
            if term < tol * total:
                return total
            power *= s2
        raise ConvergenceError("moment series did not converge")

    def _moment_arg(self, x, r):
        x = as_point(x)
        self._check_dim(x)
        s = float(r) * float(norm(x))
        if s >= 1.0:
            raise DomainError("need r|x| < 1")
        return s

    # -- harmonic measure of the upper hemisphere -----------------------------

    def _polar_integral(self, fn, r):
        # composite Gauss-Legendre; panels double in width away from t = 0 to
        # resolve the Poisson peak of width (1 - r), the equator is a breakpoint
        half = math.pi / 2
        edges = [0.0]
        e = (1.0 - r) / 8.0
        while e < half:
            edges.append(e)
            e *= 2.0
        edges.append(half)
        upper = _composite_gl(fn, np.array(edges))
        lower = _composite_gl(fn, np.linspace(half, math.pi, 5))
        return upper - lower

    def harmonic_measure_U(self, r):
        """``U(r N)`` for ``0 <= r < 1``, N the north pole."""
        r = float(r)
        if not 0.0 <= r < 1.0:
            raise DomainError("U(rN) is evaluated for 0 <= r < 1")
        n = self.n

        def integrand(t):
            return _one_minus_sq(r) * np.sin(t) ** (n - 2) / _sq_dist(r, t) ** (n / 2)

        return self._polar_integral(integrand, r) / self.polar_mass

    def phi_derivative(self, r):
        """``Phi(r) = d U(r N) / dr``, differentiated under the polar integral.

        At ``r = 1`` the integrand derivative is singular, so the closed-form
        limit (the Heinz constant) is returned.
        """
        r = float(r)
        if r == 1.0:
            return specfun.heinz_constant(self.n)
        if not 0.0 <= r < 1.0:
            raise DomainError("Phi(r) is evaluated for 0 <= r <= 1")
        n = self.n

        def integrand(t):
            D = _sq_dist(r, t)
            # r - cos t = (r - 1) + 2 sin^2(t/2), also free of cancellation
            rc = (r - 1.0) + 2.0 * np.sin(t / 2) ** 2
            dP = -2 * r * D ** (-n / 2) - n * _one_minus_sq(r) * rc * D ** (-n / 2 - 1)
            return dP * np.sin(t) ** (n - 2)

        return self._polar_integral(integrand, r) / self.polar_mass
