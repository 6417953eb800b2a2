"""Exact calculus on radial polynomials ``p(t) = sum a_k t^k`` with ``t = |x|^2``.

Coefficients are :class:`fractions.Fraction`, so every identity below is
checked bit-exactly and independently of any quadrature. Two monomial
rules carry everything:

    Delta t^k = 2k (2k + n - 2) t^(k-1),
    G[t^k]    = (1 - t^(k+1)) / ((2k + 2)(2k + n)),

where ``G[u](x) = int G(x, y) u(y) dV(y)``. The second follows from solving
``Delta w = -t^k`` with ``w = 0`` at ``t = 1`` and regularity at the
origin.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError


def _frac(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    return Fraction(float(v))


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs) if coeffs else (Fraction(0),)


@dataclass(frozen=True)
class RadialPoly:
    """A polynomial in ``t = |x|^2`` on the ball of R^n."""

    n: int
    coeffs: tuple

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise DomainError("RadialPoly needs an integer dimension n >= 3")
        object.__setattr__(self, "coeffs", _trim(_frac(c) for c in self.coeffs))

    @classmethod
    def constant(cls, n, c):
        return cls(n, (c,))

    @classmethod
    def monomial(cls, n, k, c=1):
        return cls(n, (0,) * k + (c,))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def _check(self, other):
        if other.n != self.n:
            raise DomainError("radial polynomials of different dimensions")

    def __add__(self, other):
        if not isinstance(other, RadialPoly):
            other = RadialPoly.constant(self.n, other)
        self._check(other)
        size = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (size - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (size - len(other.coeffs))
        return RadialPoly(self.n, tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return RadialPoly(self.n, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other if isinstance(other, RadialPoly) else -_frac(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RadialPoly):
            self._check(other)
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return RadialPoly(self.n, tuple(out))
        c = _frac(other)
        return RadialPoly(self.n, tuple(c * a for a in self.coeffs))

    __rmul__ = __mul__

    def __call__(self, t):
        """Evaluate at ``t``; exact for Fraction input, float otherwise."""
        if isinstance(t, (Fraction, int)):
            acc = Fraction(0)
            for a in reversed(self.coeffs):
                acc = acc * t + a
            return acc
        t = np.asarray(t, dtype=float)
        acc = np.zeros_like(t)
        for a in reversed(self.coeffs):
            acc = acc * t + float(a)
        return acc

    def at_points(self, x):
        """Evaluate at points ``x`` of shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        return self(np.sum(x * x, axis=-1))

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def sup_abs(self):
        """``max |p(t)|`` over ``t`` in [0, 1], as a float."""
        crit = [0.0, 1.0]
        if self.degree >= 2:
            d = np.polynomial.polynomial.polyder([float(c) for c in self.coeffs])
            for root in np.roots(d[::-1]):
                if abs(root.imag) < 1e-12 and 0.0 < root.real < 1.0:
                    crit.append(root.real)
        return max(abs(float(self(t))) for t in crit)


def laplacian(p):
    """``Delta p`` via ``Delta t^k = 2k(2k + n - 2) t^(k-1)``."""
    n = p.n
    out = [Fraction(0)] * max(1, len(p.coeffs) - 1)
    for k, a in enumerate(p.coeffs):
        if k >= 1:
            out[k - 1] += 2 * k * (2 * k + n - 2) * a
    return RadialPoly(n, tuple(out))


def green_apply(p):
    """``G[p]``: the solution of ``Delta w = -p`` vanishing at ``t = 1``."""
    n = p.n
    out = [Fraction(0)] * (len(p.coeffs) + 1)
    for k, a in enumerate(p.coeffs):
        c = a / ((2 * k + 2) * (2 * k + n))
        out[0] += c
        out[k + 1] -= c
    return RadialPoly(n, tuple(out))


def green_power(p, k):
    """``G^k[p]``, the k-fold iterate."""
    for _ in range(k):
        p = green_apply(p)
    return p


def polyharmonic_oracle(n, m, M=1):
    """The family ``f = M (1 - t^(m-1))`` with its Dirichlet chain.

    Returns
    -------
    f : RadialPoly
    phis : list
        ``phis[k]`` is the boundary value of ``Delta^k f`` (a Fraction) for
        ``k < m`` and ``phis[m] = Delta^m f`` as a RadialPoly (identically
        zero for this family).
    """
    if m < 2:
        raise DomainError("the polyharmonic order m must be at least 2")
    f = _frac(M) * (RadialPoly.constant(n, 1) - RadialPoly.monomial(n, m - 1))
    phis = []
    g = f
    for _ in range(m):
        phis.append(g(Fraction(1)))
        g = laplacian(g)
    phis.append(g)
    return f, phis


def representation(n, boundary, source):
    """``P[phi_0] + sum_k (-1)^k G_k[phi_k]`` for constant boundary data.

    ``boundary`` holds the constants ``phi_0..phi_(m-1)`` and ``source`` is
    the radial polynomial ``phi_m``. For constant ``c``, ``P[c] = c`` and
    ``G_k[c] = G^k[c]``; the source receives ``m`` Green applications.
    """
    m = len(boundary)
    total = RadialPoly.constant(n, boundary[0])
    for k in range(1, m):
        total = total + (-1) ** k * green_power(RadialPoly.constant(n, boundary[k]), k)
    if not isinstance(source, RadialPoly):
        source = RadialPoly.constant(n, source)
    return total + (-1) ** m * green_power(source, m)
