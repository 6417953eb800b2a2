"""Gamma, Beta, Pochhammer, the Gauss hypergeometric series and friends.

The Gamma function uses the Lanczos approximation (g = 7, nine terms),
which is good to about 1e-15 relative on the positive axis; negative
arguments go through the reflection formula.

``hyp2f1`` sums the power series directly for moderate arguments. For
``x`` in [-1, -1/2) it first applies the Pfaff transformation
``F(a, b; c; x) = (1 - x)^(-a) F(a, c - b; c; x / (x - 1))``, which maps the
argument into [1/3, 1/2) and turns the slowly converging alternating
series into a geometrically converging one. Near ``x = 1`` the ``1 - x``
connection formula is used when ``c - a - b`` is not an integer.
"""

import math

from .errors import ConvergenceError, DomainError

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

HYP_TOL = 1e-15
HYP_MAX_TERMS = 100_000


def _is_nonpositive_int(x):
    return x <= 0 and float(x).is_integer()


def gamma_fn(x):
    """Gamma function for real ``x`` off the non-positive integers."""
    x = float(x)
    if _is_nonpositive_int(x):
        raise DomainError(f"Gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS[0]
    for i, p in enumerate(_LANCZOS[1:], start=1):
        acc += p / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def rgamma(x):
    """``1 / Gamma(x)``, zero at the poles."""
    if _is_nonpositive_int(float(x)):
        return 0.0
    return 1.0 / gamma_fn(x)


def beta_fn(p, q):
    if p <= 0 or q <= 0:
        raise DomainError("Beta(p, q) requires p, q > 0")
    return gamma_fn(p) * gamma_fn(q) / gamma_fn(p + q)


def pochhammer(a, k):
    """Rising factorial ``(a)_k = a (a + 1) ... (a + k - 1)``."""
    if k < 0 or int(k) != k:
        raise DomainError("Pochhammer index must be a non-negative integer")
    out = 1.0
    for j in range(int(k)):
        out *= a + j
    return out


def _series(a, b, c, x, tol=HYP_TOL, max_terms=HYP_MAX_TERMS):
    term = 1.0
    total = 1.0
    small = 0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        total += term
        if term == 0.0:
            return total
        if abs(term) <= tol * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; {x}) series did not converge in {max_terms} terms"
    )


def hyp2f1_gauss(a, b, c):
    """``F(a, b; c; 1)`` by Gauss's closed form; needs ``c - a - b > 0``."""
    if c - a - b <= 0:
        raise DomainError("F(a, b; c; 1) diverges unless c - a - b > 0")
    return gamma_fn(c) * gamma_fn(c - a - b) * rgamma(c - a) * rgamma(c - b)


def hyp2f1(a, b, c, x):
    """Gauss hypergeometric function ``F(a, b; c; x)`` for real ``|x| <= 1``.

    Raises
    ------
    DomainError
        If ``c`` is a non-positive integer, ``|x| > 1``, ``x = -1`` with a
        divergent series, or ``x = 1`` with ``c - a - b <= 0``.
    ConvergenceError
        If the series needs more than 1e5 terms.
    """
    a, b, c, x = float(a), float(b), float(c), float(x)
    if _is_nonpositive_int(c):
        raise DomainError(f"c = {c} is a non-positive integer")
    if abs(x) > 1.0:
        raise DomainError(f"|x| = {abs(x)} > 1 is outside the supported region")
    if x == 0.0 or a == 0.0 or b == 0.0:
        return 1.0
    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        return _series(a, b, c, x)
    if x == 1.0:
        return hyp2f1_gauss(a, b, c)
    if x < -0.5:
        if x == -1.0 and c - b - a <= -1.0:
            # (1 - x)^(-a) F(a, c - b; c; 1/2) is finite, but the series at -1
            # is not summable in the ordinary sense
            raise DomainError("F(a, b; c; -1) series diverges for c - a - b <= -1")
        return (1.0 - x) ** (-a) * hyp2f1(a, c - b, c, x / (x - 1.0))
    s = c - a - b
    if x > 0.9 and abs(s - round(s)) > 1e-6:
        return _connection_at_one(a, b, c, x)
    return _series(a, b, c, x)


def _connection_at_one(a, b, c, x):
    s = c - a - b
    y = 1.0 - x
    A = gamma_fn(c) * gamma_fn(s) * rgamma(c - a) * rgamma(c - b)
    B = gamma_fn(c) * gamma_fn(-s) * rgamma(a) * rgamma(b)
    first = A * _series(a, b, 1.0 - s, y) if A != 0.0 else 0.0
    second = B * y**s * _series(c - a, c - b, 1.0 + s, y) if B != 0.0 else 0.0
    return first + second


def sphere_singular_integral(lambda1, lambda2, r):
    """``int_0^pi sin^(l1 - 1) t (1 + r^2 - 2 r cos t)^(-l2) dt`` in closed form.

    Equals ``B(l1/2, 1/2) F(l2, l2 + (1 - l1)/2; (1 + l1)/2; r^2)`` for
    ``l1 > 1``, ``l2 > 0`` and ``0 <= r < 1``; ``r = 1`` is accepted when
    ``l1 - 2 l2 > 0``.
    """
    if lambda1 <= 1.0 or lambda2 <= 0.0:
        raise DomainError("need lambda1 > 1 and lambda2 > 0")
    if not 0.0 <= r <= 1.0:
        raise DomainError("need 0 <= r <= 1")
    if r == 1.0 and lambda1 - 2.0 * lambda2 <= 0.0:
        raise DomainError("at r = 1 the integral diverges unless lambda1 - 2 lambda2 > 0")
    return beta_fn(lambda1 / 2.0, 0.5) * hyp2f1(
        lambda2, lambda2 + (1.0 - lambda1) / 2.0, (1.0 + lambda1) / 2.0, r * r
    )


def sphere_power_mean(n, p, s):
    """Mean of ``|s e - zeta|^(-p)`` over the unit sphere of R^n, ``|e| = 1``.

    Reduces to ``F(p/2, p/2 + 1 - n/2; n/2; s^2)`` through the polar-angle
    integral; ``s = 1`` needs ``p < n - 1``.
    """
    if n < 3:
        raise DomainError("n >= 3 required")
    return hyp2f1(p / 2.0, p / 2.0 + 1.0 - n / 2.0, n / 2.0, s * s)


def heinz_constant(n):
    """Lower bound for the boundary radial difference quotient.

    ``n! [1 + n - (n - 2) F(1/2, 1; (n + 3)/2; -1)]
    / (2^(3n/2) Gamma((n + 1)/2) Gamma((n + 3)/2))``
    """
    if int(n) != n or n < 3:
        raise DomainError("n must be an integer >= 3")
    n = int(n)
    F = hyp2f1(0.5, 1.0, (n + 3) / 2.0, -1.0)
    num = math.factorial(n) * (1.0 + n - (n - 2) * F)
    den = 2.0 ** (1.5 * n) * gamma_fn((n + 1) / 2.0) * gamma_fn((n + 3) / 2.0)
    return num / den
