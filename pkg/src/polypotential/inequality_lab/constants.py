"""Closed-form constants: c0, delta(n), and the Lipschitz-constant construction.

The Lipschitz bound for a K-quasiconformal solution is assembled from

    alpha = K^(1/(1-n)),
    mu_1  = q^(1 + alpha) * mean_sigma |eta - p|^(1 - n + alpha^2),
    mu_3  = K ||phi_1|| / n + K sum_(k>=2) ||phi_k|| c^(k-2) / (n^2 (n+2)),
    mu_4  = (n/(n+1) + 1/n) ||phi_1|| + sum_(k>=2) [delta/(2n) + 1/(2n^2(n+2))] c^(k-2) ||phi_k||,
    mu_2  = mu_3 + mu_4,
    mu_5  = (alpha mu_1 + mu_2) / (1 - (1 - alpha) mu_1),

with ``c = (n+4)/(4n(n+2))``. The sphere mean in ``mu_1`` does not depend
on ``p`` and has the closed form ``F(a, a + 1 - n/2; n/2; 1)`` with
``2a = n - 1 - alpha^2``.

The Mori constant ``q(n, K)`` has no explicit value; it is an input with
a placeholder default ``exp(K - 1)`` that only honours ``q(n, 1) = 1``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .. import specfun
from ..errors import DomainError
from ..quadrature import aligned_sphere_rule
from ..reports import ConstantsReport
from ..solver import potential_factor

T_STAR = (math.sqrt(7.0) - 1.0) / 3.0


def _c0_fn(t):
    return (2.0 - t * t) * (1.0 + t)


def t_star():
    """Maximiser of ``(2 - t^2)(1 + t)`` on [0, 1): the root of ``2 - 2t - 3t^2``."""
    return T_STAR


def c0(grid_check=True, points=100_001):
    """``max_(0 <= t < 1) (2 - t^2)(1 + t)``, about 2.631.

    The value is taken at the critical point; ``grid_check`` confirms on a
    uniform grid that no sampled value exceeds it.
    """
    value = _c0_fn(T_STAR)
    if grid_check:
        grid = np.linspace(0.0, 1.0, points)
        if float(np.max(_c0_fn(grid))) > value + 1e-12:
            raise ArithmeticError("grid search found a larger value than the critical point")
    return value


def delta_n(n):
    """``(n^2 - 4)/(3(n^2 - 1)) c0 + 4/(n(n + 1))``."""
    if int(n) != n or n < 3:
        raise DomainError("n must be an integer >= 3")
    return (n * n - 4.0) / (3.0 * (n * n - 1.0)) * c0(grid_check=False) + 4.0 / (n * (n + 1.0))


# -- Lipschitz constants ----------------------------------------------------------------


def q_model(n, K):
    """Placeholder Mori constant ``exp(K - 1)``; equals 1 at ``K = 1``."""
    return math.exp(K - 1.0)


@dataclass(frozen=True)
class LipschitzInputs:
    """Inputs of the Lipschitz-constant construction.

    ``q`` defaults to :func:`q_model`; ``phi_norms`` lists
    ``||phi_1||, ..., ||phi_m||``.
    """

    n: int
    K: float
    phi_norms: tuple = ()
    q: float | None = None
    q_label: str = field(default="", compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise DomainError("n must be an integer >= 3")
        if not self.K >= 1.0:
            raise DomainError("the dilatation K must be >= 1")
        if any(not v >= 0.0 for v in self.phi_norms):
            raise DomainError("norms must be nonnegative")
        if self.q is not None and not self.q > 0.0:
            raise DomainError("q must be positive")
        object.__setattr__(self, "phi_norms", tuple(float(v) for v in self.phi_norms))
        if self.q is None:
            object.__setattr__(self, "q", q_model(self.n, self.K))
            object.__setattr__(self, "q_label", "exp(K-1)")
        elif not self.q_label:
            object.__setattr__(self, "q_label", "given")


def mu1_exponent(n, K):
    """``p = n - 1 - K^(2/(1-n))``, so that ``mu_1`` involves ``|eta - p|^(-p)``."""
    alpha = K ** (1.0 / (1.0 - n))
    p = n - 1.0 - alpha * alpha
    # the mean is finite iff p < n - 1, i.e. alpha^2 > 0, which always holds
    assert p < n - 1.0
    return p


def mu1(n, K, q):
    """``q^(1+alpha)`` times the sphere mean of ``|eta - p|^(1 - n + alpha^2)``, closed form."""
    alpha = K ** (1.0 / (1.0 - n))
    return q ** (1.0 + alpha) * specfun.sphere_power_mean(n, mu1_exponent(n, K), 1.0)


def mu1_quadrature(n, K, q, level=48):
    """``mu_1`` from a sphere rule graded toward the singular point.

    The integrand behaves like ``theta^(alpha^2 - 1)`` in the polar angle;
    panels shrink geometrically down to 1e-14 so the missed mass is below
    ``1e-14^(alpha^2)``.
    """
    alpha = K ** (1.0 / (1.0 - n))
    p = mu1_exponent(n, K)
    pole = np.eye(n)[-1]
    rule = aligned_sphere_rule(n, pole, level, scale=1e-14, per_panel=8)
    d = np.linalg.norm(rule.nodes - pole, axis=1)
    return q ** (1.0 + alpha) * float(rule.weights @ d ** (-p))


def _norm_parts(n, norms):
    c = potential_factor(n)
    first = norms[0] if norms else 0.0
    rest = [(v, c ** (k - 2)) for k, v in enumerate(norms[1:], start=2)]
    return first, rest


def lipschitz_constants(inp):
    """All named constants of the Lipschitz construction for one cell.

    Returns
    -------
    ConstantsReport
        Keys ``alpha, q, mu1..mu5, C3, M1p, N1p, M1pp, N1pp, M1, N1,
        lipschitz, branch``. ``mu5``, ``M1pp`` and ``N1pp`` are ``None``
        when ``(1 - alpha) mu_1 >= 1`` (their denominator is not positive).
    """
    n, K, q = inp.n, float(inp.K), float(inp.q)
    alpha = K ** (1.0 / (1.0 - n))
    delta = delta_n(n)
    m1 = mu1(n, K, q)
    first, rest = _norm_parts(n, inp.phi_norms)
    mu3 = K * first / n + K * sum(v * w / (n * n * (n + 2.0)) for v, w in rest)
    mu4 = (n / (n + 1.0) + 1.0 / n) * first + sum(
        (delta / (2.0 * n) + 1.0 / (2.0 * n * n * (n + 2.0))) * w * v for v, w in rest
    )
    mu2 = mu3 + mu4
    expo = 1.0 / alpha
    M1p = (K * m1) ** expo
    N1p = (K * m1 + mu2) ** expo - M1p
    gap = 1.0 - (1.0 - alpha) * m1
    if gap <= 0.0:
        branch = "prime (1-alpha)mu1>=1"
        mu5 = M1pp = N1pp = None
        C3 = M1p + N1p
        M1, N1 = M1p, N1p
    else:
        mu5 = (alpha * m1 + mu2) / gap
        M1pp = alpha * m1 / gap
        N1pp = mu2 / gap
        C3 = min(mu5, M1p + N1p)
        if M1p + N1p >= M1pp + N1pp:
            branch = "double-prime"
            M1, N1 = M1pp, N1pp
        else:
            branch = "prime"
            M1, N1 = M1p, N1p
    values = {
        "n": n,
        "K": K,
        "q": q,
        "alpha": alpha,
        "mu1": m1,
        "mu2": mu2,
        "mu3": mu3,
        "mu4": mu4,
        "mu5": mu5,
        "C3": C3,
        "M1p": M1p,
        "N1p": N1p,
        "M1pp": M1pp,
        "N1pp": N1pp,
        "M1": M1,
        "N1": N1,
        "lipschitz": M1 + N1,
        "branch": branch,
    }
    return ConstantsReport(values=values, meta={"q_model": inp.q_label})
