"""Numerical checks of the inequalities and the constants that enter them."""

from .boundary import boundary_jacobian, boundary_jacobian_bounds, correction_term, gram_ratio, lambda_integral
from .checks import (
    I2_bound_check,
    I2_value,
    I3_I4,
    gradient_bound_check,
    gradient_bounds,
    heinz_liminf_check,
    heinz_rhs,
    schwarz_bound_check,
)
from .constants import LipschitzInputs, c0, delta_n, lipschitz_constants, mu1, mu1_quadrature, q_model, t_star

__all__ = [
    "I2_bound_check",
    "I2_value",
    "I3_I4",
    "LipschitzInputs",
    "boundary_jacobian",
    "boundary_jacobian_bounds",
    "c0",
    "correction_term",
    "delta_n",
    "gradient_bound_check",
    "gradient_bounds",
    "gram_ratio",
    "heinz_liminf_check",
    "heinz_rhs",
    "lambda_integral",
    "lipschitz_constants",
    "mu1",
    "mu1_quadrature",
    "q_model",
    "schwarz_bound_check",
    "t_star",
]
