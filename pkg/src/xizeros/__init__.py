"""Approximations of the Ramanujan Xi function, their zeros, and the
Dirichlet polynomials that govern them."""
from .contour import Rectangle, ZeroRecord, locate_zeros, winding_count
from .dirichlet import psi_F, psi_F_k, to_exponential_polynomial
from .numerics import DEFAULT_BUDGET, PrecisionBudget, log_gamma
from .profiles import CoefficientSequence, delta_coefficients, delta_sequence
from .xi import C_F, EvalContext, W_F, h, h_star_neg, xi_F
from .zerocount import CountReport, count_report

__version__ = "0.1.0"

__all__ = [
    "C_F", "CoefficientSequence", "CountReport", "DEFAULT_BUDGET",
    "EvalContext", "PrecisionBudget", "Rectangle", "W_F", "ZeroRecord",
    "count_report", "delta_coefficients", "delta_sequence", "h",
    "h_star_neg", "locate_zeros", "log_gamma", "psi_F", "psi_F_k",
    "to_exponential_polynomial", "winding_count", "xi_F",
]
