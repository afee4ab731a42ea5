"""Spectral collocation for fractional differential equations at Jacobi-Gauss-Lobatto points."""

from .birkhoff import BirkhoffBasis, birkhoff_basis, birkhoff_matrix, lower_order_matrix
from .connection import connection_matrix
from .errors import DomainError, NumericError
from .fracmat import CAPUTO, RL, FracOrder, fpsdm
from .mittag import MLParams, caputo_exp_rhs, ml_eval
from .orthopoly import JacobiParam, jacobi_eval
from .quadrature import jacobi_gauss, jacobi_gauss_lobatto, lagrange_coeffs
from .solver import (
    BCOL,
    LCOL,
    PLCOL,
    CollocationProblem,
    SolveReport,
    bicgstab,
    from_preset,
    l2_error,
    reconstruct,
    solve,
)
from .spectra import cond2_estimate, extreme_eigs, full_spectrum

__version__ = "0.1.0"

__all__ = [
    "BCOL", "CAPUTO", "LCOL", "PLCOL", "RL",
    "BirkhoffBasis", "CollocationProblem", "DomainError", "FracOrder",
    "JacobiParam", "MLParams", "NumericError", "SolveReport",
    "bicgstab", "birkhoff_basis", "birkhoff_matrix", "caputo_exp_rhs",
    "cond2_estimate", "connection_matrix", "extreme_eigs", "fpsdm",
    "from_preset", "full_spectrum", "jacobi_eval", "jacobi_gauss",
    "jacobi_gauss_lobatto", "l2_error", "lagrange_coeffs", "lower_order_matrix",
    "ml_eval", "reconstruct", "solve",
]
