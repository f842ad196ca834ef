"""Eigenvalues of the fractional Laplacian on bounded domains.

Two-term asymptotics for the interval, approximate eigenfunctions, and
certified lower and upper eigenvalue bounds from cell discretisations.
"""

from .asymptotics import ApproxEigenfunction, lambda_tilde, q_glue
from .eigensolver import SymmetricMatrix, SymmetricToeplitz, eig_max_rayleigh, eigs_all
from .grid import Ball, CellGrid, Interval, Square, build_grid, nu_bar
from .halfline import HalfLineKernel
from .lower_bounds import LowerBoundResult, lower_bound_sequence, toeplitz_symbol
from .quadrature import QuadResult, QuadSpec, integrate_finite, integrate_semiinfinite
from .specfun import AlphaParams, c_alpha, c_d_alpha, zeta_one_plus
from .upper_bounds import GreenBallEvaluator, UpperBoundResult, lambda1_upper

__all__ = [
    "AlphaParams",
    "ApproxEigenfunction",
    "Ball",
    "CellGrid",
    "GreenBallEvaluator",
    "HalfLineKernel",
    "Interval",
    "LowerBoundResult",
    "QuadResult",
    "QuadSpec",
    "Square",
    "SymmetricMatrix",
    "SymmetricToeplitz",
    "UpperBoundResult",
    "build_grid",
    "c_alpha",
    "c_d_alpha",
    "eig_max_rayleigh",
    "eigs_all",
    "integrate_finite",
    "integrate_semiinfinite",
    "lambda1_upper",
    "lambda_tilde",
    "lower_bound_sequence",
    "nu_bar",
    "q_glue",
    "toeplitz_symbol",
    "zeta_one_plus",
]
