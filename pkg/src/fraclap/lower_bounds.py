"""Certified lower bounds for the eigenvalues of the fractional Laplacian.

The quadratic form is replaced by a smaller one that only sees cell
averages. Its spectrum consists of the eigenvalues of a finite matrix ``V``
below a cap ``c_{d,alpha} eps^-alpha nu_bar``, followed by the cap itself.
Every quantity that enters ``V`` (zeta and the lattice sum ``nu_bar``) is
approximated from below, which can only lower the bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eigensolver import DEFAULT_TOL, SymmetricMatrix, SymmetricToeplitz, eigs_all
from .grid import (
    DEFAULT_CELL_CAP,
    Ball,
    CellCapError,
    CellGrid,
    DomainShape,
    Interval,
    build_grid,
    nu_bar,
)
from .quadrature import QuadSpec, QuadratureError, integrate_finite, integrate_semiinfinite
from .specfun import Direction, c_alpha, c_d_alpha, check_alpha, gamma_fn, zeta_one_plus

__all__ = [
    "LowerBoundResult",
    "assemble_V_interval",
    "assemble_V_general",
    "lower_bound_sequence",
    "nu_bar_for",
    "toeplitz_symbol",
    "symbol_max",
]

SYMBOL_QUAD = QuadSpec(abs_tol=1e-14, rel_tol=1e-13, max_subdivisions=2000)


@dataclass(frozen=True)
class LowerBoundResult:
    alpha: float
    eps: float
    cap: float
    values: np.ndarray  # lambda_{n,eps} for n = 1..n_max
    matrix_order: int
    nu_bar: float
    shape: DomainShape = field(default_factory=Interval)
    eigenvalues: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_max(self) -> int:
        return len(self.values)

    def rows(self) -> list[tuple[int, float, float]]:
        """``(n, lower bound, cap)`` per index."""
        return [(n, float(v), self.cap) for n, v in enumerate(self.values, start=1)]


def assemble_V_interval(alpha: float, N: int, cap: int = DEFAULT_CELL_CAP) -> SymmetricToeplitz:
    """Toeplitz matrix of the cell-averaged form on (-1, 1) with ``eps = 2 / N``."""
    alpha = check_alpha(alpha)
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    N = int(N)
    if N > cap:
        raise CellCapError(f"N = {N} exceeds the cell cap of {cap}")
    eps = 2.0 / N
    scale = c_alpha(alpha) * eps**-alpha
    col = np.empty(N)
    col[0] = 2.0 * scale * (zeta_one_plus(alpha, Direction.FROM_BELOW) - 1.0)
    col[1:] = -scale * np.arange(2.0, N + 1.0) ** (-1.0 - alpha)
    return SymmetricToeplitz(col)


def assemble_V_general(grid: CellGrid, alpha: float, nu_bar_value: float) -> SymmetricMatrix:
    """Dense matrix of the cell-averaged form on an arbitrary cell set.

    ``nu_bar_value`` should approximate the lattice sum from below.
    """
    alpha = check_alpha(alpha)
    d = grid.d
    s = d + alpha
    scale = c_d_alpha(d, alpha) * grid.eps**-alpha
    k = grid.cells.astype(np.float64)
    sq = np.zeros((len(grid), len(grid)))
    for j in range(d):
        sq += np.square(np.abs(k[:, j, None] - k[None, :, j]) + 1.0)
    v = -scale * sq ** (-s / 2.0)
    np.fill_diagonal(v, scale * (nu_bar_value - d ** (-s / 2.0)))
    return SymmetricMatrix.from_dense(v, check=False)


def nu_bar_for(d: int, alpha: float, R: int = 10_000) -> float:
    """From-below lattice sum as used by the lower-bound pipeline."""
    if d == 1:
        return nu_bar(1, alpha, mode="exact_1d")
    return nu_bar(d, alpha, mode="truncated", R=R, tail_correction=True)


def lower_bound_sequence(
    alpha: float,
    shape: DomainShape,
    eps: float,
    n_max: int,
    tol: float = DEFAULT_TOL,
    cell_cap: int = DEFAULT_CELL_CAP,
    R: int = 10_000,
) -> LowerBoundResult:
    """``lambda_{n,eps}`` for ``n = 1..n_max``.

    The n-th value is the n-th eigenvalue of ``V`` if ``n`` does not exceed
    the matrix order and the eigenvalue does not exceed the cap, and the cap
    otherwise.
    """
    alpha = check_alpha(alpha)
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    grid = build_grid(shape, eps, cell_cap)
    d = grid.d
    nb = nu_bar_for(d, alpha, R)
    eps_f = grid.eps
    cap = c_d_alpha(d, alpha) * eps_f**-alpha * nb
    if isinstance(shape, Interval) or (isinstance(shape, Ball) and d == 1):
        # consecutive cells: the matrix is Toeplitz with the exact 1D lattice sum
        scale = c_alpha(alpha) * eps_f**-alpha
        order = len(grid)
        col = -scale * np.arange(1.0, order + 1.0) ** (-1.0 - alpha)
        col[0] = scale * (nb - 1.0)
        ev = eigs_all(SymmetricToeplitz(col), tol)
    else:
        ev = eigs_all(assemble_V_general(grid, alpha, nb), tol)
    values = np.full(n_max, cap)
    m = min(n_max, len(ev))
    values[:m] = np.minimum(ev[:m], cap)
    return LowerBoundResult(alpha, eps_f, cap, values, len(ev), nb, shape, ev)


def _symbol_integral(alpha: float, x: float) -> float:
    # int_0^inf t^a (e^t - cos x) / (e^{2t} - 2 e^t cos x + 1) dt, written with
    # e^{-t} so nothing overflows and the t -> 0 cancellation is explicit
    s2 = math.sin(x / 2.0) ** 2

    def ratio(t):
        # (e^t - cos x) / (e^{2t} - 2 e^t cos x + 1) times t
        em = np.exp(-t)
        one_minus = -np.expm1(-t)
        if s2 == 0.0:
            # t / (1 - e^-t) -> 1 at t = 0
            with np.errstate(invalid="ignore"):
                q = t / one_minus
            return em * np.where(t > 0, q, 1.0)
        return em * t * (one_minus + 2.0 * s2 * em) / (one_minus**2 + 4.0 * em * s2)

    def head(v):
        # t = v^(1/a) on [0, 1]: t^a dt = (t / a) dv, bounded near 0
        t = np.asarray(v, dtype=np.float64) ** (1.0 / alpha)
        return ratio(t) / alpha

    def tail(t):
        t = np.asarray(t, dtype=np.float64)
        return t ** (alpha - 1.0) * ratio(t)

    h = integrate_finite(head, 0.0, 1.0, SYMBOL_QUAD)
    r = integrate_semiinfinite(tail, 1.0, SYMBOL_QUAD)
    if not (h.converged and r.converged):
        raise QuadratureError(f"symbol integral did not converge at x = {x!r}")
    return h.value + r.value


def toeplitz_symbol(alpha: float, eps: float, x: float) -> float:
    """Symbol of the interval matrix ``V``.

    ``(2 c / eps^a) (zeta(1 + a) - sum_k cos(k x) / (1 + k)^(1 + a))``; the
    cosine series is ``(1 / Gamma(1 + a)) int_0^inf t^a (e^t - cos x) /
    (e^{2t} - 2 e^t cos x + 1) dt``.
    """
    alpha = check_alpha(alpha)
    if not 0.0 <= x <= math.pi:
        raise ValueError("x must lie in [0, pi]")
    series = _symbol_integral(alpha, x) / gamma_fn(1.0 + alpha)
    return 2.0 * c_alpha(alpha) * eps**-alpha * (zeta_one_plus(alpha) - series)


def symbol_max(alpha: float, eps: float) -> float:
    """Closed form of the symbol at ``x = pi``: ``2^(1-a) c eps^-a zeta(1 + a)``."""
    alpha = check_alpha(alpha)
    return 2.0 ** (1.0 - alpha) * c_alpha(alpha) * eps**-alpha * zeta_one_plus(alpha)
