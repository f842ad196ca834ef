"""Certified upper bound for the first eigenvalue on the unit ball.

``1 / lambda_1`` is the top of the spectrum of the Green operator. Any
kernel ``g <= G_D`` that is constant on pairs of cells gives a matrix whose
largest eigenvalue is at most ``1 / lambda_1``; the Rayleigh quotient of any
vector is at most that eigenvalue, so its reciprocal bounds ``lambda_1``
from above.

Monotonicity used for the cell minorant: with ``u = p q / r^2`` and
``h(u) = (alpha - d) phi(u) - 2 u phi'(u)``, ``dG/dr`` has the sign of
``h(u)``. Since ``h(0) = 0`` and ``h'(u) = -d phi'(u) / (1 + u) < 0``, the
Green function decreases in ``r`` for every ``d`` and ``alpha``, and it
increases in ``p`` and ``q`` because ``phi`` does.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .eigensolver import eig_max_rayleigh
from .grid import DEFAULT_CELL_CAP, Ball, CellGrid, Interval, build_grid, exact_eps
from .specfun import AlphaParams, gamma_fn, riesz_phi, riesz_phi_array

__all__ = [
    "GreenBallEvaluator",
    "UpperBoundResult",
    "green_ball",
    "cell_infimum_g",
    "assemble_U",
    "default_subdivisions",
    "lambda1_upper",
    "minorant_audit",
]

_SAMPLES = 64
_ROW_BLOCK = 256


class GreenBallEvaluator:
    """Green function of the fractional Laplacian on the unit ball of R^d."""

    def __init__(self, d: int, params: AlphaParams | float):
        if int(d) != d or d < 1:
            raise ValueError("dimension must be a positive integer")
        self.d = int(d)
        self.params = params if isinstance(params, AlphaParams) else AlphaParams(params)
        a = self.params.alpha
        self.constant = gamma_fn(d / 2.0) / (
            2.0**a * math.pi ** (d / 2.0) * gamma_fn(a / 2.0) ** 2
        )

    @property
    def alpha(self) -> float:
        return self.params.alpha

    def from_pqr(self, p, q, r):
        """``C |x - y|^(alpha - d) phi(p q / r^2)`` from ``p = 1 - |x|^2``, ``q = 1 - |y|^2``, ``r = |x - y|``."""
        p, q, r = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (p, q, r)))
        a, d = self.alpha, self.d
        out = np.zeros(p.shape)
        live = (p > 0) & (q > 0)
        if np.any(live & (r <= 0)):
            if d >= a:
                raise ValueError("the Green function is infinite on the diagonal when d >= alpha")
        pos = live & (r > 0)
        pq = p[pos] * q[pos]
        rp = r[pos]
        out[pos] = self.constant * rp ** (a - d) * riesz_phi_array(pq / rp**2, a, d)
        diag = live & (r <= 0)
        if np.any(diag):
            # r^(a-d) phi(pq / r^2) -> (pq)^((a-d)/2) / ((a-d)/2) as r -> 0
            e = (a - d) / 2.0
            out[diag] = self.constant * (p[diag] * q[diag]) ** e / e
        return float(out) if out.ndim == 0 else out

    def __call__(self, x, y) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        if x.shape != (self.d,) or y.shape != (self.d,):
            raise ValueError(f"points must be {self.d}-vectors")
        p = 1.0 - float(x @ x)
        q = 1.0 - float(y @ y)
        if p <= 0 or q <= 0:
            return 0.0
        r = float(np.linalg.norm(x - y))
        if r == 0:
            return self.from_pqr(p, q, 0.0)
        # scalar path through the adaptive quadrature
        return self.constant * r ** (self.alpha - self.d) * riesz_phi(p * q / r**2, self.alpha, self.d)


def green_ball(ev: GreenBallEvaluator, x, y) -> float:
    return ev(x, y)


@dataclass(frozen=True)
class UpperBoundResult:
    alpha: float
    eps: float
    matrix_order: int
    lambda1_upper: float
    certified: bool
    rayleigh: float
    power_value: float
    d: int = 1

    def row(self) -> tuple[float, float, float, bool]:
        return (self.alpha, self.eps, self.lambda1_upper, self.certified)


def _far_radius_sq(k: np.ndarray) -> np.ndarray:
    # squared distance (units of eps) from 0 to the farthest corner of each cell
    far = np.maximum(k + 1, -k).astype(np.float64)
    return np.square(far).sum(axis=-1)


def _pair_r_range(k: np.ndarray, l: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # (min, max) distance between points of two cells, in units of eps
    gap = np.abs(k - l).astype(np.float64)
    r_max = np.sqrt(np.square(gap + 1.0).sum(axis=-1))
    r_min = np.sqrt(np.square(np.clip(gap - 1.0, 0.0, None)).sum(axis=-1))
    return r_min, r_max


def cell_infimum_g(
    ev: GreenBallEvaluator, cell_k, cell_l, eps: float, strategy: str = "monotone"
) -> float:
    """Lower bound for ``inf G(u, v)`` over ``u`` in cell ``k``, ``v`` in cell ``l``.

    ``p`` and ``q`` are replaced by their minima over the cells. With the
    default ``"monotone"`` strategy ``r`` is replaced by its maximum, which is
    rigorous because ``G`` decreases in ``r``. The ``"sample"`` strategy takes
    the minimum over 64 values of ``r`` in its range instead, and
    ``"corners"`` the exact Green function minimised over corner pairs; both
    are kept for comparison and are not certified minorants.
    """
    k = np.atleast_1d(np.asarray(cell_k, dtype=np.int64))
    l = np.atleast_1d(np.asarray(cell_l, dtype=np.int64))
    if k.shape != (ev.d,) or l.shape != (ev.d,):
        raise ValueError(f"cell indices must be {ev.d}-vectors")
    if not eps > 0:
        raise ValueError("eps must be positive")
    p = 1.0 - eps**2 * _far_radius_sq(k)
    q = 1.0 - eps**2 * _far_radius_sq(l)
    if p <= 0 or q <= 0:
        return 0.0
    r_min, r_max = _pair_r_range(k, l)
    if strategy == "monotone":
        return ev.from_pqr(p, q, eps * r_max)
    if strategy == "sample":
        r = eps * np.linspace(max(r_min, 1e-12), r_max, _SAMPLES)
        return float(np.min(ev.from_pqr(p, q, r)))
    if strategy == "corners":
        return float(_block_corners(ev, k[None, :], l[None, :], eps)[0, 0])
    raise ValueError(f"unknown strategy {strategy!r}")


def _interior(grid: CellGrid) -> np.ndarray:
    return grid.cells[grid.inside]


def _block_monotone(ev, ki, kj, eps, m):
    # min over sub-cell pairs (side eps/m) of the monotone minorant
    fe = eps / m
    best = None
    for a in itertools.product(range(m), repeat=ev.d):
        ka = ki * m + np.array(a)
        p = 1.0 - fe**2 * _far_radius_sq(ka)
        for b in itertools.product(range(m), repeat=ev.d):
            kb = kj * m + np.array(b)
            q = 1.0 - fe**2 * _far_radius_sq(kb)
            _, r_max = _pair_r_range(ka[:, None, :], kb[None, :, :])
            g = ev.from_pqr(p[:, None], q[None, :], fe * r_max)
            best = g if best is None else np.minimum(best, g)
    return best


def _block_sample(ev, ki, kj, eps):
    p = 1.0 - eps**2 * _far_radius_sq(ki)
    q = 1.0 - eps**2 * _far_radius_sq(kj)
    r_min, r_max = _pair_r_range(ki[:, None, :], kj[None, :, :])
    best = np.full(r_max.shape, np.inf)
    for t in np.linspace(0.0, 1.0, _SAMPLES):
        r = eps * np.maximum(r_min + t * (r_max - r_min), 1e-12)
        best = np.minimum(best, ev.from_pqr(p[:, None], q[None, :], r))
    return best


def _block_corners(ev, ki, kj, eps):
    # exact Green function at every pair of cell corners, coincident corners skipped
    best = np.full((len(ki), len(kj)), np.inf)
    for a in itertools.product((0, 1), repeat=ev.d):
        x = (ki + np.array(a)) * eps
        p = 1.0 - np.square(x).sum(axis=1)
        for b in itertools.product((0, 1), repeat=ev.d):
            y = (kj + np.array(b)) * eps
            q = 1.0 - np.square(y).sum(axis=1)
            r = np.sqrt(np.square(x[:, None, :] - y[None, :, :]).sum(axis=2))
            hit = r > 0
            g = np.full(r.shape, np.inf)
            pp = np.broadcast_to(p[:, None], r.shape)[hit]
            qq = np.broadcast_to(q[None, :], r.shape)[hit]
            g[hit] = ev.from_pqr(pp, qq, r[hit])
            best = np.minimum(best, g)
    return best


STRATEGIES = ("monotone", "sample", "corners")


def assemble_U(
    ev: GreenBallEvaluator, grid: CellGrid, strategy: str = "monotone", subdivisions: int = 1
) -> np.ndarray:
    """``U_ij = eps^d g(k_i, k_j)`` over the cells that lie inside the ball.

    With ``strategy="monotone"`` each cell is split into ``subdivisions^d``
    sub-cells and ``g`` is the smallest monotone minorant over sub-cell
    pairs, which tightens the bound towards the true infimum while staying
    rigorous. ``"sample"`` (64 values of ``r``) and ``"corners"`` (exact
    Green function at corner pairs) are heuristics and are not certified.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if int(subdivisions) != subdivisions or subdivisions < 1:
        raise ValueError("subdivisions must be a positive integer")
    cells = _interior(grid)
    eps = grid.eps
    n = len(cells)
    u = np.empty((n, n))
    # g(k, l) = g(l, k): fill the upper block triangle and mirror it
    for i0 in range(0, n, _ROW_BLOCK):
        ki = cells[i0:i0 + _ROW_BLOCK]
        kj = cells[i0:]
        if strategy == "monotone":
            blk = _block_monotone(ev, ki, kj, eps, int(subdivisions))
        elif strategy == "sample":
            blk = _block_sample(ev, ki, kj, eps)
        else:
            blk = _block_corners(ev, ki, kj, eps)
        u[i0:i0 + _ROW_BLOCK, i0:] = blk
        u[i0:, i0:i0 + _ROW_BLOCK] = blk.T
    return eps**ev.d * u


def default_subdivisions(d: int) -> int:
    """Sub-cell refinement used by default: the plain minorant is loose in 2D."""
    return 3 if d >= 2 else 1


def lambda1_upper(
    shape,
    alpha: float,
    eps: float,
    strategy: str = "monotone",
    subdivisions: int | None = None,
    iters: int = 500,
    tol: float = 1e-12,
    cell_cap: int = DEFAULT_CELL_CAP,
) -> UpperBoundResult:
    """Upper bound ``1 / rayleigh(U)`` for the first eigenvalue of the unit ball."""
    if isinstance(shape, Interval):
        d = 1
    elif isinstance(shape, Ball):
        d = shape.d
    else:
        raise TypeError("upper bounds are available for the unit ball (interval or disk) only")
    params = AlphaParams(alpha)
    ev = GreenBallEvaluator(d, params)
    grid = build_grid(shape if isinstance(shape, Ball) else Interval(), exact_eps(eps), cell_cap)
    if not np.any(grid.inside):
        raise ValueError(f"eps = {eps!r} leaves no cell inside the domain")
    if subdivisions is None:
        subdivisions = default_subdivisions(d)
    u = assemble_U(ev, grid, strategy, subdivisions)
    # a Perron vector is even and peaked in the middle; start close to it
    c = (grid.cells[grid.inside] + 0.5) * grid.eps
    x0 = np.clip(1.0 - np.square(c).sum(axis=1), 1e-3, None) ** (alpha / 2.0)
    value, rq = eig_max_rayleigh(u, iters=iters, tol=tol, x0=x0)
    certified = strategy == "monotone"
    return UpperBoundResult(params.alpha, grid.eps, u.shape[0], 1.0 / rq, certified, rq, value, d)


def minorant_audit(
    ev: GreenBallEvaluator,
    grid: CellGrid,
    n_pairs: int,
    rng: np.random.Generator,
    strategy: str = "monotone",
    neighbours_only: bool = False,
) -> tuple[int, int]:
    """Check ``g(k, l) <= G(u, v)`` at random points of random interior cell pairs.

    Returns ``(violations, pairs checked)``. With ``neighbours_only`` the
    second cell is a random neighbour (including diagonal ones) of the first.
    """
    cells = _interior(grid)
    eps = grid.eps
    d = ev.d
    i = rng.integers(len(cells), size=n_pairs)
    ki = cells[i]
    if neighbours_only:
        step = rng.integers(-1, 2, size=(n_pairs, d))
        kl = ki + step
        lookup = {tuple(c) for c in cells.tolist()}
        keep = np.array([tuple(c) in lookup for c in kl.tolist()])
        ki, kl = ki[keep], kl[keep]
    else:
        kl = cells[rng.integers(len(cells), size=n_pairs)]
    x = (ki + rng.random(ki.shape)) * eps
    y = (kl + rng.random(kl.shape)) * eps
    p = 1.0 - np.square(x).sum(axis=1)
    q = 1.0 - np.square(y).sum(axis=1)
    r = np.linalg.norm(x - y, axis=1)
    exact = ev.from_pqr(p, q, r)
    pk = 1.0 - eps**2 * _far_radius_sq(ki)
    pl = 1.0 - eps**2 * _far_radius_sq(kl)
    r_min, r_max = _pair_r_range(ki, kl)
    if strategy == "monotone":
        g = ev.from_pqr(pk, pl, eps * r_max)
    else:
        g = np.array([cell_infimum_g(ev, a, b, eps, strategy) for a, b in zip(ki, kl)])
    return int(np.count_nonzero(g > exact)), len(ki)
