"""Cube partitions of a domain and the lattice sum nu_bar.

Cells are the closed cubes ``prod_j [k_j eps, (k_j + 1) eps]``. Geometry is
done in units of ``eps`` with integer coordinates and an exact rational
``eps``, so membership tests on the boundary are decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numba
import numpy as np

from .quadrature import QuadSpec, integrate_finite
from .specfun import Direction, check_alpha, zeta_one_plus

__all__ = [
    "Interval",
    "Ball",
    "Square",
    "HalfSpaceTest",
    "DomainShape",
    "CellGrid",
    "CellCapError",
    "DEFAULT_CELL_CAP",
    "build_grid",
    "exact_eps",
    "norm_k",
    "nu_bar",
    "nu_bar_tail_lower",
]

DEFAULT_CELL_CAP = 20_000


@dataclass(frozen=True)
class Interval:
    """The interval (-1, 1)."""

    d: int = field(default=1, init=False)
    volume: float = field(default=2.0, init=False)


@dataclass(frozen=True)
class Ball:
    """Open unit ball in dimension ``d``."""

    d: int = 2

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be positive")

    @property
    def volume(self) -> float:
        return math.pi ** (self.d / 2) / math.gamma(self.d / 2 + 1)


@dataclass(frozen=True)
class Square:
    """The open square (-1, 1)^2."""

    d: int = field(default=2, init=False)
    volume: float = field(default=4.0, init=False)


@dataclass(frozen=True)
class HalfSpaceTest:
    """Unbounded half-space ``x_1 < 0``; only useful to exercise the cell cap."""

    d: int = 2
    volume: float = field(default=math.inf, init=False)


DomainShape = Union[Interval, Ball, Square, HalfSpaceTest]


class CellCapError(ValueError):
    """The grid would have more cells than the configured cap."""


def exact_eps(eps: float | Fraction) -> Fraction:
    """Rational value of a mesh size, recovering e.g. 1/25 from 0.04."""
    if isinstance(eps, Fraction):
        return eps
    if not eps > 0:
        raise ValueError("eps must be positive")
    approx = Fraction(eps).limit_denominator(10**9)
    if abs(float(approx) - eps) <= 4 * math.ulp(eps):
        return approx
    return Fraction(eps)


@dataclass(frozen=True)
class CellGrid:
    shape: DomainShape
    eps_exact: Fraction
    cells: np.ndarray  # (n, d) integer lower corners in units of eps
    inside: np.ndarray  # (n,) closed cell contained in the open domain

    @property
    def d(self) -> int:
        return self.cells.shape[1]

    @property
    def eps(self) -> float:
        return float(self.eps_exact)

    def __len__(self) -> int:
        return self.cells.shape[0]

    def kappa(self, p: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.cells[p])

    def index_of(self, k) -> int:
        return self._lookup[tuple(int(v) for v in k)]

    @property
    def _lookup(self) -> dict:
        cache = self.__dict__.get("_lookup_cache")
        if cache is None:
            cache = {tuple(int(v) for v in row): i for i, row in enumerate(self.cells)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache

    def contains(self, x) -> bool:
        """Whether the point ``x`` lies in one of the listed closed cells."""
        k = np.floor(np.asarray(x, dtype=float) / self.eps).astype(int)
        return tuple(int(v) for v in k) in self._lookup


def _nearest_far(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # per-coordinate |.| of the cell point nearest to / farthest from 0
    return np.maximum(k, -k - 1), np.maximum(k + 1, -k)


def _below(sq_units: np.ndarray, eps: Fraction, bound: int = 1) -> np.ndarray:
    # sq_units * eps^2 < bound^2, exactly
    return sq_units * eps.numerator**2 < (bound * eps.denominator) ** 2


def build_grid(shape: DomainShape, eps: float | Fraction, cap: int = DEFAULT_CELL_CAP) -> CellGrid:
    """All closed cells meeting the open domain, in lexicographic order."""
    e = exact_eps(eps)
    d = shape.d
    if shape.volume / float(e) ** d > cap:
        raise CellCapError(
            f"eps = {float(e):g} needs more than the cell cap of {cap} cells for {shape!r}"
        )
    reach = math.ceil(1 / e) + 1
    axis = np.arange(-reach, reach, dtype=np.int64)
    cand = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    near, far = _nearest_far(cand)
    if isinstance(shape, (Interval, Ball)):
        hit = _below((near**2).sum(axis=1), e)
        inside = _below((far**2).sum(axis=1), e)
    elif isinstance(shape, Square):
        hit = _below(near.max(axis=1) ** 2, e)
        inside = _below(far.max(axis=1) ** 2, e)
    else:
        raise TypeError(f"unsupported shape {shape!r}")
    cells = cand[hit]
    if len(cells) > cap:
        raise CellCapError(f"{len(cells)} cells exceed the cell cap of {cap}")
    return CellGrid(shape, e, cells, inside[hit])


def norm_k(k) -> float:
    """Shifted Euclidean norm ``sqrt(sum (|k_j| + 1)^2)``."""
    k = np.atleast_1d(np.asarray(k))
    return float(np.sqrt(((np.abs(k) + 1.0) ** 2).sum()))


@numba.njit(cache=True)
def _partial_sum_2d(top, s):
    # sum over 1 <= m1, m2 <= top of w(m1) w(m2) (m1^2 + m2^2)^(-s/2),
    # w(1) = 1, w(m) = 2 otherwise; rows summed from the small end of each term
    total = 0.0
    h = -0.5 * s
    for m1 in range(top, 0, -1):
        row = 0.0
        for m2 in range(top, m1, -1):
            row += (m1 * m1 + m2 * m2) ** h * (1.0 if m2 == 1 else 2.0)
        row *= 2.0
        row += (2.0 * m1 * m1) ** h * (1.0 if m1 == 1 else 2.0)
        total += row * (1.0 if m1 == 1 else 2.0)
    return total


def _partial_sum(d: int, alpha: float, R: int) -> float:
    s = d + alpha
    top = R + 1
    if d == 1:
        m = np.arange(top, 1, -1, dtype=np.float64)
        return 1.0 + 2.0 * math.fsum(m**-s)
    if d == 2:
        return float(_partial_sum_2d(top, s))
    m = np.arange(1, top + 1, dtype=np.float64)
    w = np.where(m == 1, 1.0, 2.0)
    sq = np.zeros((top,) * d)
    wt = np.ones((top,) * d)
    for j in range(d):
        shp = [1] * d
        shp[j] = top
        sq = sq + (m**2).reshape(shp)
        wt = wt * w.reshape(shp)
    return float((wt * sq ** (-s / 2)).sum())


def nu_bar_tail_lower(d: int, alpha: float, R: int) -> float:
    """Certified lower bound for the part of nu_bar with ``max |k_j| > R``.

    Each term ``|m|^-s`` (``m_j = |k_j| + 1``) dominates the integral of
    ``|x|^-s`` over the unit cube ``[m, m + 1]``; only cubes with every
    ``m_j >= 2`` (weight ``2^d``) are kept, which can only lower the bound.
    """
    s = d + alpha
    big = R + 2
    if d == 1:
        return 2.0 * big ** (1 - s) / (s - 1)
    if d != 2:
        return 0.0
    spec = QuadSpec(abs_tol=0.0, rel_tol=1e-12, max_subdivisions=500)
    h_inf = math.sqrt(math.pi) * math.gamma((s - 1) / 2) / (2 * math.gamma(s / 2))

    def h_tail(c: float) -> float:
        # int_c^inf (1 + t^2)^(-s/2) dt
        if c == 0:
            return h_inf
        return h_inf - integrate_finite(lambda t: (1 + t * t) ** (-s / 2), 0.0, c, spec).value

    def strip(lo_inner: float) -> float:
        # int_{x >= big} int_{y >= lo_inner} (x^2 + y^2)^(-s/2) dy dx
        #   = int_{x >= big} x^(-1-alpha) h_tail(lo_inner / x) dx,
        # and x = big * w^(-1/alpha) makes the outer integrand bounded on (0, 1]
        def outer(w):
            return np.array([h_tail(lo_inner * wi ** (1 / alpha) / big) for wi in np.atleast_1d(w)])

        return big**-alpha / alpha * integrate_finite(outer, 0.0, 1.0, spec).value

    region = 2.0 * strip(2.0) - strip(float(big))
    return 4.0 * region * (1.0 - 1e-9)


@lru_cache(maxsize=64)
def nu_bar(
    d: int,
    alpha: float,
    mode: str = "truncated",
    R: int = 10_000,
    tail_correction: bool = False,
) -> float:
    """Lattice sum ``sum_{k in Z^d} ||k||^-(d + alpha)``, approximated from below.

    ``mode="exact_1d"`` uses ``2 zeta(1 + alpha) - 1`` with zeta taken from
    below. ``mode="truncated"`` sums over ``max |k_j| <= R``; every omitted
    term is positive, so the partial sum is a lower bound, and
    ``tail_correction`` adds the certified lower bound of the omitted tail.
    """
    alpha = check_alpha(alpha)
    if mode == "exact_1d":
        if d != 1:
            raise ValueError("exact_1d mode is only available for d = 1")
        return 2.0 * zeta_one_plus(alpha, Direction.FROM_BELOW) - 1.0
    if mode != "truncated":
        raise ValueError(f"unknown mode {mode!r}")
    if R < 1:
        raise ValueError("R must be at least 1")
    # shave rounding of the long positive sum so the result stays below
    total = _partial_sum(d, alpha, R) * (1.0 - 1e-12)
    if tail_correction:
        total += nu_bar_tail_lower(d, alpha, R)
    return total
