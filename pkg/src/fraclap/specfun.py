"""Special functions and alpha-dependent constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import special

from .quadrature import DEFAULT_SPEC, QuadSpec, integrate_finite

__all__ = [
    "AlphaParams",
    "Direction",
    "check_alpha",
    "gamma_fn",
    "c_alpha",
    "c_d_alpha",
    "zeta_one_plus",
    "riesz_phi",
    "riesz_phi_array",
]


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha!r}")
    return alpha


def gamma_fn(x: float) -> float:
    """Gamma function; raises ``ValueError`` at the poles 0, -1, -2, ..."""
    if x <= 0 and float(x).is_integer():
        raise ValueError(f"gamma has a pole at {x!r}")
    return math.gamma(x)


def c_alpha(alpha: float) -> float:
    """Normalising constant of the one-dimensional fractional Laplacian."""
    return c_d_alpha(1, alpha)


def c_d_alpha(d: int, alpha: float) -> float:
    """Normalising constant of the fractional Laplacian in dimension ``d``."""
    alpha = check_alpha(alpha)
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    num = 2.0**alpha * gamma_fn((d + alpha) / 2.0)
    return num / (math.pi ** (d / 2.0) * abs(gamma_fn(-alpha / 2.0)))


@dataclass(frozen=True)
class AlphaParams:
    alpha: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", check_alpha(self.alpha))

    @property
    def beta(self) -> float:
        return 2.0 - self.alpha

    @property
    def c_alpha(self) -> float:
        return c_alpha(self.alpha)

    def c_d(self, d: int) -> float:
        return c_d_alpha(d, self.alpha)


class Direction(str, Enum):
    FROM_BELOW = "from_below"
    NEAREST = "nearest"


# Bernoulli numbers B_2, B_4, ..., B_16
_BERNOULLI = (
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510,
)
_EM_CUT = 20
_EM_TERMS = 6


@lru_cache(maxsize=512)
def _zeta_parts(s: float) -> tuple[float, float]:
    # Euler-Maclaurin for sum_{k>=1} k^-s: returns (estimate, first omitted term).
    # For k^-s the remainder has the sign of the first omitted term and is
    # no larger in magnitude.
    n = _EM_CUT
    head = math.fsum(k ** -s for k in range(1, n))
    terms = [n ** (1.0 - s) / (s - 1.0), 0.5 * n ** -s]
    rising = s  # s (s+1) ... (s+2j-2)
    for j in range(1, _EM_TERMS + 2):
        if j > 1:
            rising *= (s + 2 * j - 3) * (s + 2 * j - 2)
        term = _BERNOULLI[j - 1] / math.factorial(2 * j) * rising * n ** (-s - 2 * j + 1)
        terms.append(term)
    omitted = terms.pop()
    return head + math.fsum(terms), omitted


def zeta_one_plus(alpha: float, direction: Direction | str = Direction.NEAREST) -> float:
    """Riemann zeta at ``1 + alpha``.

    With ``direction="from_below"`` the result is guaranteed not to exceed
    the true value: the Euler-Maclaurin remainder is dropped only when it is
    known to be nonnegative, and a few ulps are shaved off for rounding.
    """
    alpha = check_alpha(alpha)
    direction = Direction(direction)
    value, omitted = _zeta_parts(1.0 + alpha)
    if direction is Direction.NEAREST:
        return value
    lower = value + min(omitted, 0.0)
    return lower * (1.0 - 8 * np.finfo(float).eps)


def riesz_phi(u: float, alpha: float, d: int, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``int_0^u s^(alpha/2 - 1) (1 + s)^(-d/2) ds`` by adaptive quadrature.

    On ``[0, min(u, 1)]`` the substitution ``s = v^(2/alpha)`` removes the
    endpoint singularity; beyond 1 the integral is taken in ``log s``.
    """
    alpha = check_alpha(alpha)
    if u < 0:
        raise ValueError("u must be nonnegative")
    if u == 0:
        return 0.0
    a = alpha / 2.0
    b = d / 2.0
    m = min(u, 1.0)
    head = integrate_finite(
        lambda v: (1.0 + v ** (1.0 / a)) ** -b, 0.0, m**a, spec
    ).value / a
    if u <= 1.0:
        return head
    tail = integrate_finite(
        lambda t: np.exp(a * t) * (1.0 + np.exp(t)) ** -b, 0.0, math.log(u), spec
    ).value
    return head + tail


def riesz_phi_array(u: np.ndarray, alpha: float, d: int) -> np.ndarray:
    """Vectorised ``riesz_phi`` through the incomplete beta function.

    With ``t = s / (1 + s)`` the integral is ``B_x(a, b - a)`` at
    ``x = u / (1 + u)``, ``a = alpha/2``, ``b = d/2``. For ``b < a`` (d = 1,
    alpha > 1) the second parameter is negative and one step of the
    recurrence ``B_x(a, c) = ((a + c)/c) B_x(a, c + 1) - x^a (1 - x)^c / c``
    brings it back into range.
    """
    alpha = check_alpha(alpha)
    u = np.asarray(u, dtype=np.float64)
    if np.any(u < 0):
        raise ValueError("u must be nonnegative")
    a = alpha / 2.0
    c = d / 2.0 - a
    x = u / (1.0 + u)
    if c > 0:
        return special.beta(a, c) * special.betainc(a, c, x)
    if c == 0:
        if d != 1:
            raise ValueError("unsupported (d, alpha) combination")
        return 2.0 * np.arcsinh(np.sqrt(u))
    upper = special.beta(a, c + 1.0) * special.betainc(a, c + 1.0, x)
    return ((a + c) / c) * upper - x**a * (1.0 + u) ** (-c) / c
