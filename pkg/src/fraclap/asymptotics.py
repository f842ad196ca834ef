"""Two-term eigenvalue asymptotics on the interval (-1, 1) and approximate eigenfunctions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, ClassVar, Sequence

import numpy as np

from .halfline import HalfLineKernel
from .quadrature import QuadSpec, QuadratureError, integrate_finite, integrate_semiinfinite
from .specfun import AlphaParams, c_alpha, check_alpha

__all__ = [
    "BAND_CONSTANT",
    "BAND_THRESHOLD_CONSTANT",
    "AsymptoticEigenvalue",
    "ApproxEigenfunction",
    "q_glue",
    "mu_n",
    "lambda_tilde",
    "phi_tilde",
    "phi_tilde_norm",
    "frac_laplacian_pointwise",
    "residual_sup",
]

BAND_CONSTANT = 30_000.0
BAND_THRESHOLD_CONSTANT = 4_000.0

POINTWISE_QUAD = QuadSpec(abs_tol=1e-10, rel_tol=1e-10, max_subdivisions=4000)


def q_glue(x):
    """C^1 cut-off with ``q = 0`` left of -1/3, ``q = 1`` right of 1/3 and ``q(x) + q(-x) = 1``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.where(
        x <= 0.0,
        4.5 * np.square(np.clip(x + 1.0 / 3.0, 0.0, None)),
        1.0 - 4.5 * np.square(np.clip(x - 1.0 / 3.0, None, 0.0)),
    )
    return float(out) if out.ndim == 0 else out


def mu_n(alpha: float, n: int) -> float:
    alpha = check_alpha(alpha)
    return n * math.pi / 2.0 - (2.0 - alpha) * math.pi / 8.0


@dataclass(frozen=True)
class AsymptoticEigenvalue:
    alpha: float
    n: int
    mu_n: float
    lambda_tilde: float
    error_band: float
    band_valid: bool


def lambda_tilde(alpha: float, n: int) -> AsymptoticEigenvalue:
    """``((n pi / 2) - (2 - alpha) pi / 8)^alpha`` with the proven error band.

    The band ``30000 (2 - alpha) / (sqrt(alpha) n)`` is only proven for
    ``n >= (4000 / alpha)^(3 / (2 alpha))``; below that ``band_valid`` is false.
    """
    alpha = check_alpha(alpha)
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    mu = mu_n(alpha, n)
    band = BAND_CONSTANT * (2.0 - alpha) / (math.sqrt(alpha) * n)
    # compare in logs: the threshold overflows floats for small alpha
    valid = math.log(n) >= 1.5 / alpha * math.log(BAND_THRESHOLD_CONSTANT / alpha)
    return AsymptoticEigenvalue(alpha, n, mu, mu**alpha, band, valid)


@dataclass
class ApproxEigenfunction:
    """``q(-x) F(mu (1 + x)) - (-1)^n q(x) F(mu (1 - x))`` on (-1, 1), zero outside.

    The sign makes the two half-line pieces agree where they overlap: the
    first eigenfunction is even, the second odd, and so on, so
    ``phi(-x) = (-1)^(n+1) phi(x)``.
    """

    n: int
    kernel: HalfLineKernel

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if not isinstance(self.kernel, HalfLineKernel):
            self.kernel = HalfLineKernel(AlphaParams(self.kernel))

    @property
    def alpha(self) -> float:
        return self.kernel.alpha

    @property
    def mu(self) -> float:
        return mu_n(self.alpha, self.n)

    @property
    def eigenvalue(self) -> float:
        return self.mu**self.alpha

    # points where the function is not smooth
    kinks: ClassVar[tuple] = (-1.0, -1.0 / 3.0, 0.0, 1.0 / 3.0, 1.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        flat = x.ravel()
        out = np.zeros_like(flat)
        inside = np.abs(flat) < 1.0
        xi = flat[inside]
        sign = 1.0 if self.n % 2 else -1.0
        val = np.zeros_like(xi)
        left = xi < 1.0 / 3.0  # q(-x) > 0
        right = xi > -1.0 / 3.0  # q(x) > 0
        k = self.kernel
        val[left] += q_glue(-xi[left]) * k.F(self.mu * (1.0 + xi[left]))
        val[right] += sign * q_glue(xi[right]) * k.F(self.mu * (1.0 - xi[right]))
        out[inside] = val
        out = out.reshape(x.shape)
        return float(out) if out.ndim == 0 else out


def phi_tilde(ef: ApproxEigenfunction, x):
    return ef(x)


def phi_tilde_norm(ef: ApproxEigenfunction, tol: float = 1e-8) -> float:
    """L2 norm of the approximate eigenfunction over (-1, 1)."""
    spec = QuadSpec(abs_tol=tol, rel_tol=tol, max_subdivisions=4000)
    # breakpoints about every half period keep the oscillation resolved
    pts = sorted(set(np.linspace(-1.0, 1.0, 4 * ef.n + 3)[1:-1]) | {-1 / 3, 0.0, 1 / 3})
    res = integrate_finite(lambda x: np.square(ef(x)), -1.0, 1.0, spec, points=pts)
    if not res.converged:
        raise QuadratureError(f"norm integral did not converge (error {res.error_estimate:.3g})")
    return math.sqrt(res.value)


def _far_side(f, lo, hi, x, alpha, kinks, spec):
    # int_lo^hi f(y) / |x - y|^(1 + alpha) dy on a finite piece, breakpoints every few units
    pts = [p for p in kinks if lo < p < hi]
    if hi - lo > 8.0:
        pts += list(np.arange(lo + 4.0, hi, 4.0))

    def integrand(y):
        return f(y) / np.abs(x - y) ** (1.0 + alpha)

    return integrate_finite(integrand, lo, hi, spec, points=pts)


def frac_laplacian_pointwise(
    f: Callable,
    x: float,
    alpha: float,
    quad: QuadSpec = POINTWISE_QUAD,
    support: tuple[float, float] | None = None,
    kinks: Sequence[float] = (),
    delta: float | None = None,
    far_limit: float | None = None,
) -> float:
    """``c_alpha pv int (f(x) - f(y)) / |x - y|^(1 + alpha) dy`` at one point.

    ``f`` vanishes outside ``support`` (whole line if ``None``) and must be
    smooth near ``x``; ``kinks`` lists points where it is not. Inside the
    radius ``delta`` the symmetrised second difference is integrated; below
    ``h0 = delta / 1000`` it is replaced by its quadratic Taylor model, which
    also avoids the cancellation in ``2 f(x) - f(x + h) - f(x - h)``.

    On an unbounded side the far field is taken to infinity unless
    ``far_limit`` is given, in which case it stops at that distance from
    ``x`` (useful for oscillating, non-decaying ``f``).
    """
    alpha = check_alpha(alpha)
    x = float(x)
    lo_s, hi_s = support if support is not None else (-math.inf, math.inf)
    kinks = [float(k) for k in kinks] + [v for v in (lo_s, hi_s) if math.isfinite(v)]
    if delta is None:
        room = min(x - lo_s, hi_s - x, 1.0)
        delta = 0.1 * room if room > 0 else 0.1
    fx = float(f(np.array([x]))[0])
    if not math.isfinite(fx):
        raise QuadratureError(f"f is not finite at x = {x!r}")

    def second_diff(h):
        h = np.asarray(h, dtype=np.float64)
        return 2.0 * fx - f(x + h) - f(x - h)

    h0 = 1e-3 * delta
    d0 = float(second_diff(np.array([h0]))[0])
    near_pts = sorted({abs(k - x) for k in kinks if h0 < abs(k - x) < delta})
    near = integrate_finite(
        lambda h: second_diff(h) / h ** (1.0 + alpha), h0, delta, quad, points=near_pts
    )
    near_small = d0 / h0**2 * h0 ** (2.0 - alpha) / (2.0 - alpha)

    far = fx * 2.0 * delta**-alpha / alpha
    results = [near]
    for side in (-1.0, 1.0):
        start = x + side * delta
        end = hi_s if side > 0 else lo_s
        if (end - start) * side <= 0:
            continue
        if math.isinf(end) and far_limit is not None:
            end = x + side * far_limit
        if math.isinf(end):
            piece = integrate_semiinfinite(
                lambda t, s=side, st=start: f(st + s * t) / np.abs(st + s * t - x) ** (1.0 + alpha),
                0.0,
                quad,
            )
        else:
            a, b = sorted((start, end))
            piece = _far_side(f, a, b, x, alpha, kinks, quad)
        results.append(piece)
        far -= piece.value
    bad = [r for r in results if not r.converged]
    if bad:
        raise QuadratureError(
            f"pointwise evaluation did not converge at x = {x!r} "
            f"(error estimate {max(r.error_estimate for r in bad):.3g})"
        )
    return c_alpha(alpha) * (near_small + near.value + far)


def residual_sup(
    ef: ApproxEigenfunction,
    sample_points: Sequence[float],
    quad: QuadSpec = POINTWISE_QUAD,
) -> float:
    """``max |A phi(x) - mu_n^alpha phi(x)|`` over the sample points."""
    pts = np.asarray(sample_points, dtype=np.float64)
    if np.any(np.abs(pts) > 0.99):
        raise ValueError("sample points must lie in [-0.99, 0.99]")
    lam = ef.eigenvalue
    worst = 0.0
    for x in pts:
        ax = frac_laplacian_pointwise(ef, x, ef.alpha, quad, support=(-1.0, 1.0), kinks=ef.kinks)
        worst = max(worst, abs(ax - lam * float(ef(x))))
    return worst
