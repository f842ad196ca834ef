"""Generalised eigenfunction of the fractional Laplacian on the half-line.

For fixed ``alpha`` the eigenfunction with eigenvalue ``lambda^alpha`` is
``F(lambda x)`` with ``F(s) = sin(s + beta pi / 8) - G(s)`` and ``G`` the
Laplace transform of a positive density ``gamma``.

Two evaluation routes are kept side by side:

* the default route works in logarithmic variables throughout. The exponent
  of ``gamma`` becomes an integral against ``1 / (2 cosh y)`` that is
  analytic in a strip, and the Laplace integral in ``x = log t`` is analytic
  in a strip as well, so plain trapezoid sums converge geometrically. The
  samples of ``t gamma(t)`` on the trapezoid grid are memoised.
* the adaptive route (``fresh=True``) evaluates the same integrals with the
  Gauss-Kronrod engine, splitting the exponent integral at ``r = 1/s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import QuadSpec, QuadratureError, integrate_finite, integrate_semiinfinite
from .specfun import AlphaParams

__all__ = [
    "HalfLineKernel",
    "gamma_density",
    "G_fn",
    "G_derivatives",
    "F_fn",
    "integral_G",
]

# trapezoid step and half-width for the exponent integral in y = log r
_EXP_STEP = 0.2
_EXP_HALF_WIDTH = 46.0
# trapezoid step for the Laplace integral in x = log t
_LAPLACE_STEP = 0.1
_TAIL_DIGITS = 36.0  # about -log(1e-16)
_X_CAP = 700.0

HALFLINE_QUAD = QuadSpec(abs_tol=1e-13, rel_tol=1e-11, max_subdivisions=4000)


def _log_expm1_ratio(z: np.ndarray) -> np.ndarray:
    # log((e^z - 1) / z), stable for all real z
    z = np.asarray(z, dtype=np.float64)
    out = np.zeros_like(z)
    big = z > 30.0
    mid = (~big) & (z != 0.0)
    zb = z[big]
    out[big] = zb + np.log1p(-np.exp(-zb)) - np.log(zb)
    out[mid] = np.log(np.expm1(z[mid]) / z[mid])
    return out


def _log_ratio(w: np.ndarray, alpha: float) -> np.ndarray:
    """``log((1 - u^alpha) / (1 - u^2))`` at ``u = e^w``.

    Written through ``(e^z - 1) / z`` so that ``u = 1`` (``w = 0``) gives the
    limit ``log(alpha / 2)`` with no cancellation nearby.
    """
    return math.log(alpha / 2.0) + _log_expm1_ratio(alpha * w) - _log_expm1_ratio(2.0 * w)


@dataclass
class HalfLineKernel:
    """Evaluator of ``gamma``, ``G``, ``G'``, ``G''`` and ``F`` for one ``alpha``."""

    params: AlphaParams
    quad: QuadSpec = HALFLINE_QUAD
    memo: bool = True
    _grid: tuple | None = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.params, AlphaParams):
            self.params = AlphaParams(self.params)
        a = self.alpha
        self._prefactor = math.sqrt(2.0 * a) * math.sin(a * math.pi / 2.0) / (2.0 * math.pi)
        self._cos = math.cos(a * math.pi / 2.0)
        y = np.arange(-_EXP_HALF_WIDTH, _EXP_HALF_WIDTH + 0.5 * _EXP_STEP, _EXP_STEP)
        self._exp_nodes = y
        self._exp_weights = _EXP_STEP / (2.0 * np.cosh(y))
        # gamma(t) ~ t^alpha at 0 and ~ t^(-1 - alpha/2) at infinity
        self.x_lo = max(-_X_CAP, -(_TAIL_DIGITS + 5.0) / a)
        self.x_hi = min(_X_CAP, 2.0 * (_TAIL_DIGITS + 5.0) / a)

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def beta(self) -> float:
        return self.params.beta

    @property
    def shift(self) -> float:
        """Phase ``beta pi / 8``."""
        return self.beta * math.pi / 8.0

    # gamma ---------------------------------------------------------------

    def _exponent_log(self, x: np.ndarray) -> np.ndarray:
        # (1/pi) int_0^inf log((1 - (r s)^a)/(1 - (r s)^2)) / (1 + r^2) dr at s = e^x
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        out = np.empty_like(x)
        step = max(1, 4_000_000 // self._exp_nodes.size)
        for i in range(0, x.size, step):
            w = x[i:i + step, None] + self._exp_nodes[None, :]
            out[i:i + step] = _log_ratio(w, self.alpha) @ self._exp_weights
        return out / math.pi

    def _log_gamma_log(self, x: np.ndarray) -> np.ndarray:
        # log gamma(e^x); s^a / (1 + s^2a - 2 s^a cos) = 1 / (2 cosh(a x) - 2 cos)
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        ax = np.abs(self.alpha * x)
        e = np.exp(-ax)
        log_frac = -ax - np.log1p(e * (e - 2.0 * self._cos))
        return math.log(self._prefactor) + log_frac + self._exponent_log(x)

    def gamma(self, s) -> np.ndarray | float:
        """Density ``gamma(s)`` for ``s > 0`` (scalar or array)."""
        arr = np.asarray(s, dtype=np.float64)
        if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
            raise ValueError("gamma is defined for finite s > 0 only")
        out = np.exp(self._log_gamma_log(np.log(arr.ravel()))).reshape(arr.shape)
        return float(out) if out.ndim == 0 else out

    def gamma_adaptive(self, s: float) -> float:
        """``gamma(s)`` with the exponent integral done by adaptive quadrature.

        The integrand in ``r`` has a removable singularity at ``r = 1/s``
        (limit ``log(alpha/2)``), so the range is split there.
        """
        s = float(s)
        if not s > 0:
            raise ValueError("gamma is defined for s > 0 only")
        a = self.alpha

        def integrand(r):
            r = np.asarray(r, dtype=np.float64)
            return _log_ratio(np.log(r * s), a) / (1.0 + r * r)

        split = 1.0 / s
        head = integrate_finite(integrand, 0.0, split, self.quad)
        tail = integrate_semiinfinite(integrand, split, self.quad)
        expo = (head.value + tail.value) / math.pi
        sa = s**a
        return self._prefactor * sa / (1.0 + sa * sa - 2.0 * sa * self._cos) * math.exp(expo)

    # Laplace transforms --------------------------------------------------

    def _memo_grid(self) -> tuple[np.ndarray, np.ndarray]:
        # (x_j, log gamma(e^{x_j})) on the trapezoid grid
        if self._grid is None or not self.memo:
            x = np.arange(self.x_lo, self.x_hi + 0.5 * _LAPLACE_STEP, _LAPLACE_STEP)
            grid = (x, self._log_gamma_log(x))
            if not self.memo:
                return grid
            self._grid = grid
        return self._grid

    def _laplace_trapezoid(self, s: np.ndarray, power: int) -> np.ndarray:
        # int_0^inf t^power gamma(t) e^{-s t} dt = int t^(power+1) gamma e^{-s t} dx
        x, log_g = self._memo_grid()
        t = np.exp(x)
        log_base = math.log(_LAPLACE_STEP) + log_g + (power + 1) * x
        s = np.atleast_1d(s)
        out = np.empty(s.shape)
        step = max(1, 2_000_000 // x.size)
        for i in range(0, s.size, step):
            out[i:i + step] = np.exp(log_base[None, :] - np.outer(s[i:i + step], t)).sum(axis=1)
        return out

    def _laplace_adaptive(self, s: float, power: int) -> float:
        # beyond s t = 60 the kernel is below 1e-26
        hi = self.x_hi if s == 0 else min(self.x_hi, math.log(60.0 / s))
        lo = min(self.x_lo, hi - 60.0)

        def integrand(x):
            x = np.asarray(x, dtype=np.float64)
            t = np.exp(x)
            return np.exp(self._log_gamma_log(x) + (power + 1) * x - s * t)

        res = integrate_finite(integrand, lo, hi, self.quad, points=[0.0] if lo < 0 < hi else ())
        if not res.converged:
            raise QuadratureError(
                f"Laplace integral did not converge at s = {s!r} "
                f"(error estimate {res.error_estimate:.3g})"
            )
        return res.value

    def _laplace(self, s, power: int, fresh: bool):
        arr = np.asarray(s, dtype=np.float64)
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValueError("need finite s >= 0")
        if fresh:
            out = np.array([self._laplace_adaptive(float(v), power) for v in arr.ravel()])
        else:
            out = self._laplace_trapezoid(arr.ravel(), power)
        out = out.reshape(arr.shape)
        return float(out) if out.ndim == 0 else out

    def G(self, s, fresh: bool = False):
        """Laplace transform of ``gamma``; ``G(0) = sin(beta pi / 8)``."""
        return self._laplace(s, 0, fresh)

    def G_derivatives(self, s, fresh: bool = False):
        """``(G'(s), G''(s))`` for ``s > 0``."""
        if np.any(np.asarray(s) <= 0):
            raise ValueError("derivatives are taken at s > 0")
        return -self._laplace(s, 1, fresh), self._laplace(s, 2, fresh)

    def F(self, s, fresh: bool = False):
        arr = np.asarray(s, dtype=np.float64)
        return np.sin(arr + self.shift) - self.G(arr, fresh)

    def integral_G(self, fresh: bool = False) -> float:
        """``int_0^inf G(s) ds``, computed as ``int_0^inf gamma(t) / t dt``."""
        if fresh:
            res = integrate_finite(
                lambda x: np.exp(self._log_gamma_log(x)), self.x_lo, self.x_hi, self.quad, points=[0.0]
            )
            return res.value
        x, log_g = self._memo_grid()
        return float(_LAPLACE_STEP * np.exp(log_g).sum())


def gamma_density(k: HalfLineKernel, s):
    return k.gamma(s)


def G_fn(k: HalfLineKernel, s, fresh: bool = False):
    return k.G(s, fresh)


def G_derivatives(k: HalfLineKernel, s, fresh: bool = False):
    return k.G_derivatives(s, fresh)


def F_fn(k: HalfLineKernel, s, fresh: bool = False):
    return k.F(s, fresh)


def integral_G(k: HalfLineKernel, fresh: bool = False) -> float:
    return k.integral_G(fresh)
