"""Dense real-symmetric eigenvalues.

Householder reduction to tridiagonal form followed by implicit-shift QL,
a cyclic Jacobi solver kept as an independent oracle, and a power iteration
whose final Rayleigh quotient is a guaranteed under-estimate of the largest
eigenvalue.

The kernels are compiled with numba and run serially, so results are
bit-reproducible from run to run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

__all__ = [
    "EigenConvergenceError",
    "SymmetricMatrix",
    "SymmetricToeplitz",
    "eigs_all",
    "eigs_toeplitz",
    "eigs_jacobi",
    "eig_max_rayleigh",
    "tridiagonalize",
]

DEFAULT_TOL = 1e-10


class EigenConvergenceError(RuntimeError):
    """The QL or Jacobi iteration did not converge within its sweep budget."""


@dataclass(frozen=True)
class SymmetricMatrix:
    """Real symmetric matrix stored as its packed lower triangle (row-major)."""

    order: int
    packed: np.ndarray

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError("order must be positive")
        n = self.order
        if self.packed.shape != (n * (n + 1) // 2,):
            raise ValueError("packed storage has the wrong length")
        if not np.all(np.isfinite(self.packed)):
            raise ValueError("matrix entries must be finite")

    @classmethod
    def from_dense(cls, a: np.ndarray, check: bool = True) -> SymmetricMatrix:
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        if check and not np.array_equal(a, a.T):
            raise ValueError("matrix is not symmetric")
        rows, cols = np.tril_indices(a.shape[0])
        return cls(a.shape[0], np.ascontiguousarray(a[rows, cols]))

    def to_dense(self) -> np.ndarray:
        n = self.order
        out = np.empty((n, n))
        rows, cols = np.tril_indices(n)
        out[rows, cols] = self.packed
        out[cols, rows] = self.packed
        return out

    def spectral_scale(self) -> float:
        """Max absolute row sum; an upper bound on the spectral norm."""
        return float(np.abs(self.to_dense()).sum(axis=1).max())


@dataclass(frozen=True)
class SymmetricToeplitz:
    """Symmetric Toeplitz matrix given by its first column."""

    column: np.ndarray

    def __post_init__(self) -> None:
        col = np.asarray(self.column, dtype=np.float64)
        if col.ndim != 1 or col.size < 1:
            raise ValueError("first column must be a non-empty vector")
        if not np.all(np.isfinite(col)):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "column", col)

    @property
    def order(self) -> int:
        return self.column.size

    def to_dense(self) -> np.ndarray:
        n = self.order
        idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
        return self.column[idx]

    def to_symmetric(self) -> SymmetricMatrix:
        return SymmetricMatrix.from_dense(self.to_dense(), check=False)


# ---------------------------------------------------------------------------
# compiled kernels


@numba.njit(cache=True)
def _tred(a):
    # Householder reduction of the lower triangle of `a` (destroyed).
    # Returns diagonal d and subdiagonal e (e[0] unused).
    n = a.shape[0]
    d = np.zeros(n)
    e = np.zeros(n)
    p = np.zeros(n)
    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        if l > 0:
            scale = 0.0
            for k in range(l + 1):
                scale += abs(a[i, k])
            if scale == 0.0:
                e[i] = a[i, l]
            else:
                for k in range(l + 1):
                    a[i, k] /= scale
                    h += a[i, k] * a[i, k]
                f = a[i, l]
                g = -math.sqrt(h) if f >= 0.0 else math.sqrt(h)
                e[i] = scale * g
                h -= f * g
                a[i, l] = f - g
                # p = A[0:l+1, 0:l+1] u / h from the lower triangle, row-contiguous
                for j in range(l + 1):
                    p[j] = 0.0
                for j in range(l + 1):
                    uj = a[i, j]
                    s = 0.0
                    for k in range(j):
                        ajk = a[j, k]
                        s += ajk * a[i, k]
                        p[k] += ajk * uj
                    p[j] += s + a[j, j] * uj
                f = 0.0
                for j in range(l + 1):
                    p[j] /= h
                    f += p[j] * a[i, j]
                hh = f / (h + h)
                for j in range(l + 1):
                    p[j] -= hh * a[i, j]
                for j in range(l + 1):
                    fj = a[i, j]
                    gj = p[j]
                    for k in range(j + 1):
                        a[j, k] -= fj * p[k] + gj * a[i, k]
        else:
            e[i] = a[i, l]
        d[i] = h
    for i in range(n):
        d[i] = a[i, i]
    return d, e


@numba.njit(cache=True)
def _tql(d, e, thresh, max_iter):
    # Implicit QL on (d, e) in place; e[i] couples d[i-1] and d[i] on entry.
    # Returns 0 on success, -1 on non-convergence.
    n = d.size
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    eps = 2.220446049250313e-16
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd or abs(e[m]) <= thresh:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return -1
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


@numba.njit(cache=True)
def _jacobi(a, tol, max_sweeps):
    # Cyclic Jacobi on a full symmetric copy; returns (diag, sweeps or -1).
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if math.sqrt(off) <= tol:
            return np.diag(a).copy(), sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
    return np.diag(a).copy(), -1


# ---------------------------------------------------------------------------
# public API


def _as_dense(m) -> np.ndarray:
    if isinstance(m, (SymmetricMatrix, SymmetricToeplitz)):
        return m.to_dense()
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    return a


def tridiagonalize(m) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal similarity reduction; returns (diagonal, off-diagonal)."""
    a = np.ascontiguousarray(_as_dense(m), dtype=np.float64)
    d, e = _tred(a)
    return d, e[1:].copy()


def eigs_all(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending.

    ``m`` may be a :class:`SymmetricMatrix`, a :class:`SymmetricToeplitz`
    or a dense symmetric array (only its lower triangle is read). Each
    eigenvalue is accurate to about ``tol`` times the max row sum.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(m, SymmetricToeplitz):
        return eigs_toeplitz(m, tol)
    a = np.ascontiguousarray(_as_dense(m), dtype=np.float64)
    n = a.shape[0]
    if n < 1:
        raise ValueError("empty matrix")
    low = np.tril(a)
    scale = float((np.abs(low).sum(axis=1) + np.abs(np.tril(a, -1)).sum(axis=0)).max())
    if n == 1:
        return a[0].copy()
    d, e = _tred(a)
    # zeroing |e| <= thresh perturbs every eigenvalue by at most thresh
    thresh = 1e-3 * tol * scale
    status = _tql(d, e, thresh, 60)
    if status != 0:
        raise EigenConvergenceError(f"implicit QL did not converge (order {n})")
    return np.sort(d)


def eigs_toeplitz(t: SymmetricToeplitz, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalues of a symmetric Toeplitz matrix, ascending.

    A symmetric Toeplitz matrix commutes with the exchange matrix, so it
    splits into its even and odd parts; each half is solved by
    :func:`eigs_all`, which cuts the dense work by about a factor of four.
    """
    n = t.order
    if n < 4:
        return eigs_all(t.to_dense(), tol)
    full = t.to_dense()
    k = n // 2
    a = full[:k, :k]
    bj = full[:k, n - k :][:, ::-1]
    odd_part = a - bj
    if n % 2 == 0:
        even_part = a + bj
    else:
        u = full[:k, k]
        even_part = np.empty((k + 1, k + 1))
        even_part[:k, :k] = a + bj
        even_part[:k, k] = math.sqrt(2.0) * u
        even_part[k, :k] = math.sqrt(2.0) * u
        even_part[k, k] = full[k, k]
    vals = np.concatenate([eigs_all(even_part, tol), eigs_all(odd_part, tol)])
    return np.sort(vals)


def eigs_jacobi(m, tol: float = 1e-13, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi eigenvalues (test oracle, intended for order <= 200)."""
    a = np.array(_as_dense(m), dtype=np.float64)
    a = np.tril(a) + np.tril(a, -1).T
    scale = float(np.abs(a).sum(axis=1).max()) or 1.0
    vals, sweeps = _jacobi(a, tol * scale, max_sweeps)
    if sweeps < 0:
        raise EigenConvergenceError("Jacobi sweeps exhausted")
    return np.sort(vals)


def eig_max_rayleigh(
    m, iters: int = 500, tol: float = 1e-12, x0: np.ndarray | None = None
) -> tuple[float, float]:
    """Largest eigenvalue of a symmetric matrix with nonnegative entries.

    Power iteration from a positive start vector. Returns ``(value,
    certified_lower)`` where ``certified_lower`` is the Rayleigh quotient of
    the final iterate; it never exceeds the true largest eigenvalue, whether
    or not the iteration converged. ``value`` is ``|Ax|/|x|``, which lies
    between the Rayleigh quotient and the largest eigenvalue.
    """
    a = _as_dense(m)
    if np.any(a < 0):
        raise ValueError("entries must be nonnegative")
    n = a.shape[0]
    if not np.any(a):
        return 0.0, 0.0
    x = np.ones(n) if x0 is None else np.array(x0, dtype=np.float64)
    x /= np.linalg.norm(x)
    rq = 0.0
    for _ in range(iters):
        y = a @ x
        rq_new = float(x @ y)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            break
        x = y / ny
        if abs(rq_new - rq) <= tol * abs(rq_new):
            rq = rq_new
            break
        rq = rq_new
    y = a @ x
    xx = float(x @ x)
    certified = float(x @ y) / xx
    value = float(np.linalg.norm(y)) / math.sqrt(xx)
    return max(value, certified), certified
