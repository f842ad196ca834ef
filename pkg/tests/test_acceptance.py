"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (``pytest tests/test_acceptance.py -s``) or directly with
``python tests/test_acceptance.py [--slow]``.
"""

import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from fraclap.asymptotics import ApproxEigenfunction, lambda_tilde, residual_sup
from fraclap.eigensolver import SymmetricToeplitz, eigs_all, eigs_jacobi
from fraclap.grid import Ball, Interval, Square, build_grid
from fraclap.halfline import HalfLineKernel
from fraclap.lower_bounds import assemble_V_interval, lower_bound_sequence, symbol_max
from fraclap.upper_bounds import GreenBallEvaluator, lambda1_upper, minorant_audit

HALFLINE_ALPHAS = (0.1, 0.5, 1.0, 1.5, 1.9)

# roman-font cells of the reference table, (alpha) -> (n = 1, 2, 3)
TABLE_ROMAN = {
    0.01: (0.998, 1.009, 1.014),
    0.1: (0.981, 1.091, 1.147),
    0.2: (0.971, 1.195, 1.319),
    0.5: (0.991, 1.598, 2.029),
    1.0: (1.178, 2.749, 4.316),
    1.5: (1.611, 5.055, 9.592),
    1.8: (2.056, 7.500, 15.795),
    1.9: (2.248, 8.594, 18.710),
    1.99: (2.444, 9.733, 21.820),
}
FLAGGED_CELL = (1.5, 3)


def check_table():
    t0 = time.perf_counter()
    misses = []
    for a, refs in TABLE_ROMAN.items():
        for n, ref in enumerate(refs, start=1):
            v = lambda_tilde(a, n).lambda_tilde
            if (a, n) == FLAGGED_CELL:
                if abs(v - (23 * math.pi / 16) ** 1.5) > 1e-6:
                    misses.append(f"({a:g},{n}) {v:.4f} vs formula")
            elif abs(v - ref) > 5e-4:
                misses.append(f"({a:g},{n}) {v:.4f} vs {ref}")
    dt = time.perf_counter() - t0
    ok = not misses and dt < 1.0
    detail = f"{27 - len(misses)}/27 cells within 5e-4, {dt:.3f}s"
    if misses:
        detail += "; off: " + ", ".join(misses)
    return ok, detail


def check_integral_identity():
    worst = 0.0
    for a in HALFLINE_ALPHAS:
        k = HalfLineKernel(a)
        target = math.cos((2 - a) * math.pi / 8) - math.sqrt(a / 2)
        worst = max(worst, abs(k.integral_G() - target), abs(k.integral_G(fresh=True) - target))
    return worst < 1e-6, f"max deviation {worst:.2e} (< 1e-6)"


def check_envelope():
    s = np.geomspace(1e-3, 1e3, 200)
    worst = -math.inf
    for a in HALFLINE_ALPHAS:
        excess = HalfLineKernel(a).G(s) - math.sin((2 - a) * math.pi / 8)
        worst = max(worst, float(excess.max()))
    return worst <= 1e-9, f"max G(s) - sin(beta pi/8) = {worst:.3e} (<= 1e-9)"


def check_interval_desk():
    t0 = time.perf_counter()
    # the small problems first against the Jacobi oracle
    oracle_gap = max(
        float(np.abs(eigs_all(assemble_V_interval(1.0, N)) - eigs_jacobi(assemble_V_interval(1.0, N).to_dense())).max())
        for N in (50, 100, 200)
    )
    lam = {}
    ok_lit = True
    for N in (100, 400, 1600):
        res = lower_bound_sequence(1.0, Interval(), Fraction(2, N), 10)
        lam[N] = res.values[0]
        ok_lit &= bool(np.all(res.values <= (np.arange(1, 11) * math.pi / 2)))
    increasing = lam[100] < lam[400] < lam[1600]
    in_range = 1.10 <= lam[1600] <= 1.1578
    dt = time.perf_counter() - t0
    ok = increasing and in_range and ok_lit and oracle_gap < 1e-9 and dt < 60
    detail = (
        f"lambda_1 = {lam[100]:.5f}, {lam[400]:.5f}, {lam[1600]:.5f} for N = 100, 400, 1600; "
        f"literature upper respected: {ok_lit}; Jacobi gap {oracle_gap:.1e}; {dt:.1f}s"
    )
    return ok, detail


def check_interval_full():
    t0 = time.perf_counter()
    got = {a: lower_bound_sequence(a, Interval(), Fraction(1, 2500), 1).values[0] for a in (0.5, 1.0)}
    ok = abs(got[0.5] - 0.9692) <= 5e-4 and abs(got[1.0] - 1.1516) <= 5e-4
    return ok, f"N = 5000: {got[0.5]:.5f} (0.9692), {got[1.0]:.5f} (1.1516); {time.perf_counter() - t0:.1f}s"


def check_symbol_cap():
    worst = -math.inf
    for a in (0.5, 1.0, 1.5):
        for N in (50, 200):
            eps = 2.0 / N
            top = eigs_all(assemble_V_interval(a, N))[-1]
            bound = symbol_max(a, eps)
            worst = max(worst, (top - bound) / bound)
    return worst <= 1e-8, f"max (lambda_max - bound) / bound = {worst:.3e} (<= 1e-8)"


def check_disk_upper():
    t0 = time.perf_counter()
    r = lambda1_upper(Ball(2), 1.0, Fraction(1, 25))
    ev = GreenBallEvaluator(2, 1.0)
    grid = build_grid(Ball(2), Fraction(1, 25))
    bad, n = minorant_audit(ev, grid, 100_000, np.random.default_rng(20240607))
    dt = time.perf_counter() - t0
    ok = abs(r.lambda1_upper - 2.7588) <= 1e-2 and r.certified and bad == 0 and dt < 120
    detail = (
        f"lambda*_1 = {r.lambda1_upper:.4f} (2.7588 +- 1e-2, certified={r.certified}); "
        f"audit {bad} violations in {n} pairs; {dt:.1f}s"
    )
    return ok, detail


def check_sandwich():
    t0 = time.perf_counter()
    cases = [("interval", Interval(), Fraction(2, 400)), ("disk", Ball(2), Fraction(1, 10)), ("square", Square(), Fraction(1, 10))]
    problems = []
    for name, shape, eps in cases:
        for a in (0.5, 1.0, 1.5):
            low = lower_bound_sequence(a, shape, eps, 1).values[0]
            if low > (math.pi / 2) ** a:
                problems.append(f"{name} {a:g}: lower {low:.4f} > (pi/2)^a")
            if name != "square":
                up = lambda1_upper(shape, a, eps).lambda1_upper
                if low > up:
                    problems.append(f"{name} {a:g}: lower {low:.4f} > upper {up:.4f}")
    detail = f"9 lower bounds, 6 upper bounds; {time.perf_counter() - t0:.1f}s"
    if problems:
        detail += "; " + "; ".join(problems)
    return not problems, detail


def check_eigensolver():
    worst_tri = 0.0
    for N in (10, 100):
        col = np.zeros(N)
        col[0], col[1] = 2.0, -1.0
        exact = np.sort(2 - 2 * np.cos(np.arange(1, N + 1) * math.pi / (N + 1)))
        worst_tri = max(worst_tri, float(np.abs(eigs_all(SymmetricToeplitz(col)) - exact).max()))
    rng = np.random.default_rng(99)
    worst_jac = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 201))
        a = rng.standard_normal((n, n))
        a = (a + a.T) / 2
        worst_jac = max(worst_jac, float(np.abs(eigs_all(a) - eigs_jacobi(a)).max()))
    ok = worst_tri <= 1e-10 and worst_jac <= 1e-9
    return ok, f"tridiagonal closed form {worst_tri:.1e} (<= 1e-10), Jacobi agreement {worst_jac:.1e} (<= 1e-9)"


def check_residual():
    t0 = time.perf_counter()
    k = HalfLineKernel(1.0)
    pts = np.linspace(-0.9, 0.9, 19)
    r8 = residual_sup(ApproxEigenfunction(8, k), pts)
    r16 = residual_sup(ApproxEigenfunction(16, k), pts)
    ratio = r16 / r8
    dt = time.perf_counter() - t0
    ok = 0.25 <= ratio <= 0.75 and dt < 120
    return ok, f"sup residual {r8:.5f} (n = 8), {r16:.5f} (n = 16), ratio {ratio:.3f} in [0.25, 0.75]; {dt:.1f}s"


CRITERIA = [
    (1, "asymptotic table reproduction", check_table, False),
    (2, "half-line integral identity", check_integral_identity, False),
    (3, "G envelope", check_envelope, False),
    (4, "interval lower bound, desk scale", check_interval_desk, False),
    (5, "interval lower bound, full scale", check_interval_full, True),
    (6, "Toeplitz symbol cap", check_symbol_cap, False),
    (7, "disk upper bound and minorant audit", check_disk_upper, False),
    (8, "sandwich coherence", check_sandwich, False),
    (9, "eigensolver oracle", check_eigensolver, False),
    (10, "residual decay", check_residual, False),
]


def report(number, title, ok, detail):
    return f"{'PASS' if ok else 'FAIL'}  [{number:2d}] {title}: {detail}"


def _param(c):
    marks = [pytest.mark.slow] if c[3] else []
    return pytest.param(*c[:3], marks=marks, id=f"criterion_{c[0]:02d}")


@pytest.mark.parametrize("number, title, check", [_param(c) for c in CRITERIA])
def test_criterion(number, title, check, capsys):
    ok, detail = check()
    line = report(number, title, ok, detail)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    slow = "--slow" in sys.argv
    failed = 0
    for number, title, check, is_slow in CRITERIA:
        if is_slow and not slow:
            print(f"SKIP  [{number:2d}] {title}: pass --slow to run")
            continue
        ok, detail = check()
        failed += not ok
        print(report(number, title, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
