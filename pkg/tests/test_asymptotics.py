import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fraclap.asymptotics import (
    ApproxEigenfunction,
    frac_laplacian_pointwise,
    lambda_tilde,
    mu_n,
    phi_tilde,
    phi_tilde_norm,
    q_glue,
    residual_sup,
)
from fraclap.halfline import HalfLineKernel
from fraclap.quadrature import QuadratureError

alphas = st.floats(1e-3, 2 - 1e-3)
K1 = HalfLineKernel(1.0)


def test_q_glue_points():
    assert q_glue(0.0) == 0.5
    assert q_glue(1 / 3) == 1.0
    assert q_glue(-1 / 3) == 0.0
    assert q_glue(-5.0) == 0.0 and q_glue(5.0) == 1.0


@given(st.floats(-3, 3))
def test_q_glue_partition_of_unity(x):
    assert q_glue(x) + q_glue(-x) == pytest.approx(1.0, abs=1e-15)


def test_q_glue_c1():
    h = 1e-7
    for x0 in (-1 / 3, 0.0, 1 / 3):
        left = (q_glue(x0) - q_glue(x0 - h)) / h
        right = (q_glue(x0 + h) - q_glue(x0)) / h
        assert left == pytest.approx(right, abs=1e-5)


# reference table, first two columns of the two-term formula
TABLE_FIRST_TWO = {
    0.01: (0.998, 1.009), 0.1: (0.981, 1.091), 0.2: (0.971, 1.195),
    0.5: (0.991, 1.598), 1.0: (1.178, 2.749), 1.5: (1.611, 5.055),
    1.8: (2.056, 7.500), 1.9: (2.248, 8.594), 1.99: (2.444, 9.733),
}
# third column: the entries printed next to the numerical eigenvalues
TABLE_THIRD = {
    0.01: 1.014, 0.1: 1.148, 0.2: 1.320, 0.5: 2.031, 1.0: 4.320,
    1.5: 9.597, 1.8: 15.801, 1.9: 18.718, 1.99: 21.829,
}


@pytest.mark.parametrize("a", sorted(TABLE_FIRST_TWO))
def test_lambda_tilde_table_cells(a):
    for n, ref in enumerate(TABLE_FIRST_TWO[a], start=1):
        assert abs(lambda_tilde(a, n).lambda_tilde - ref) <= 5e-4
    assert abs(lambda_tilde(a, 3).lambda_tilde - TABLE_THIRD[a]) <= 5e-4


@pytest.mark.xfail(strict=True, reason="reference cell holds the numerical eigenvalue 1.3191, the formula gives 1.3199")
def test_lambda_tilde_third_index_alpha_0_2():
    assert abs(lambda_tilde(0.2, 3).lambda_tilde - 1.319) <= 5e-4


def test_lambda_tilde_three_halves_third():
    # printed as 9.592 in the reference table; the formula gives 9.597
    v = lambda_tilde(1.5, 3).lambda_tilde
    assert v == pytest.approx((23 * math.pi / 16) ** 1.5, abs=1e-6)
    assert abs(v - 9.597) < 5e-4


def test_band():
    r = lambda_tilde(1.0, 10)
    assert r.error_band == pytest.approx(30000 / 10)
    assert not r.band_valid
    assert lambda_tilde(1.9, 10**3).band_valid
    assert not lambda_tilde(0.01, 10**9).band_valid  # threshold overflows floats


def test_band_threshold_edge():
    a = 1.5
    threshold = (4000 / a) ** (3 / (2 * a))
    n = math.ceil(threshold)
    assert lambda_tilde(a, n).band_valid
    assert not lambda_tilde(a, n - 1).band_valid


@pytest.mark.parametrize("bad", [(0.0, 1), (2.0, 1), (1.0, 0), (1.0, 1.5)])
def test_lambda_tilde_domain(bad):
    with pytest.raises(ValueError):
        lambda_tilde(*bad)


@given(alphas, st.integers(1, 10**6))
def test_mu_bounds(a, n):
    m = mu_n(a, n)
    assert m >= math.pi / 4
    assert n * math.pi / 4 <= m <= n * math.pi / 2


@given(alphas, st.integers(1, 10**5))
def test_lambda_tilde_increasing(a, n):
    lo, hi = lambda_tilde(a, n), lambda_tilde(a, n + 1)
    assert hi.lambda_tilde > lo.lambda_tilde
    assert hi.mu_n > lo.mu_n


@given(alphas, st.integers(1, 10**6))
def test_below_literature_upper(a, n):
    assert lambda_tilde(a, n).lambda_tilde <= (n * math.pi / 2) ** a


@given(st.floats(0.05, 1.95), st.integers(1, 200))
def test_above_literature_lower(a, n):
    assert lambda_tilde(a, n).lambda_tilde >= 0.5 * (n * math.pi / 2) ** a


def test_phi_tilde_vanishes_outside():
    for n in (1, 2, 5):
        ef = ApproxEigenfunction(n, K1)
        assert abs(phi_tilde(ef, 1.0)) < 1e-6
        assert abs(phi_tilde(ef, -1.0)) < 1e-6
        assert phi_tilde(ef, 1.5) == 0.0
        assert np.all(ef(np.array([-3.0, 2.0])) == 0.0)


@given(st.integers(1, 3), st.floats(-0.999, 0.999), st.sampled_from([0.3, 1.0, 1.7]))
def test_phi_tilde_symmetry(n, x, a):
    ef = ApproxEigenfunction(n, HalfLineKernel(a))
    # the first function is even, the second odd, and so on
    assert phi_tilde(ef, -x) == pytest.approx((-1) ** (n + 1) * phi_tilde(ef, x), abs=1e-12)


def test_phi_tilde_accepts_alpha():
    ef = ApproxEigenfunction(2, 0.5)
    assert ef.alpha == 0.5
    assert ef.eigenvalue == pytest.approx(mu_n(0.5, 2) ** 0.5)
    with pytest.raises(ValueError):
        ApproxEigenfunction(0, K1)


def test_phi_tilde_norm_trend():
    gaps = [abs(phi_tilde_norm(ApproxEigenfunction(n, K1)) - 1.0) for n in (4, 8, 16)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[0] < 0.01


def test_pointwise_constant():
    f = lambda y: np.ones_like(np.asarray(y, dtype=float))
    assert abs(frac_laplacian_pointwise(f, 0.3, 1.0)) < 1e-8


@pytest.mark.parametrize("x, exact", [(0.0, 1.0), (1.0, 0.0), (0.5, 0.48)])
def test_pointwise_poisson_kernel(x, exact):
    # for alpha = 1, A (1 + x^2)^-1 = (1 - x^2) / (1 + x^2)^2
    f = lambda y: 1.0 / (1.0 + np.asarray(y, dtype=float) ** 2)
    assert frac_laplacian_pointwise(f, x, 1.0) == pytest.approx(exact, abs=1e-9)


def _bump(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    m = np.abs(x) < 1
    out[m] = np.exp(-1.0 / (1.0 - x[m] ** 2))
    return out


def _fourier_oracle(a):
    # A f(0) = (1/pi) int_0^inf xi^a fhat(xi) d xi with xi = v^2; fhat by trapezoid in x
    x = np.linspace(0.0, 1.0, 2001)
    w = np.full(x.size, x[1] - x[0])
    w[0] = w[-1] = w[0] / 2
    fx = _bump(x) * w
    dv = 0.002
    v = np.arange(0.0, 60.0, dv)
    xi = v * v
    fh = np.empty(xi.size)
    for i in range(0, xi.size, 5000):
        fh[i:i + 5000] = 2.0 * np.cos(np.outer(xi[i:i + 5000], x)) @ fx
    return float((xi**a * fh * 2 * v).sum() * dv / math.pi)


@pytest.mark.parametrize("a", [0.5, 1.0, 1.5])
def test_pointwise_against_fourier(a):
    val = frac_laplacian_pointwise(_bump, 0.0, a, support=(-1.0, 1.0))
    assert abs(val - _fourier_oracle(a)) < 1e-3


def test_pointwise_nonfinite():
    with pytest.raises(QuadratureError):
        frac_laplacian_pointwise(lambda y: np.full_like(np.asarray(y, float), np.nan), 0.0, 1.0)


def test_residual_domain():
    ef = ApproxEigenfunction(2, K1)
    with pytest.raises(ValueError):
        residual_sup(ef, [0.995])
    with pytest.raises(ValueError):
        lambda_tilde(2.0, 1)


def test_residual_small_and_decaying():
    pts = np.linspace(-0.9, 0.9, 19)
    r8 = residual_sup(ApproxEigenfunction(8, K1), pts)
    r16 = residual_sup(ApproxEigenfunction(16, K1), pts)
    assert np.isfinite(r8) and r8 < 1
    assert 0.25 <= r16 / r8 <= 0.75
