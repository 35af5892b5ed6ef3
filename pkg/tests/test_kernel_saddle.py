import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from friable import kernel_saddle as ks
from friable import naive, sieves


# ------------------------------------------------------------------ psi(n)

def test_psi_mult_examples():
    assert ks.psi_mult(1) == 1
    assert ks.psi_mult(12) == 12
    assert ks.psi_mult(8) == 3
    with pytest.raises(ValueError):
        ks.psi_mult(0)


@given(st.integers(1, 10**9))
def test_psi_mult_matches_factorization(n):
    assert ks.psi_mult(n) == math.prod(p + 1 for p in naive.factor(n))


def test_psi_window_matches_psi_mult():
    primes = sieves.primes_up_to(1000)
    for lo, hi in ((1, 2000), (999_000, 1_000_000)):
        got = ks.kernels.psi_window(lo, hi, primes)
        assert [int(g) for g in got] == [ks.psi_mult(n) for n in range(lo, hi)]


# ------------------------------------------------------------------ g, g'

def test_context_validation():
    with pytest.raises(ValueError):
        ks.make_context(10**4)


def test_g_at_one(ctx):
    assert ks.g(ctx, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_g_prime_at_one(ctx):
    p = ctx.primes.astype(float)
    direct = -math.fsum(np.log(p) / (p * (p - 1)))
    assert direct == pytest.approx(-0.7554, abs=5e-5)
    # primes beyond the list add about int_X^inf dx / x^2 = 1/X
    assert ks.g_prime(ctx, 1.0) == pytest.approx(direct - 1 / ctx.prime_limit, abs=1e-9)


@pytest.mark.parametrize("sigma", [0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99])
def test_g_prime_negative(ctx, sigma):
    assert ks.g_prime(ctx, sigma) < 0


@pytest.mark.parametrize("sigma", [0.05, 0.3, 0.7])
def test_g_prime_is_derivative_of_g(ctx, sigma):
    h = 1e-5
    num = (ks.g(ctx, sigma + h) - ks.g(ctx, sigma - h)) / (2 * h)
    assert ks.g_prime(ctx, sigma) == pytest.approx(num, rel=1e-6)


@given(st.integers(2, 10**6), st.floats(0.02, 0.98))
@settings(max_examples=50)
def test_summand_derivative(p, sigma):
    def log_term(s):
        return math.log1p((1 - p ** (s - 1)) / (p * (p ** s - 1)))
    h = 1e-6
    num = (log_term(sigma + h) - log_term(sigma - h)) / (2 * h)
    exact = float(ks._g_prime_terms(sigma, np.float64(p), np.log(np.float64(p))))
    assert exact == pytest.approx(num, rel=1e-4, abs=1e-12)


def test_g_prime_domain(ctx):
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            ks.g_prime(ctx, bad)


def test_prime_limit_insensitivity():
    # the tail integral stands in for the missing primes
    small = ks.make_context(10**6)
    big = ks.make_context(10**7)
    for sigma in (0.1, 0.5):
        assert ks.g_prime(small, sigma) == pytest.approx(ks.g_prime(big, sigma), rel=1e-5)


# ------------------------------------------------------------------ sigma_t

@pytest.mark.parametrize("t", [2, 10, 100])
def test_sigma_residual(ctx, t):
    s = ks.sigma_solve(ctx, t)
    assert 0 < s < 1
    assert abs(ks.g_prime(ctx, s) + t) <= 1e-8 * t


def test_sigma_decreasing(ctx):
    vals = [ks.sigma_solve(ctx, t) for t in (1, 2, 5, 10, 50, 100)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_sigma_leading_order_trend(ctx):
    ratios = [ks.sigma_solve(ctx, t) * math.sqrt(t * math.log(t) / 2) for t in (1e2, 1e3, 1e4)]
    dist = [abs(q - 1) for q in ratios]
    assert dist[0] > dist[1] > dist[2]


def test_sigma_rejects_small_t(ctx):
    with pytest.raises(ValueError):
        ks.sigma_solve(ctx, 0.5)


def test_sigma_asymptotic_examples():
    t = 1e4
    assert ks.sigma_asymptotic(t, 0) == math.sqrt(2 / (t * math.log(t)))
    assert ks.EXPANSION.P(1, math.log(2)) == pytest.approx(0.0, abs=1e-16)
    with pytest.raises(ValueError):
        ks.sigma_asymptotic(10.0, 1)
    with pytest.raises(ValueError):
        ks.sigma_asymptotic(100.0, 3)


def test_expansion_coefficients():
    l2 = math.log(2)
    z = 1.7
    assert ks.EXPANSION.P(1, z) == pytest.approx((z - l2) / 2)
    want = 3 / 8 * z * z - (3 / 4 * l2 + 0.5) * z + 0.5 * l2 + 3 / 8 * l2 ** 2 + 2 / 3 * math.pi ** 2
    assert ks.EXPANSION.P(2, z) == pytest.approx(want, rel=1e-15)


def test_sigma_second_order_deviation_decreases(ctx):
    dev = [abs(ks.sigma_solve(ctx, t) - ks.sigma_asymptotic(t, 2)) / ks.sigma_solve(ctx, t)
           for t in (1e2, 1e3, 1e4)]
    assert dev[0] > dev[1] > dev[2]


@pytest.mark.parametrize("v", [20, 50, 100])
def test_dsigma_dv_bound(ctx, v):
    h = 1e-3 * v
    d = (ks.sigma_solve(ctx, v + h) - ks.sigma_solve(ctx, v - h)) / (2 * h)
    assert abs(d) <= 5 * v ** -1.5 * math.log(v) ** -0.5


# ------------------------------------------------------------------ F

def test_euler_product_partial_sum(ctx):
    assert 1 - 1e-4 <= ks.inverse_psi_partial_sum(ctx, 10**6) <= 1
    p = ctx.primes.astype(float)
    prod = math.exp(math.fsum(np.log1p(1 / (p * p - 1))))
    assert prod == pytest.approx(math.pi ** 2 / 6, rel=1e-7)


def test_F_increasing(ctx):
    vals = [ks.F(ctx, t) for t in range(1, 16)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_F_bounded_by_one(ctx):
    for t in (0.5, 1, 5, 10, 15):
        assert 0 < ks.F(ctx, t) < 1


def test_F_at_fifteen(ctx):
    assert 0.999 <= ks.F(ctx, 15.0) < 1


def test_F_direct_sum(ctx):
    # brute force of (6/pi^2) sum_n min(1, e^t/n) / psi(n) with a long explicit tail
    t = 4.0
    N = 400_000
    psi = ks.kernels.psi_window(1, N + 1, sieves.primes_up_to(1000)).astype(float)
    n = np.arange(1, N + 1, dtype=float)
    head = math.fsum(np.minimum(1.0, math.exp(t) / n) / psi)
    tail_bound = math.exp(t) * (math.pi ** 2 / 6 - math.fsum(1 / (n * psi)))
    assert ks.F(ctx, t) * math.pi ** 2 / 6 == pytest.approx(head + tail_bound, rel=1e-12)
    assert ks.F(ctx, t) * math.pi ** 2 / 6 - head < tail_bound * 1.0000001


def test_F_matches_kernel_count(ctx, tables_1e6):
    # N(x, y) ~ y F(log(x/y)) when y is not too small
    x, y = 10**6, 10**4
    n = sieves.n_exact(tables_1e6, x, y)
    assert y * ks.F(ctx, math.log(x / y)) == pytest.approx(n, rel=0.01)


def test_F_with_sieve_table(ctx):
    psi = np.concatenate([[0.0], ks.kernels.psi_window(1, 5000, sieves.primes_up_to(100))])
    assert ks.F(ctx, 8.0, psi) == pytest.approx(ks.F(ctx, 8.0), rel=1e-13)


def test_F_domain(ctx):
    with pytest.raises(ValueError):
        ks.F(ctx, 0.0)


def test_F_continuation_past_cap():
    small = ks.make_context(10**5, f_direct_cap=2**16)
    t0 = math.log(2**16)
    assert ks.F_reduced_accuracy(small, t0 + 0.5)
    cont = ks.F(small, t0 + 0.5)
    direct = ks.F(ks.make_context(10**5), t0 + 0.5)
    assert cont == pytest.approx(direct, rel=0.05)


@pytest.mark.parametrize("v", [8, 10, 12, 16])
def test_F_growth_bound(ctx, v):
    s = ks.sigma_solve(ctx, v)
    for h in np.linspace(0, 4, 9):
        assert ks.F(ctx, v + h) <= 2 * math.exp(h * s) * ks.F(ctx, v)


def test_F_increment(ctx):
    ratio = ks.F_increment_check(ctx, 12, 0.5)
    assert 0.5 <= ratio <= 1.5
    seq = [ks.F_increment_check(ctx, 12, h) for h in (0.5, 0.25, 0.125)]
    d1, d2 = abs(seq[1] - seq[0]), abs(seq[2] - seq[1])
    assert d2 < d1
    with pytest.raises(ValueError):
        ks.F_increment_check(ctx, 12, 0.0)
    with pytest.raises(ValueError):
        ks.F_increment_check(ctx, 3, 0.1)
