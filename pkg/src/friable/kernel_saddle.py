"""Saddle-point quantities for integers with small squarefree kernel.

Prime sums run over an explicit prime list up to ``prime_limit`` and are
completed by the prime-density integral  int f(x) dx / log x  beyond it,
taken in the variable w = log x.

F is computed from the identity  sum_n 1/(n psi(n)) = zeta(2), which turns
its infinite tail into finite sums:

    (pi^2/6) F(t) = sum_{n<=e^t} 1/psi(n) + e^t (pi^2/6 - sum_{n<=e^t} 1/(n psi(n))).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import kernels
from .sieves import primes_up_to

log = logging.getLogger(__name__)

ZETA2 = math.pi ** 2 / 6
DEFAULT_PRIME_LIMIT = 10**7
F_DIRECT_CAP = 2**31
_LOG2 = math.log(2.0)


def psi_mult(n: int) -> int:
    """prod_{p | n} (p + 1)."""
    n = int(n)
    if n <= 0:
        raise ValueError("psi(n) needs n >= 1")
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            out *= p + 1
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out *= n + 1
    return out


class PsiSums:
    """Prefix sums of 1/psi(n) and 1/(n psi(n)), checkpointed every ``step`` integers."""

    def __init__(self, primes, step=1 << 16):
        self._primes = primes
        self.step = step
        # Neumaier pairs (sum, compensation) at n = i * step
        self._s1 = [(0.0, 0.0)]
        self._s2 = [(0.0, 0.0)]

    @staticmethod
    def _add(pair, x):
        s, c = pair
        t = s + x
        c += (s - t) + x if abs(s) >= abs(x) else (x - t) + s
        return t, c

    def _extend(self, checkpoint):
        while len(self._s1) <= checkpoint:
            k = len(self._s1) - 1
            a, b = k * self.step + 1, (k + 1) * self.step + 1
            if math.isqrt(b) > self._primes[-1]:
                raise ValueError("prime list too short for this range")
            d1, d2 = kernels.psi_window_sums(a, b, self._primes)
            self._s1.append(self._add(self._s1[-1], d1))
            self._s2.append(self._add(self._s2[-1], d2))

    def upto(self, z):
        """(sum_{n<=z} 1/psi(n), sum_{n<=z} 1/(n psi(n)))."""
        z = int(z)
        k = z // self.step
        self._extend(k)
        (s1, c1), (s2, c2) = self._s1[k], self._s2[k]
        if z > k * self.step:
            d1, d2 = kernels.psi_window_sums(k * self.step + 1, z + 1, self._primes)
            (s1, c1), (s2, c2) = self._add((s1, c1), d1), self._add((s2, c2), d2)
        return s1 + c1, s2 + c2


@dataclass
class SaddleContext:
    prime_limit: int
    primes: np.ndarray = field(repr=False)
    tail_quadrature_points: int = 200
    target_rel_error: float = 1e-8
    f_direct_cap: int = F_DIRECT_CAP
    _logp: np.ndarray = field(init=False, repr=False)
    _sigma_cache: dict = field(init=False, repr=False, default_factory=dict)
    _psi_sums: PsiSums = field(init=False, repr=False)

    def __post_init__(self):
        if self.prime_limit < 10**5:
            raise ValueError("prime_limit must be at least 1e5")
        self.primes = np.asarray(self.primes, dtype=np.int64)
        self._logp = np.log(self.primes.astype(np.float64))
        self._psi_sums = PsiSums(self.primes)

    @property
    def psi_sums(self) -> PsiSums:
        return self._psi_sums


def make_context(prime_limit=DEFAULT_PRIME_LIMIT, primes=None, **kw) -> SaddleContext:
    if primes is None:
        primes = primes_up_to(prime_limit)
    return SaddleContext(prime_limit=int(prime_limit), primes=primes, **kw)


# ------------------------------------------------------------------ g and g'

def _check_sigma(sigma):
    if not 0 < sigma <= 1:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")


def _tail(ctx, integrand):
    w0 = math.log(ctx.prime_limit)
    val, err = integrate.quad(integrand, w0, np.inf, limit=ctx.tail_quadrature_points,
                              epsabs=0.0, epsrel=ctx.target_rel_error * 0.1)
    return val, err


def g(ctx: SaddleContext, sigma: float) -> float:
    """sum_p log(1 + (1 - p^(sigma-1)) / (p (p^sigma - 1)))."""
    _check_sigma(sigma)
    lp = ctx._logp
    e = np.expm1(sigma * lp)
    m = np.expm1((sigma - 1.0) * lp)
    head = math.fsum(np.log1p(-m / (ctx.primes * e)))

    def integrand(w):
        qs = math.exp(-sigma * w)
        a = -math.expm1(-sigma * w)
        m = math.expm1((sigma - 1.0) * w)
        z = -m * math.exp(-w) * qs / a
        ratio = math.log1p(z) / z if z > 1e-300 else 1.0
        return ratio * -m * qs / a / w

    tail, _ = _tail(ctx, integrand)
    return head + tail


def _g_prime_terms(sigma, p, lp):
    # d/dsigma log(1 + a_p) = -log p * p^s (p - 1) / ((p^(s+1) - p + 1 - p^(s-1)) (p^(s+1) - p))
    e = np.expm1(sigma * lp)
    m = np.expm1((sigma - 1.0) * lp)
    return -lp * (e + 1.0) * (1.0 - 1.0 / p) / (e * (p * e - m))


def g_prime(ctx: SaddleContext, sigma: float) -> float:
    _check_sigma(sigma)
    head = math.fsum(_g_prime_terms(sigma, ctx.primes.astype(np.float64), ctx._logp))

    def integrand(w):
        # summand * x / log x at x = e^w, with only decaying exponentials
        qs = math.exp(-sigma * w)
        a = -math.expm1(-sigma * w)
        m = math.expm1((sigma - 1.0) * w)
        q = math.exp(-w)
        return -qs * (1.0 - q) / (a * (a - m * q * qs))

    tail, err = _tail(ctx, integrand)
    total = head + tail
    if err > ctx.target_rel_error * abs(total):
        raise ArithmeticError(f"g'({sigma}): tail quadrature error {err:.3g} too large")
    return total


def sigma_solve(ctx: SaddleContext, t: float) -> float:
    """Root sigma_t of g'(sigma) + t = 0 in (0, 1)."""
    t = float(t)
    if t < 1:
        raise ValueError("sigma_t is defined for t >= 1")
    if t in ctx._sigma_cache:
        return ctx._sigma_cache[t]

    def f(s):
        return g_prime(ctx, s) + t

    hi = 1.0
    lo = min(0.5, math.sqrt(2.0 / (t * math.log(t)))) if t > math.e else 0.5
    for _ in range(60):
        if f(lo) < 0:
            break
        hi, lo = lo, lo / 2
    else:
        raise ArithmeticError(f"could not bracket sigma_t for t = {t}")
    root = optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(f(root)) > 1e-8 * t:
        raise ArithmeticError(f"sigma_t residual too large at t = {t}")
    ctx._sigma_cache[t] = root
    return root


@dataclass(frozen=True)
class SigmaExpansion:
    """Polynomials P_1, P_2 (coefficients in increasing degree) of the sigma_t expansion."""
    P1: tuple = (-_LOG2 / 2, 0.5)
    P2: tuple = (_LOG2 / 2 + 3 * _LOG2 ** 2 / 8 + 2 * math.pi ** 2 / 3,
                 -(3 * _LOG2 / 4 + 0.5),
                 3.0 / 8)

    def P(self, k, z):
        coeffs = {1: self.P1, 2: self.P2}[k]
        return sum(c * z ** i for i, c in enumerate(coeffs))


EXPANSION = SigmaExpansion()


def sigma_asymptotic(t: float, order: int = 2) -> float:
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    if t < 16:
        raise ValueError("the expansion needs t >= 16")
    lt = math.log(t)
    z = math.log(lt)
    corr = 1.0 + sum(EXPANSION.P(k, z) / lt ** k for k in range(1, order + 1))
    return math.sqrt(2.0 / (t * lt)) * corr


# ------------------------------------------------------------------ F

def F(ctx: SaddleContext, t: float, psi_table=None) -> float:
    """(6/pi^2) sum_n min(1, e^t/n) / psi(n).

    Direct for e^t <= ctx.f_direct_cap; beyond that F is continued from the
    cap with dF/dt = sigma_t F (reduced accuracy, logged).
    """
    t = float(t)
    if t <= 0:
        raise ValueError("F(t) needs t > 0")
    if t > math.log(ctx.f_direct_cap):
        t0 = math.log(ctx.f_direct_cap)
        log.warning("F(%g): e^t beyond the direct-summation cap, reduced accuracy", t)
        xg, wg = np.polynomial.legendre.leggauss(8)
        nodes = t0 + (t - t0) * (xg + 1) / 2
        growth = (t - t0) / 2 * math.fsum(w * sigma_solve(ctx, s) for w, s in zip(wg, nodes))
        return F(ctx, t0, psi_table) * math.exp(growth)
    z = int(math.floor(math.exp(t)))
    if psi_table is not None and len(psi_table) > z:
        psi = np.asarray(psi_table[1:z + 1], dtype=np.float64)
        s1 = math.fsum(1.0 / psi)
        s2 = math.fsum(1.0 / (psi * np.arange(1, z + 1, dtype=np.float64)))
    else:
        s1, s2 = ctx.psi_sums.upto(z)
    return (s1 + math.exp(t) * (ZETA2 - s2)) / ZETA2


def F_reduced_accuracy(ctx: SaddleContext, t: float) -> bool:
    return t > math.log(ctx.f_direct_cap)


def inverse_psi_partial_sum(ctx: SaddleContext, N: int) -> float:
    """(6/pi^2) sum_{n<=N} 1/(n psi(n)); tends to 1."""
    return ctx.psi_sums.upto(N)[1] / ZETA2


def F_increment_check(ctx: SaddleContext, w: float, h: float) -> float:
    """(F(w) - F(w - h)) / (h sigma_w F(w)); close to 1 when h is small against sqrt(w log w)."""
    if w < 4:
        raise ValueError("w must be >= 4")
    if not 0 < h < math.sqrt(w * math.log(w)) or h >= w:
        raise ValueError(f"increment h = {h} outside (0, sqrt(w log w))")
    fw = F(ctx, w)
    return (fw - F(ctx, w - h)) / (h * sigma_solve(ctx, w) * fw)
