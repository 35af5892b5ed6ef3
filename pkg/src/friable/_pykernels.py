"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``.

Signatures and results match the compiled module; floating sums may differ in
the last few ulps because the summation algorithms differ (math.fsum here,
Neumaier there).
"""
import math

import numpy as np

TIE_TOL = 1e-9
GUARD = 1e-12


def _strip_small_primes(lo, hi, primes, on_hit):
    rem = np.arange(lo, hi, dtype=np.int64)
    for p in primes:
        p = int(p)
        if p * p > hi - 1:
            break
        start = -(-lo // p) * p
        if start >= hi:
            continue
        sl = slice(start - lo, hi - lo, p)
        block = rem[sl] // p
        while True:
            mask = block % p == 0
            if not mask.any():
                break
            block[mask] //= p
        rem[sl] = block
        on_hit(sl, p)
    return rem


def factor_window(lo, hi, primes):
    lo, hi = int(lo), int(hi)
    lpf = np.ones(hi - lo, dtype=np.int32)
    rad = np.ones(hi - lo, dtype=np.int32)

    def hit(sl, p):
        lpf[sl] = p
        rad[sl] *= p

    rem = _strip_small_primes(lo, hi, primes, hit)
    big = rem > 1
    lpf[big] = rem[big]
    rad[big] *= rem[big].astype(np.int32)
    return lpf, rad


def psi_window(lo, hi, primes):
    lo, hi = int(lo), int(hi)
    psi = np.ones(hi - lo, dtype=np.float64)

    def hit(sl, p):
        psi[sl] *= p + 1

    rem = _strip_small_primes(lo, hi, primes, hit)
    big = rem > 1
    psi[big] *= rem[big] + 1
    return psi


def psi_window_sums(lo, hi, primes, block=1 << 16):
    lo, hi = int(lo), int(hi)
    parts1, parts2 = [], []
    for a in range(lo, hi, block):
        b = min(a + block, hi)
        psi = psi_window(a, b, primes)
        parts1.append(math.fsum(1.0 / psi))
        parts2.append(math.fsum(1.0 / (psi * np.arange(a, b, dtype=np.float64))))
    return math.fsum(parts1), math.fsum(parts2)


def count_le(values, bound):
    return int(np.count_nonzero(values <= bound))


def _pow_le(base, e, n):
    return int(base) ** e <= int(n)


def _split_one(values, first_n):
    """Drop the entry for n = 1 (counted unconditionally by the callers)."""
    first_n = int(first_n)
    if first_n == 1 and len(values):
        return values[1:], 2, 1
    return values, first_n, 0


def count_root_le(values, first_n, u):
    if u <= 0.0:
        return len(values)
    v, n0, total = _split_one(values, first_n)
    if len(v) == 0:
        return total
    n = np.arange(n0, n0 + len(v), dtype=np.int64)
    a = u * np.log(v.astype(np.float64))
    b = np.log(n.astype(np.float64))
    ui = int(u)
    if u == ui and 1 <= ui <= 64:
        slack = TIE_TOL * (1.0 + b)
        sure = np.count_nonzero(a < b - slack)
        ties = np.nonzero((a >= b - slack) & (a <= b + slack))[0]
        extra = sum(1 for i in ties if _pow_le(v[i], ui, n[i]))
        return total + int(sure) + extra
    return total + int(np.count_nonzero(a <= b + u * GUARD))


def count_kernel_threshold(rad, first_n, theta, alpha):
    v, n0, total = _split_one(rad, first_n)
    if len(v) == 0:
        return total
    ln = np.log(np.arange(n0, n0 + len(v), dtype=np.float64))
    b = theta * ln + alpha * np.log(ln)
    return total + int(np.count_nonzero(np.log(v.astype(np.float64)) <= b + GUARD))


def dickman_sum(lpf, first_n, log_numer=-1.0):
    v, n0, _ = _split_one(lpf, first_n)
    if len(v) == 0:
        return 0.0
    den = np.log(v.astype(np.float64))
    if log_numer < 0.0:
        num = np.log(np.arange(n0, n0 + len(v), dtype=np.float64))
    else:
        num = log_numer
    return math.fsum(num / den)
