"""Exact counting oracles built on largest-prime-factor and radical tables.

Counters accept any *factor source*: an object with ``limit`` and a
``chunks(nmax)`` generator yielding ``(first_n, lpf, radical)`` views that
together cover 1..nmax in order.  ``FactorTables`` holds both arrays in
memory; ``SegmentedFactors`` recomputes them window by window.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels

DEFAULT_CAP = 10**8
INT32_MAX = 2**31 - 1
WINDOW = 1 << 22
GUARD = 1e-12


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as int64 (sieve of Eratosthenes, odd numbers only)."""
    n = int(n)
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    odd = np.ones((n + 1) // 2, dtype=bool)  # odd[i] <-> 2i + 1
    odd[0] = False
    for i in range(1, (math.isqrt(n) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2::p] = False
    return np.concatenate([[2], 2 * np.nonzero(odd)[0] + 1]).astype(np.int64)


def _windows(lo, hi, size):
    return [(a, min(a + size, hi)) for a in range(lo, hi, size)]


def default_threads():
    return os.cpu_count() or 1


@dataclass(frozen=True)
class FactorTables:
    """lpf[n] = P+(n) and radical[n] = k(n) for 1 <= n <= limit (index 0 unused)."""
    limit: int
    lpf: np.ndarray = field(repr=False)
    radical: np.ndarray = field(repr=False)

    def chunks(self, nmax):
        yield 1, self.lpf[1:nmax + 1], self.radical[1:nmax + 1]


@dataclass(frozen=True)
class SegmentedFactors:
    """Low-memory factor source: windows are sieved on demand and discarded."""
    limit: int
    window: int = WINDOW

    def chunks(self, nmax):
        primes = primes_up_to(math.isqrt(nmax))
        for lo, hi in _windows(1, nmax + 1, self.window):
            lpf, rad = kernels.factor_window(lo, hi, primes)
            yield lo, lpf, rad


def build_tables(X: int, cap: int = DEFAULT_CAP, threads: int | None = None,
                 window: int = WINDOW) -> FactorTables:
    X = int(X)
    if X < 2 or X > min(cap, INT32_MAX):
        raise ValueError(f"table limit {X} outside [2, {min(cap, INT32_MAX)}]")
    primes = primes_up_to(math.isqrt(X))
    lpf = np.zeros(X + 1, dtype=np.int32)
    rad = np.zeros(X + 1, dtype=np.int32)

    def fill(bounds):
        lo, hi = bounds
        lpf[lo:hi], rad[lo:hi] = kernels.factor_window(lo, hi, primes)

    spans = _windows(1, X + 1, window)
    threads = threads or default_threads()
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(fill, spans))
    else:
        for span in spans:
            fill(span)
    return FactorTables(limit=X, lpf=lpf, radical=rad)


def _floor_guarded(t):
    """floor(t) with the inclusive 1e-12 relative guard used for all thresholds."""
    return int(math.floor(t * (1.0 + GUARD))) if t > 0 else int(math.floor(t))


def _nmax(source, x):
    if not x >= 1:
        raise ValueError(f"x must be >= 1, got {x}")
    n = _floor_guarded(x)
    if n > source.limit:
        raise ValueError(f"x = {x} exceeds the table limit {source.limit}")
    return n


def psi_exact(source, x, y) -> int:
    """#{n <= x : P+(n) <= y}."""
    nmax = _nmax(source, x)
    if y < 1:
        return 0
    bound = min(_floor_guarded(y), INT32_MAX)
    return sum(kernels.count_le(lpf, bound) for _, lpf, _ in source.chunks(nmax))


def d_exact(source, x, u) -> int:
    """#{n <= x : P+(n) <= n^(1/u)}; n = 1 always counts."""
    nmax = _nmax(source, x)
    if u < 0:
        raise ValueError(f"u must be >= 0, got {u}")
    return sum(kernels.count_root_le(lpf, first, float(u))
               for first, lpf, _ in source.chunks(nmax))


def n_exact(source, x, y) -> int:
    """#{n <= x : k(n) <= y}."""
    nmax = _nmax(source, x)
    if y < 1:
        return 0
    bound = min(_floor_guarded(y), INT32_MAX)
    return sum(kernels.count_le(rad, bound) for _, _, rad in source.chunks(nmax))


def s_exact(source, x, theta, alpha) -> int:
    """#{n <= x : k(n) <= n^theta (log n)^alpha}; n = 1 always counts."""
    nmax = _nmax(source, x)
    if not 0 < theta <= 1:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    inv = 1.0 / theta
    if alpha == 0 and inv == round(inv) and inv <= 64:
        # k(n) <= n^(1/q) is k(n)^q <= n: decided exactly on ties
        return sum(kernels.count_root_le(rad, first, float(round(inv)))
                   for first, _, rad in source.chunks(nmax))
    return sum(kernels.count_kernel_threshold(rad, first, float(theta), float(alpha))
               for first, _, rad in source.chunks(nmax))


def dickman_sum_exact(source, x, numerator="log_n") -> float:
    """sum_{1 < n <= x} L / log P+(n) with L = log n or log x."""
    if x < 2:
        raise ValueError("x must be >= 2")
    if numerator not in ("log_n", "log_x"):
        raise ValueError(f"numerator must be 'log_n' or 'log_x', got {numerator!r}")
    nmax = _nmax(source, x)
    log_numer = -1.0 if numerator == "log_n" else math.log(x)
    return math.fsum(kernels.dickman_sum(lpf, first, log_numer)
                     for first, lpf, _ in source.chunks(nmax))


def dickman_integral(source, x) -> float:
    """int_0^inf (D(x, u) - 1) du from the jumps of the step function u -> D(x, u).

    D(x, u) - 1 counts the n in [2, x] with u <= log n / log P+(n), so the
    integrand drops by one at each sorted breakpoint.
    """
    nmax = _nmax(source, x)
    parts = []
    for first, lpf, _ in source.chunks(nmax):
        n = np.arange(first, first + len(lpf), dtype=np.float64)
        keep = n >= 2
        parts.append(np.log(n[keep]) / np.log(lpf[keep].astype(np.float64)))
    b = np.sort(np.concatenate(parts)) if parts else np.zeros(0)
    widths = np.diff(b, prepend=0.0)
    heights = np.arange(len(b), 0, -1, dtype=np.float64)
    return math.fsum(widths * heights)


def integral_identity_check(source, x) -> float:
    """|int_0^inf (D(x,u) - 1) du - sum_{1<n<=x} log n / log P+(n)|."""
    return abs(dickman_integral(source, x) - dickman_sum_exact(source, x, "log_n"))


@dataclass(frozen=True)
class CountQuery:
    """One exact count: kind is 'psi', 'D', 'N' or 'S'."""
    kind: str
    x: float
    y: float | None = None
    u: float | None = None
    theta: float | None = None
    alpha: float = 0.0

    def __post_init__(self):
        need = {"psi": ("y",), "N": ("y",), "D": ("u",), "S": ("theta",)}
        if self.kind not in need:
            raise ValueError(f"unknown count kind {self.kind!r}")
        for name in need[self.kind]:
            if getattr(self, name) is None:
                raise ValueError(f"{self.kind} needs {name}")
        if self.x < 1:
            raise ValueError("x must be >= 1")

    def run(self, source) -> int:
        if self.kind == "psi":
            return psi_exact(source, self.x, self.y)
        if self.kind == "N":
            return n_exact(source, self.x, self.y)
        if self.kind == "D":
            return d_exact(source, self.x, self.u)
        return s_exact(source, self.x, self.theta, self.alpha)
