"""Dickman's rho and the single-variable functions built on it.

rho is tabulated as log rho on a uniform grid by solving the averaged form

    v rho(v) = int_{v-1}^{v} rho(t) dt

one unit interval at a time.  Every node value is a positive average of
earlier values, so relative rounding errors are not amplified (marching the
delay equation itself excites a slowly decaying solution and loses all
relative accuracy near v = 15).  Quadrature and interpolation stencils never
straddle an integer, where rho has a kink of increasing order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

EULER_GAMMA = 0.57721566490153286
E_GAMMA = math.exp(EULER_GAMMA)

DEFAULT_GRID_STEP = 1.0 / 256
DEFAULT_INTERPOLATION_ORDER = 3
DEFAULT_QUADRATURE_POINTS = 6


@dataclass(frozen=True)
class RhoTable:
    grid_step: float
    max_v: float
    log_values: np.ndarray = field(repr=False)
    interpolation_order: int = DEFAULT_INTERPOLATION_ORDER

    @property
    def per_unit(self) -> int:
        return int(round(1.0 / self.grid_step))

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(len(self.log_values)) * self.grid_step


def _per_unit(grid_step):
    if not grid_step > 0:
        raise ValueError(f"grid_step must be positive, got {grid_step}")
    m = int(round(1.0 / grid_step))
    if m < 1 or abs(m * grid_step - 1.0) > 1e-12:
        raise ValueError(f"grid_step {grid_step} does not divide 1")
    return m


@lru_cache(maxsize=None)
def _interval_weights(q):
    """w[o, k] = int_o^{o+1} l_k(t) dt for the Lagrange basis on nodes 0..q-1."""
    w = np.empty((q, q))
    nodes = np.arange(q, dtype=float)
    for k in range(q):
        others = np.delete(nodes, k)
        poly = np.poly1d(others, r=True) / np.prod(k - others)
        prim = poly.integ()
        for o in range(q - 1):
            w[o, k] = prim(o + 1) - prim(o)
    return w


def _interval_matrix(m, q):
    """Rows: integrals over [k, k+1] (unit spacing) as weights on nodes 0..m."""
    q = min(q, m + 1)
    w = _interval_weights(q)
    out = np.zeros((m, m + 1))
    for k in range(m):
        start = min(max(k - (q // 2 - 1), 0), m + 1 - q)
        out[k, start:start + q] = w[k - start]
    return out


def _cumulative_quadrature(f, q):
    """Running integrals of node samples f[0..m] (unit spacing) from node 0."""
    pieces = _interval_matrix(len(f) - 1, q) @ f
    return np.concatenate([[0.0], np.cumsum(pieces)])


def build_rho_table(max_v=40.0, grid_step=DEFAULT_GRID_STEP,
                    interpolation_order=DEFAULT_INTERPOLATION_ORDER,
                    quadrature_points=DEFAULT_QUADRATURE_POINTS) -> RhoTable:
    """Tabulate log rho on [0, ceil(max_v)] with spacing ``grid_step``."""
    m = _per_unit(grid_step)
    if max_v < 2:
        raise ValueError(f"max_v must be at least 2, got {max_v}")
    if interpolation_order < 1 or interpolation_order + 1 > m:
        raise ValueError(f"interpolation_order {interpolation_order} unusable with {m} nodes per unit")
    segments = int(math.ceil(max_v - 1e-12))
    h = 1.0 / m
    pieces = _interval_matrix(m, quadrature_points)
    running = np.vstack([np.zeros(m + 1), np.cumsum(pieces, axis=0)])  # row j: int_0^j
    logs = np.zeros(segments * m + 1)
    j = np.arange(1, m + 1)
    for s in range(1, segments):
        base = logs[s * m]
        prev = np.exp(logs[(s - 1) * m:s * m + 1] - base)
        # int_{s-1+jh}^{s} rho / rho(s): tail sums of positive interval integrals
        tail = np.concatenate([np.cumsum((pieces @ prev)[::-1])[::-1], [0.0]])
        a = np.diag(s + j * h) - h * running[1:, 1:]
        y = np.linalg.solve(a, h * (tail[1:] + running[1:, 0]))
        logs[s * m + 1:(s + 1) * m + 1] = base + np.log(y)
    return RhoTable(grid_step=h, max_v=float(max_v), log_values=logs,
                    interpolation_order=interpolation_order)


def _check_v(table, v):
    v = np.asarray(v, dtype=float)
    if np.any(v < 0) or np.any(v > table.max_v + 1e-12):
        raise ValueError(f"v outside [0, {table.max_v}] for this table")
    return v


def log_rho(table: RhoTable, v):
    """Natural log of rho(v); scalar in, scalar out."""
    v = _check_v(table, v)
    scalar = v.ndim == 0
    v = np.atleast_1d(v)
    m = table.per_unit
    p = table.interpolation_order + 1
    pos = v * m
    # unit interval containing v; integers go to the interval on their left
    seg = np.maximum(np.ceil(v - 1e-15) - 1, 0).astype(np.int64)
    lo = seg * m
    start = np.clip(np.floor(pos).astype(np.int64) - (p // 2 - 1), lo, lo + m + 1 - p)
    t = pos - start
    out = np.zeros_like(v)
    for k in range(p):
        basis = np.ones_like(v)
        for i in range(p):
            if i != k:
                basis *= (t - i) / (k - i)
        out += basis * table.log_values[start + k]
    out = np.where(v <= 1.0, 0.0, out)
    return float(out[0]) if scalar else out


def rho(table: RhoTable, v):
    return np.exp(log_rho(table, v))


def rho_prime(table: RhoTable, v):
    """rho'(v) = -rho(v-1)/v; the right-hand value -1 is reported at v = 1."""
    v = _check_v(table, v)
    if v.ndim == 0:
        v = float(v)
        return 0.0 if v < 1 else -math.exp(log_rho(table, v - 1.0)) / v
    out = np.zeros_like(v)
    big = v >= 1
    out[big] = -np.exp(log_rho(table, v[big] - 1.0)) / v[big]
    return out


def r(table: RhoTable, v):
    """-rho'(v)/rho(v), evaluated in log space; zero on (0, 1]."""
    if np.any(np.asarray(v) <= 0):
        raise ValueError("r(v) needs v > 0")
    v = _check_v(table, v)
    if v.ndim == 0:
        v = float(v)
        if v <= 1.0:
            return 0.0
        return math.exp(log_rho(table, v - 1.0) - math.log(v) - log_rho(table, v))
    out = np.zeros_like(v)
    big = v > 1
    out[big] = np.exp(log_rho(table, v[big] - 1.0) - np.log(v[big]) - log_rho(table, v[big]))
    return out


def rho_integral(table: RhoTable, upper=None, quadrature_points=DEFAULT_QUADRATURE_POINTS):
    """int_0^upper rho(t) dt (upper defaults to the table's max_v)."""
    upper = table.max_v if upper is None else float(upper)
    _check_v(table, upper)
    m = table.per_unit
    total = min(upper, 1.0)
    whole = int(math.floor(upper + 1e-12))
    parts = [total]
    for s in range(1, min(whole, int(math.ceil(table.max_v - 1e-12)))):
        vals = np.exp(table.log_values[s * m:(s + 1) * m + 1])
        parts.append(_cumulative_quadrature(vals, quadrature_points)[-1] / m)
    if upper > whole and whole >= 1:
        # partial last unit interval: Gauss-Legendre on the interpolant
        xg, wg = np.polynomial.legendre.leggauss(20)
        t = whole + (upper - whole) * (xg + 1) / 2
        parts.append((upper - whole) / 2 * float(np.dot(wg, rho(table, t))))
    return math.fsum(parts)


# ---------------------------------------------------------------- xi

_XI_SERIES = (2.0, -4.0 / 3, 10.0 / 9, -136.0 / 135, 386.0 / 405, -524.0 / 567, 38698.0 / 42525)
_XI_SERIES_RADIUS = 1e-3


def _xi_residual(xi, v):
    return math.expm1(xi) - v * xi


def xi(v: float) -> float:
    """Nonzero root of e^xi = 1 + v*xi (negative for v < 1), xi(1) = 0."""
    v = float(v)
    if v <= 0:
        raise ValueError("xi(v) needs v > 0")
    d = v - 1.0
    if d == 0.0:
        return 0.0
    if abs(d) < _XI_SERIES_RADIUS:
        return sum(c * d ** (k + 1) for k, c in enumerate(_XI_SERIES))
    if v > 1:
        lo, hi = math.log(v), max(2.0 * math.log(v * max(math.log(v), 1.0)) + 2.0, 2.0)
        guess = math.log(v * math.log(v)) if v >= 3 else 2.0 * d
    else:
        lo, hi = -1.0 / v - 1.0, math.log(v)
        guess = 2.0 * d
    # the root is the only sign change of the residual on (lo, hi)
    f_lo = _xi_residual(lo, v)
    x = guess if lo < guess < hi else 0.5 * (lo + hi)
    tol = 1e-12
    for _ in range(50):
        f = _xi_residual(x, v)
        if f == 0.0:
            return x
        if (f < 0) == (f_lo < 0):
            lo, f_lo = x, f
        else:
            hi = x
        step = f / (math.exp(x) - v)
        nxt = x - step
        if abs(step) <= 4e-16 * max(1.0, abs(x)) and abs(f) <= tol * (1 + v * abs(x)):
            return nxt
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        x = nxt
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f = _xi_residual(mid, v)
        if abs(f) <= tol * (1 + v * abs(mid)) or hi - lo < 1e-16 * abs(mid):
            return mid
        if (f < 0) == (f_lo < 0):
            lo, f_lo = mid, f
        else:
            hi = mid
    raise ArithmeticError(f"xi({v}) did not converge")


def xi_prime(v: float) -> float:
    v = float(v)
    if v <= 0:
        raise ValueError("xi'(v) needs v > 0")
    d = v - 1.0
    if abs(d) < _XI_SERIES_RADIUS:
        return sum((k + 1) * c * d ** k for k, c in enumerate(_XI_SERIES))
    x = xi(v)
    return x / (1.0 + v * x - v)


# ---------------------------------------------------------------- zeta

@dataclass(frozen=True)
class ZetaEvaluator:
    """Real zeta through the alternating eta series.

    The series is accelerated with Borwein's Chebyshev weights, whose error
    after n terms is below 3 / (3 + sqrt 8)^n times 1/|1 - 2^(1-s)|.
    """
    acceleration_terms: int = 64
    target_abs_error: float = 1e-12

    def _weights(self):
        return _borwein_weights(self.acceleration_terms)

    def eta(self, s: float) -> float:
        s = float(s)
        if s <= 0:
            raise ValueError("only s > 0 is supported")
        k = np.arange(1, self.acceleration_terms + 1, dtype=float)
        return float(np.dot(self._weights(), np.exp(-s * np.log(k))))

    def zeta(self, s: float) -> float:
        s = float(s)
        if s <= 0:
            raise ValueError("only s > 0 is supported")
        if s == 1.0:
            raise ValueError("zeta has a pole at s = 1")
        return self.eta(s) / -math.expm1((1.0 - s) * math.log(2.0))

    def Z(self, s: float) -> float:
        """(s - 1) zeta(s) / s, continuous through s = 1."""
        s = float(s)
        if s <= 0:
            raise ValueError("only s > 0 is supported")
        if s == 1.0:
            return 1.0
        x = (s - 1.0) * math.log(2.0)
        factor = x / -math.expm1(-x) / math.log(2.0)
        return factor * self.eta(s) / s


@lru_cache(maxsize=8)
def _borwein_weights(n):
    # d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    terms = np.empty(n + 1)
    t = 1.0 / n
    for i in range(n + 1):
        if i > 0:
            t *= (n + i - 1) * 4.0 * (n - i + 1) / ((2 * i - 1) * (2 * i) * 1.0)
        terms[i] = t
    d = n * np.cumsum(terms)
    k = np.arange(n)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return sign * (d[n] - d[:n]) / d[n]


_DEFAULT_ZETA = ZetaEvaluator()


def zeta_real(s: float) -> float:
    return _DEFAULT_ZETA.zeta(s)


def Z(s: float) -> float:
    return _DEFAULT_ZETA.Z(s)
