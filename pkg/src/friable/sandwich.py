"""Discretization sandwich for two-condition counts.

A count with a threshold depending on n itself (P+(n) <= n^(1/u), or
k(n) <= n^theta (log n)^alpha) is bracketed by telescoping sums of a
one-condition count f(x, y) over the grid x_k = x e^(-k eps):

    lower = sum_{k<K} f(x_k, y_{k+1}) - f(x_{k+1}, y_{k+1})
    upper = sum_{k<K} f(x_k, y_k)     - f(x_{k+1}, y_k)     + f(x_K, y_K)

f is any ``TwoVarEvaluator``: an exact table count or an asymptotic formula.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import estimators, sieves


class SandwichStepError(ArithmeticError):
    def __init__(self, step, x, y, cause):
        super().__init__(f"sandwich step k={step} (x={x!r}, y={y!r}): {cause}")
        self.step = step


@dataclass(frozen=True)
class SandwichSchedule:
    epsilon: float
    K: int
    kind: str                  # "friable" or "kernel"
    x: float
    u: float | None = None
    theta: float | None = None
    alpha: float = 0.0
    K_uncapped: int | None = None

    def __post_init__(self):
        if self.kind not in ("friable", "kernel"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not self.epsilon > 0 or self.K < 1:
            raise ValueError("schedule needs epsilon > 0 and K >= 1")
        if self.x * math.exp(-self.K * self.epsilon) < 2:
            raise ValueError("x_K < 2")
        if not np.all(np.diff(self.ys) < 0):
            raise ValueError("y_k must decrease strictly along the schedule")

    @property
    def capped(self) -> bool:
        return self.K_uncapped is not None and self.K_uncapped != self.K

    @property
    def xs(self) -> np.ndarray:
        k = np.arange(self.K + 1, dtype=np.float64)
        return np.exp(math.log(self.x) - k * self.epsilon)

    @property
    def ys(self) -> np.ndarray:
        lx = np.log(self.x) - np.arange(self.K + 1, dtype=np.float64) * self.epsilon
        if self.kind == "friable":
            return np.exp(lx / self.u)
        return np.exp(self.theta * lx + self.alpha * np.log(lx))

    def refined(self, factor=2) -> "SandwichSchedule":
        """Same end point x_K with eps / factor and factor * K steps."""
        return SandwichSchedule(self.epsilon / factor, self.K * factor, self.kind, self.x,
                                self.u, self.theta, self.alpha, self.K_uncapped and self.K_uncapped * factor)


@dataclass(frozen=True)
class TwoVarEvaluator:
    func: Callable[[float, float], float]
    label: str = "exact"        # "exact" or "asymptotic"

    def __call__(self, x, y):
        return self.func(x, y)


def exact_psi(source) -> TwoVarEvaluator:
    return TwoVarEvaluator(lambda x, y: sieves.psi_exact(source, x, y), "exact")


def exact_n(source) -> TwoVarEvaluator:
    return TwoVarEvaluator(lambda x, y: sieves.n_exact(source, x, y), "exact")


def asymptotic_psi(table) -> TwoVarEvaluator:
    """Saddle estimate of Psi; x itself once y >= x (every n <= x qualifies)."""
    def f(x, y):
        if y >= x:
            return float(x)
        return estimators.psi_saddle(table, x, y).value
    return TwoVarEvaluator(f, "asymptotic")


def asymptotic_n(ctx) -> TwoVarEvaluator:
    """y F(log(x/y)); x once y >= x."""
    def f(x, y):
        if y >= x:
            return float(x)
        return estimators.n_estimate(ctx, x, y).value
    return TwoVarEvaluator(f, "asymptotic")


def _cap_K(x, eps, K):
    kmax = math.floor((math.log(x) - math.log(2.0)) / eps)
    if kmax < 1:
        raise ValueError(f"x = {x} too small for eps = {eps}")
    return min(K, kmax)


def default_schedule_friable(x, u) -> SandwichSchedule:
    """eps = 1/sqrt(log x log 2u), K = ceil(2 log log x / eps), capped so that x_K >= 2."""
    if x < 16:
        raise ValueError("x must be >= 16")
    if u < 1:
        raise ValueError("u must be >= 1")
    lx = math.log(x)
    eps = 1.0 / math.sqrt(lx * math.log(2 * u))
    K = math.ceil(2 * math.log(lx) / eps)
    return SandwichSchedule(eps, _cap_K(x, eps, K), "friable", x, u=u, K_uncapped=K)


def _kernel_K_ok(lx, eps, K, theta, alpha):
    """The threshold t -> theta t + alpha log t must rise on [log x_K, log x], and
    y_K must cover n = 1 and n = 2, so that N(x_K, y_K) bounds every n <= x_K."""
    lk = lx - K * eps
    if lk <= 0 or theta + alpha / lk <= 0:
        return False
    ly = theta * lk + alpha * math.log(lk)
    return ly >= 0 and ly >= theta * math.log(2.0) + alpha * math.log(math.log(2.0))


def default_schedule_kernel(x, theta, alpha=0.0) -> SandwichSchedule:
    """eps = sqrt(log v / v), K = floor(2 log v / (eps theta)), K <= log x / (2 eps), x_K >= 2.

    K is lowered further while the threshold is not increasing below x_K
    or y_K < max(1, 2^theta (log 2)^alpha); that only happens for alpha < 0.
    """
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    if x < 16:
        raise ValueError("x must be >= 16")
    lx = math.log(x)
    v = (1 - theta) * lx - alpha * math.log(lx)
    if v < 4:
        raise ValueError(f"v = log(x/y) = {v:.6g} < 4")
    eps = math.sqrt(math.log(v) / v)
    K = math.floor(2 * math.log(v) / (eps * theta))
    K_cap = _cap_K(x, eps, max(min(K, math.floor(lx / (2 * eps))), 1))
    while K_cap > 1 and not _kernel_K_ok(lx, eps, K_cap, theta, alpha):
        K_cap -= 1
    if not _kernel_K_ok(lx, eps, K_cap, theta, alpha):
        raise ValueError("no valid kernel schedule: threshold not increasing near x")
    return SandwichSchedule(eps, K_cap, "kernel", x,
                            theta=theta, alpha=alpha, K_uncapped=K)


class _Neumaier:
    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, v):
        t = self.s + v
        if abs(self.s) >= abs(v):
            self.c += (self.s - t) + v
        else:
            self.c += (v - t) + self.s
        self.s = t

    @property
    def value(self):
        return self.s + self.c


def _run(evaluate, sched, trace):
    xs, ys = sched.xs, sched.ys

    def f(k, x, y):
        try:
            return float(evaluate(float(x), float(y)))
        except Exception as exc:
            raise SandwichStepError(k, float(x), float(y), exc) from exc

    lower, upper = _Neumaier(), _Neumaier()
    writer = None
    if trace is not None:
        writer = csv.writer(trace, lineterminator="\n")
        writer.writerow(["k", "x_k", "y_k", "lower_partial", "upper_partial"])
    for k in range(sched.K):
        lower.add(f(k, xs[k], ys[k + 1]) - f(k, xs[k + 1], ys[k + 1]))
        upper.add(f(k, xs[k], ys[k]) - f(k, xs[k + 1], ys[k]))
        if writer:
            writer.writerow([k, *(estimators.fmt(float(t)) for t in (xs[k], ys[k], lower.value, upper.value))])
    upper.add(f(sched.K, xs[-1], ys[-1]))
    if writer:
        writer.writerow([sched.K, *(estimators.fmt(float(t)) for t in (xs[-1], ys[-1], lower.value, upper.value))])
    return lower.value, upper.value


def sandwich_D(evaluate, x, u, sched: SandwichSchedule | None = None, trace=None):
    """(lower, upper) bracketing D(x, u) from a Psi-type evaluator."""
    sched = sched or default_schedule_friable(x, u)
    if sched.kind != "friable" or sched.x != x or sched.u != u:
        raise ValueError("schedule does not match this friable query")
    return _run(evaluate, sched, trace)


def sandwich_S(evaluate, x, theta, alpha=0.0, sched: SandwichSchedule | None = None, trace=None):
    """(lower, upper) bracketing S(x; theta, alpha) from an N-type evaluator."""
    sched = sched or default_schedule_kernel(x, theta, alpha)
    if sched.kind != "kernel" or sched.x != x or sched.theta != theta or sched.alpha != alpha:
        raise ValueError("schedule does not match this kernel query")
    return _run(evaluate, sched, trace)
