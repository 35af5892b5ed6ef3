"""The ten acceptance checks, shared by ``friable selftest`` and the test suite.

Each check returns a ``CriterionResult``; a criterion passes only when its
numerical condition holds and it ran within its time budget.  ``Scale``
selects the problem size: ``Scale.full()`` is the stated acceptance size,
``Scale.reduced()`` replaces x = 1e7 by 1e6 for a faster self test.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from . import estimators as est
from . import kernel_saddle as ks
from . import naive, sandwich, sieves
from . import special_functions as sf

E_GAMMA_REF = 1.7810724179


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    time_limit: float
    skipped: bool = False

    def line(self) -> str:
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        return f"[{status}] {self.number:2d}. {self.title}: {self.detail} ({self.seconds:.2f}s / {self.time_limit:g}s)"


@dataclass(frozen=True)
class Scale:
    x_main: int = 10**7
    x_sandwich: int = 10**6
    x_naive: int = 10**4
    n_sandwich: int = 50
    n_naive: int = 200
    seed: int = 20240601

    @classmethod
    def full(cls):
        return cls()

    @classmethod
    def reduced(cls):
        return cls(x_main=10**6)


@dataclass
class Workspace:
    """Tables shared across checks, built on first use."""
    scale: Scale = field(default_factory=Scale)
    prime_limit: int = ks.DEFAULT_PRIME_LIMIT
    _tables: dict = field(default_factory=dict)
    _rho: dict = field(default_factory=dict)
    _ctx: ks.SaddleContext | None = None

    def tables(self, X):
        X = int(X)
        for limit, t in self._tables.items():
            if limit >= X:
                return t
        t = sieves.build_tables(X)
        self._tables[X] = t
        return t

    def rho(self, max_v=40.0, grid_step=sf.DEFAULT_GRID_STEP):
        key = (max_v, grid_step)
        if key not in self._rho:
            self._rho[key] = sf.build_rho_table(max_v, grid_step)
        return self._rho[key]

    def ctx(self):
        if self._ctx is None:
            self._ctx = ks.make_context(self.prime_limit)
        return self._ctx


def _timed(number, title, limit, body):
    t0 = time.perf_counter()
    ok, detail = body()
    dt = time.perf_counter() - t0
    if dt > limit:
        detail += "; over time budget"
    return CriterionResult(number, title, bool(ok) and dt <= limit, detail, dt, limit)


# ------------------------------------------------------------------ 1-5

def rho_correctness(ws: Workspace) -> CriterionResult:
    def body():
        table = sf.build_rho_table(20.0, sf.DEFAULT_GRID_STEP)
        fine = sf.build_rho_table(20.0, sf.DEFAULT_GRID_STEP / 2)
        v = table.nodes
        on12 = (v >= 1) & (v <= 2)
        err12 = float(np.max(np.abs(sf.rho(table, v[on12]) - (1 - np.log(v[on12])))))
        halving = float(np.max(np.abs(np.expm1(fine.log_values[::2] - table.log_values))))
        ok = err12 <= 1e-10 and halving <= 1e-9
        return ok, f"max |rho - (1 - log v)| on [1,2] = {err12:.3g}, step-halving rel = {halving:.3g}"
    return _timed(1, "rho correctness", 1.0, body)


def rho_integral(ws: Workspace) -> CriterionResult:
    def body():
        table = sf.build_rho_table(40.0)
        val = sf.rho_integral(table)
        diff = abs(val - E_GAMMA_REF)
        return diff <= 1e-6, f"int_0^40 rho = {val:.13f}, |diff| = {diff:.3g}"
    return _timed(2, "integral of rho equals e^gamma", 1.0, body)


def xi_r_estimates(ws: Workspace) -> CriterionResult:
    def body():
        table = sf.build_rho_table(101.0)
        vs = np.linspace(5.0, 100.0, 381)
        res = max(abs(math.expm1(sf.xi(v)) - v * sf.xi(v)) / (1 + v * abs(sf.xi(v))) for v in vs)
        rv = sf.r(table, vs)
        xv = np.array([sf.xi(v) for v in vs])
        c0 = float(np.max(vs * np.abs(rv - xv)))
        h = 1e-4
        rp = (sf.r(table, vs + h) - sf.r(table, vs - h)) / (2 * h)
        xp = np.array([sf.xi_prime(v) for v in vs])
        c1 = float(np.max(vs ** 2 * np.abs(rp - xp)))
        tol = est.TOLERANCES
        ok = res <= 1e-12 and c0 <= tol.r_xi_constant and c1 <= tol.r_xi_prime_constant
        return ok, f"scaled residual {res:.2g}, max v|r-xi| = {c0:.3f}, max v^2|r'-xi'| = {c1:.3f}"
    return _timed(3, "xi and r estimates", 1.0, body)


def euler_product_and_F(ws: Workspace) -> CriterionResult:
    def body():
        ctx = ws.ctx()
        part = ks.inverse_psi_partial_sum(ctx, 10**6)
        values = [ks.F(ctx, t) for t in range(1, 16)]
        increasing = all(b > a for a, b in zip(values, values[1:]))
        f15 = values[-1]
        ok = 1 - 1e-4 <= part <= 1 and increasing and 0.999 <= f15 < 1
        return ok, (f"(6/pi^2) sum_(n<=1e6) 1/(n psi(n)) = {part:.10f}, F increasing: {increasing}, "
                    f"F(15) = {f15:.6g}")
    return _timed(4, "Euler product and F", 30.0, body)


def sigma_saddle(ws: Workspace) -> CriterionResult:
    def body():
        ctx = ws.ctx()
        worst = 0.0
        for t in (2, 10, 100, 1000):
            s = ks.sigma_solve(ctx, t)
            worst = max(worst, abs(ks.g_prime(ctx, s) + t) / t)
        devs = []
        for t in (1e2, 1e3, 1e4):
            s = ks.sigma_solve(ctx, t)
            devs.append(abs(s - ks.sigma_asymptotic(t, 2)) / s)
        mono = devs[0] > devs[1] > devs[2]
        ok = worst <= 1e-8 and mono
        return ok, f"max residual/t = {worst:.2g}, order-2 deviations " + ", ".join(f"{d:.4f}" for d in devs)
    return _timed(5, "saddle point sigma_t", 120.0, body)


# ------------------------------------------------------------------ 6-10

def random_kernel_query(rng, x):
    """(theta, alpha) uniform on [0.3, 0.7] x [-1, 1], redrawn until v >= 4."""
    while True:
        theta, alpha = rng.uniform(0.3, 0.7), rng.uniform(-1.0, 1.0)
        lx = math.log(x)
        if (1 - theta) * lx - alpha * math.log(lx) >= 4:
            return theta, alpha


def sandwich_exactness(ws: Workspace) -> CriterionResult:
    def body():
        x = ws.scale.x_sandwich
        T = ws.tables(x)
        rng = random.Random(ws.scale.seed)
        psi_eval, n_eval = sandwich.exact_psi(T), sandwich.exact_n(T)
        bad = []
        for _ in range(ws.scale.n_sandwich):
            u = rng.uniform(1.5, 4.0)
            lo, up = sandwich.sandwich_D(psi_eval, x, u)
            d = sieves.d_exact(T, x, u)
            if not lo <= d <= up:
                bad.append(("D", u, lo, d, up))
        for _ in range(ws.scale.n_sandwich):
            theta, alpha = random_kernel_query(rng, x)
            lo, up = sandwich.sandwich_S(n_eval, x, theta, alpha)
            s = sieves.s_exact(T, x, theta, alpha)
            if not lo <= s <= up:
                bad.append(("S", theta, alpha, lo, s, up))
        n = 2 * ws.scale.n_sandwich
        return not bad, f"{len(bad)} violations in {n} queries at x = {x:g}" + (f": {bad[:3]}" if bad else "")
    return _timed(6, "sandwich exactness", 300.0, body)


def theorem_d(ws: Workspace) -> CriterionResult:
    def body():
        x = ws.scale.x_main
        T = ws.tables(x)
        table = ws.rho()
        C = est.TOLERANCES.d_constant
        ok, wins, parts = True, 0, []
        for u in (2.0, 2.5, 3.0):
            d = sieves.d_exact(T, x, u)
            rep = est.d_estimate(table, x, u, "expansion15")
            dev = abs(d - rep.value) / rep.error_scale
            ok &= dev <= C
            wins += abs(d - rep.value) < abs(d - rep.main_term)
            parts.append(f"u={u:g}: {dev:.3f}")
        ok &= wins >= 2
        return ok, f"x = {x:g}, normalized deviations " + ", ".join(parts) + f"; two-term closer in {wins}/3"
    return _timed(7, "D(x, u) second-order estimate", 180.0, body)


def dickman_sum(ws: Workspace) -> CriterionResult:
    def body():
        x = ws.scale.x_main
        T = ws.tables(x)
        C = est.TOLERANCES.dickman_constant
        ok, parts = True, []
        for num in ("log_n", "log_x"):
            exact = sieves.dickman_sum_exact(T, x, num)
            rep = est.dickman_sum_estimate(x, num)
            dev = abs(exact - rep.value) / rep.error_scale
            ok &= dev <= C
            if num == "log_n":
                beats = abs(exact - rep.value) < abs(exact - rep.main_term)
                ok &= beats
            parts.append(f"{num}: {dev:.3f}")
        ident = sieves.integral_identity_check(T, x)
        ok &= ident <= 1e-6
        return ok, (f"x = {x:g}, normalized deviations " + ", ".join(parts)
                    + f"; two-term beats one-term: {beats}; integral identity {ident:.3g}")
    return _timed(8, "Dickman sum", 180.0, body)


def theorem_s(ws: Workspace) -> CriterionResult:
    def body():
        x = ws.scale.x_main
        T = ws.tables(x)
        ctx = ws.ctx()
        lo_r, hi_r = est.TOLERANCES.s_ratio_bounds
        ok, parts = True, []
        for theta in (0.3, 0.5, 0.7):
            y = x ** theta
            n = sieves.n_exact(T, x, y)
            rel = abs(n - est.n_estimate(ctx, x, y).value) / n
            ratio = sieves.s_exact(T, x, theta, 0.0) / est.s_estimate(ctx, x, theta).value
            ok &= rel <= est.TOLERANCES.n_rel and lo_r <= ratio <= hi_r
            parts.append(f"theta={theta}: N rel {rel:.4f}, S ratio {ratio:.3f}")
        dists = []
        for xx in (x // 100, x // 10, x):
            ratio = sieves.s_exact(T, xx, 0.5, 0.0) / est.s_estimate(ctx, xx, 0.5).value
            dists.append(abs(ratio - 1))
        ok &= dists[0] >= dists[1] >= dists[2]
        return ok, "; ".join(parts) + ", |S ratio - 1| at theta=0.5: " + ", ".join(f"{d:.3f}" for d in dists)
    return _timed(9, "S(x; theta, alpha) estimate", 300.0, body)


def random_naive_query(rng, X):
    kind = rng.choice(("psi", "D", "N", "S"))
    x = rng.choice((rng.uniform(1, X), float(rng.randint(1, X))))
    if kind in ("psi", "N"):
        return sieves.CountQuery(kind, x, y=rng.choice((rng.uniform(1, X), float(rng.randint(1, 200)))))
    if kind == "D":
        return sieves.CountQuery(kind, x, u=rng.choice((rng.uniform(0, 6), float(rng.randint(1, 5)))))
    theta = rng.choice((rng.uniform(0.05, 1.0), 1 / rng.randint(1, 4)))
    return sieves.CountQuery(kind, x, theta=theta, alpha=rng.choice((0.0, rng.uniform(-1, 1))))


def naive_count(q: sieves.CountQuery) -> int:
    if q.kind == "psi":
        return naive.psi(q.x, q.y)
    if q.kind == "N":
        return naive.n_count(q.x, q.y)
    if q.kind == "D":
        return naive.d_count(q.x, q.u)
    return naive.s_count(q.x, q.theta, q.alpha)


def oracle_equivalence(ws: Workspace) -> CriterionResult:
    def body():
        X = ws.scale.x_naive
        T = sieves.build_tables(X)
        rng = random.Random(ws.scale.seed + 1)
        bad = []
        for _ in range(ws.scale.n_naive):
            q = random_naive_query(rng, X)
            a, b = q.run(T), naive_count(q)
            if a != b:
                bad.append((q, a, b))
        return not bad, f"{len(bad)} mismatches in {ws.scale.n_naive} queries at X = {X}" + (
            f": {bad[:3]}" if bad else "")
    return _timed(10, "exact counters match trial division", 10.0, body)


CRITERIA = (rho_correctness, rho_integral, xi_r_estimates, euler_product_and_F, sigma_saddle,
            sandwich_exactness, theorem_d, dickman_sum, theorem_s, oracle_equivalence)
HEAVY = {6, 7, 8, 9}


def run_all(scale: Scale | None = None, skip=(), workspace: Workspace | None = None, report=None):
    """Run every criterion in order; ``report`` is called with each result as it finishes."""
    ws = workspace or Workspace(scale or Scale.reduced())
    results = []
    for number, check in enumerate(CRITERIA, 1):
        if number in skip:
            res = CriterionResult(number, check.__name__.replace("_", " "), True, "skipped", 0.0, 0.0, True)
        else:
            res = check(ws)
        results.append(res)
        if report:
            report(res)
    return results
