import io
import math
import random
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from friable import estimators as est
from friable import kernel_saddle as ks
from friable import sandwich as sw
from friable import sieves


# ------------------------------------------------------------------ schedules

def test_friable_schedule_instantiation():
    s = sw.default_schedule_friable(1e6, 2)
    lx = math.log(1e6)
    assert s.epsilon == 1 / math.sqrt(lx * math.log(4))
    assert s.K == math.ceil(2 * math.log(lx) / s.epsilon) and not s.capped
    assert s.xs[-1] <= 1e6 / lx ** 2
    assert s.xs[-1] >= 2


@given(st.floats(16, 1e12), st.floats(1, 20))
def test_friable_schedule_invariants(x, u):
    s = sw.default_schedule_friable(x, u)
    assert s.epsilon > 0 and s.K >= 1 and s.xs[-1] >= 2
    assert np.all(np.diff(s.xs) < 0) and np.all(np.diff(s.ys) < 0)


def test_kernel_schedule_instantiation():
    s = sw.default_schedule_kernel(1e7, 0.5)
    v = 0.5 * math.log(1e7)
    assert v == pytest.approx(8.06, abs=5e-3)
    assert s.epsilon == math.sqrt(math.log(v) / v)
    assert s.K_uncapped == math.floor(2 * math.log(v) / (s.epsilon * 0.5))
    assert s.K >= 1 and s.xs[-1] >= 2


@pytest.mark.parametrize("alpha", [0.0, 0.5, -0.5])
def test_kernel_end_point_offset(alpha):
    x, theta = 1e7, 0.5
    s = sw.default_schedule_kernel(x, theta, alpha)
    lx = math.log(x)
    v = (1 - theta) * lx - alpha * math.log(lx)
    end = math.log(s.xs[-1] / s.ys[-1])
    assert abs(end - (v - (1 - theta) * s.K * s.epsilon)) <= 1


@given(st.floats(1e3, 1e12), st.floats(0.05, 0.8), st.floats(-1, 1))
def test_kernel_schedule_invariants(x, theta, alpha):
    lx = math.log(x)
    if (1 - theta) * lx - alpha * math.log(lx) < 4:
        with pytest.raises(ValueError):
            sw.default_schedule_kernel(x, theta, alpha)
        return
    v = (1 - theta) * lx - alpha * math.log(lx)
    eps = math.sqrt(math.log(v) / v)
    if not sw._kernel_K_ok(lx, eps, 1, theta, alpha):
        # alpha < 0 and y(x) already below the threshold at n = 2: no valid bracket
        assert alpha < 0
        with pytest.raises(ValueError):
            sw.default_schedule_kernel(x, theta, alpha)
        return
    s = sw.default_schedule_kernel(x, theta, alpha)
    assert s.K >= 1 and s.xs[-1] >= 2 and s.K * s.epsilon <= lx / 2
    assert s.ys[-1] >= max(1.0, 2 ** theta * math.log(2) ** alpha)
    assert np.all(np.diff(s.xs) < 0) and np.all(np.diff(s.ys) < 0)


def test_schedule_validation():
    with pytest.raises(ValueError):
        sw.default_schedule_friable(10, 2)
    with pytest.raises(ValueError):
        sw.default_schedule_friable(1e6, 0.5)
    with pytest.raises(ValueError):
        sw.default_schedule_kernel(1e6, 1.0)
    with pytest.raises(ValueError):
        sw.SandwichSchedule(0.5, 40, "friable", 1e6, u=2)
    with pytest.raises(ValueError):
        sw.SandwichSchedule(0.0, 1, "kernel", 1e6, theta=0.5)
    with pytest.raises(ValueError):
        sw.SandwichSchedule(0.1, 1, "other", 1e6)


def test_schedule_refinement_keeps_end_point():
    s = sw.default_schedule_friable(1e5, 3)
    r = s.refined()
    assert r.K == 2 * s.K and r.xs[-1] == pytest.approx(s.xs[-1], rel=1e-12)


# ------------------------------------------------------------------ exact evaluators

def test_friable_exact_bracket(tables_1e6):
    x = 1e6
    lo, hi = sw.sandwich_D(sw.exact_psi(tables_1e6), x, 2)
    assert lo <= sieves.d_exact(tables_1e6, x, 2) <= hi


def test_kernel_exact_bracket(tables_1e6):
    x = 1e6
    lo, hi = sw.sandwich_S(sw.exact_n(tables_1e6), x, 0.5, 0.0)
    assert lo <= sieves.s_exact(tables_1e6, x, 0.5, 0.0) <= hi


def test_single_step(tables_1e6):
    x, u = 1e6, 2.5
    s = sw.SandwichSchedule(0.3, 1, "friable", x, u=u)
    (x0, x1), (y0, y1) = s.xs, s.ys
    psi = lambda a, b: sieves.psi_exact(tables_1e6, a, b)
    lo, hi = sw.sandwich_D(sw.exact_psi(tables_1e6), x, u, s)
    assert hi == psi(x0, y0) - psi(x1, y0) + psi(x1, y1)
    assert lo == psi(x0, y1) - psi(x1, y1)
    assert lo <= sieves.d_exact(tables_1e6, x, u) <= hi


def test_random_exact_brackets(tables_1e6):
    rng = random.Random(77)
    psi, n = sw.exact_psi(tables_1e6), sw.exact_n(tables_1e6)
    for _ in range(50):
        x = math.exp(rng.uniform(math.log(100), math.log(1e6)))
        u = rng.uniform(1, 6)
        lo, hi = sw.sandwich_D(psi, x, u)
        assert lo <= sieves.d_exact(tables_1e6, x, u) <= hi
    done = 0
    while done < 50:
        x = math.exp(rng.uniform(math.log(1e3), math.log(1e6)))
        theta, alpha = rng.uniform(0.1, 0.9), rng.uniform(-1, 1)
        try:
            sched = sw.default_schedule_kernel(x, theta, alpha)
        except ValueError:
            continue
        lo, hi = sw.sandwich_S(n, x, theta, alpha, sched)
        assert lo <= sieves.s_exact(tables_1e6, x, theta, alpha) <= hi
        done += 1


def test_refinement_monotonicity_reported(tables_small):
    # empirical: halving eps usually narrows the bracket; violations are reported only
    rng = random.Random(3)
    psi = sw.exact_psi(tables_small)
    bad = []
    for _ in range(20):
        x, u = rng.uniform(100, 1e4), rng.uniform(1, 4)
        s = sw.default_schedule_friable(x, u)
        lo1, hi1 = sw.sandwich_D(psi, x, u, s)
        lo2, hi2 = sw.sandwich_D(psi, x, u, s.refined())
        if hi2 - lo2 > hi1 - lo1:
            bad.append((x, u, hi1 - lo1, hi2 - lo2))
    if bad:
        warnings.warn(f"refinement widened {len(bad)}/20 brackets: {bad[:3]}")


# ------------------------------------------------------------------ asymptotic evaluators

def test_friable_asymptotic_gap(rho40):
    lo, hi = sw.sandwich_D(sw.asymptotic_psi(rho40), 1e6, 2)
    assert lo <= hi
    assert (hi - lo) / hi <= est.TOLERANCES.sandwich_friable_gap


def test_kernel_asymptotic_gap(ctx):
    x, theta = 1e7, 0.5
    lo, hi = sw.sandwich_S(sw.asymptotic_n(ctx), x, theta)
    v = theta * math.log(x)
    bound = 3 * (ks.sigma_solve(ctx, v) / theta + math.sqrt(math.log(v) / v))
    assert lo <= hi and (hi - lo) / hi <= bound


def test_asymptotic_brackets_contain_estimates(rho40, ctx):
    lo, hi = sw.sandwich_D(sw.asymptotic_psi(rho40), 1e7, 2.5)
    assert lo <= est.d_estimate(rho40, 1e7, 2.5).value <= hi * 1.1


# ------------------------------------------------------------------ plumbing

def test_schedule_mismatch(tables_small):
    s = sw.default_schedule_friable(1e4, 2)
    with pytest.raises(ValueError):
        sw.sandwich_D(sw.exact_psi(tables_small), 1e4, 3, s)
    with pytest.raises(ValueError):
        sw.sandwich_S(sw.exact_n(tables_small), 1e4, 0.3, 0.0, s)


def test_deterministic(rho40):
    a = sw.sandwich_D(sw.asymptotic_psi(rho40), 3.3e6, 2.2)
    b = sw.sandwich_D(sw.asymptotic_psi(rho40), 3.3e6, 2.2)
    assert a == b


def test_step_error_carries_index(tables_small):
    s = sw.default_schedule_friable(1e4, 2)
    calls = []

    def flaky(x, y):
        calls.append(x)
        if len(calls) > 9:
            raise ValueError("boom")
        return 1.0

    with pytest.raises(sw.SandwichStepError) as info:
        sw.sandwich_D(sw.TwoVarEvaluator(flaky), 1e4, 2, s)
    assert info.value.step == 2
    assert isinstance(info.value.__cause__, ValueError)


def test_trace_rows(tables_small):
    buf = io.StringIO()
    lo, hi = sw.sandwich_D(sw.exact_psi(tables_small), 1e4, 2, trace=buf)
    rows = buf.getvalue().splitlines()
    s = sw.default_schedule_friable(1e4, 2)
    assert rows[0] == "k,x_k,y_k,lower_partial,upper_partial"
    assert len(rows) == s.K + 2
    last = rows[-1].split(",")
    assert float(last[3]) == lo and float(last[4]) == hi


@given(st.floats(100, 1e4), st.floats(1, 5))
@settings(max_examples=40)
def test_upper_at_least_lower(x, u):
    t = _small()
    lo, hi = sw.sandwich_D(sw.exact_psi(t), x, u)
    assert hi >= lo


_T = []


def _small():
    if not _T:
        _T.append(sieves.build_tables(10**4))
    return _T[0]
