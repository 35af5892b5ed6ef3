"""Closed-form asymptotic estimates with their error scales.

Every estimate returns an ``EstimateReport``.  Additive reports satisfy
value == main_term + correction_term, multiplicative ones
value == main_term * (1 + correction_term); ``form`` says which.  The error
scale is the magnitude of the remainder without its implied constant.

Range predicates never raise: a query outside the theorem's hypotheses is
still evaluated and carries ``in_range = False``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

from . import kernel_saddle as ks
from .special_functions import EULER_GAMMA, E_GAMMA, RhoTable, Z, log_rho, r, rho_prime


@dataclass(frozen=True)
class Tolerances:
    """Observed-constant thresholds used by the checks and the acceptance suite."""
    remainder_R1_constant: float = 3.0      # R1 <= C (log 2u)^(7/6) / (log y)^(3/2)
    consistency_constant: float = 3.0       # two D forms differ by <= C x rho(u) R1
    d_constant: float = 5.0                 # |D - estimate| <= C x rho(u) R1
    d_ratio_constant: float = 5.0           # D/Psi within C R of 1 - r(u)/log y
    dickman_constant: float = 5.0           # |sum - estimate| <= C x/(log x)^(3/2)
    psi_saddle_rel: float = 0.05
    n_rel: float = 0.02
    s_ratio_bounds: tuple = (0.5, 2.0)
    psi_bound_constant: float = 10.0        # Psi(x, x^(1/u)) <= C x e^(-u/2)
    r_xi_constant: float = 3.0
    r_xi_prime_constant: float = 20.0
    f_growth_constant: float = 2.0
    dsigma_constant: float = 5.0
    sandwich_kernel_gap: float = 3.0
    sandwich_friable_gap: float = 0.05


TOLERANCES = Tolerances()


@dataclass(frozen=True)
class HRange:
    """exp((log log x)^b) < y <= x / (log x)^c."""
    b: float
    c: float

    def __post_init__(self):
        if not self.b > 0 or not self.c >= 0:
            raise ValueError("HRange needs b > 0 and c >= 0")


THEOREM_RANGE = HRange(1.7, 10.001)


def hrange_contains(rng: HRange, x, y) -> bool:
    if x < 3:
        return False
    lx = math.log(x)
    lower = math.log(lx) ** rng.b          # compared in log y
    upper = lx - rng.c * math.log(lx)
    ly = math.log(y) if y > 0 else -math.inf
    return lower < ly <= upper


CSV_FIELDS = ("kind", "x", "y", "u", "theta", "alpha", "exact", "estimate", "main",
              "correction", "error_scale", "normalized_dev", "in_range")


def fmt(value) -> str:
    """Decimal form that round-trips through float()."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


@dataclass
class EstimateReport:
    value: float
    main_term: float
    correction_term: float
    error_scale: float
    in_range: bool
    notes: str = ""
    form: str = "additive"
    kind: str = ""
    params: dict = field(default_factory=dict)

    def check_decomposition(self) -> bool:
        if self.form == "additive":
            return self.value == self.main_term + self.correction_term
        return self.value == self.main_term * (1.0 + self.correction_term)

    def to_dict(self):
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def csv_row(self, exact=None) -> dict:
        p = self.params
        dev = None
        if exact is not None and self.error_scale > 0:
            dev = abs(exact - self.value) / self.error_scale
        return {
            "kind": self.kind, "x": fmt(p.get("x")), "y": fmt(p.get("y")), "u": fmt(p.get("u")),
            "theta": fmt(p.get("theta")), "alpha": fmt(p.get("alpha")), "exact": fmt(exact),
            "estimate": fmt(self.value), "main": fmt(self.main_term),
            "correction": fmt(self.correction_term), "error_scale": fmt(self.error_scale),
            "normalized_dev": fmt(dev), "in_range": fmt(self.in_range),
        }


def reports_to_csv(rows) -> str:
    """``rows`` is an iterable of (report, exact-or-None)."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for rep, exact in rows:
        w.writerow(rep.csv_row(exact))
    return buf.getvalue()


def _additive(kind, main, corr, err, in_range, notes="", **params):
    return EstimateReport(main + corr, main, corr, err, bool(in_range), notes, "additive", kind, params)


def _multiplicative(kind, main, corr, err, in_range, notes="", **params):
    return EstimateReport(main * (1.0 + corr), main, corr, err, bool(in_range), notes,
                          "multiplicative", kind, params)


# ------------------------------------------------------------------ friable side

def _u_of(x, y):
    if not (y >= 2 and x >= y):
        raise ValueError(f"need x >= y >= 2, got x={x}, y={y}")
    return math.log(x) / math.log(y)


def remainder_R(x, y) -> float:
    """sqrt(log 2u) / (sqrt(u) (log y)^(3/2))."""
    u = _u_of(x, y)
    return math.sqrt(math.log(2 * u)) / (math.sqrt(u) * math.log(y) ** 1.5)


def remainder_R1(x, y) -> float:
    u = _u_of(x, y)
    return remainder_R(x, y) + (math.log(2 * u) / math.log(y)) ** 2


def _x_rho(table, x, u):
    return math.exp(math.log(x) + log_rho(table, u))


def psi_saddle(table: RhoTable, x, y, rng: HRange = THEOREM_RANGE) -> EstimateReport:
    """x rho(u) Z(beta) with beta = 1 - r(u)/log y."""
    if y < 3:
        raise ValueError("psi_saddle needs y >= 3")
    u = _u_of(x, y)
    if u <= 1:
        raise ValueError("psi_saddle needs u > 1")
    ly = math.log(y)
    beta = 1.0 - r(table, u) / ly
    if beta <= 0:
        raise ValueError(f"beta = {beta} <= 0: y too small for u = {u}")
    main = _x_rho(table, x, u) * Z(beta)
    err = main * u / math.log(x) ** 2
    return _additive("psi", main, 0.0, err, hrange_contains(rng, x, y),
                     f"beta={beta!r}", x=x, y=y, u=u)


def psi_saias(table: RhoTable, x, y, rng: HRange = THEOREM_RANGE) -> EstimateReport:
    """x rho(u) + (gamma - 1) x rho'(u) / log y."""
    u = _u_of(x, y)
    if u <= 1:
        raise ValueError("psi_saias needs u > 1")
    ly = math.log(y)
    xr = _x_rho(table, x, u)
    corr = (EULER_GAMMA - 1.0) * x * rho_prime(table, u) / ly
    err = xr * (math.log(2 * u) / ly) ** 2
    return _additive("psi", xr, corr, err, hrange_contains(rng, x, y), "", x=x, y=y, u=u)


def d_estimate(table: RhoTable, x, u, form="expansion15", rng: HRange = THEOREM_RANGE) -> EstimateReport:
    """Estimate of D(x, u).

    ``thm11``: saddle Psi(x, y) times (1 - r(u)/log y), multiplicative.
    ``expansion15``: x rho(u) + gamma x rho'(u) / log y, additive.
    """
    if not u > 1:
        raise ValueError("d_estimate needs u > 1")
    y = x ** (1.0 / u)
    ly = math.log(x) / u
    inside = hrange_contains(rng, x, y)
    if form == "thm11":
        ps = psi_saddle(table, x, y, rng)
        err = ps.value * remainder_R(x, y)
        return _multiplicative("D", ps.value, -r(table, u) / ly, err, inside,
                               "thm11", x=x, y=y, u=u)
    if form == "expansion15":
        xr = _x_rho(table, x, u)
        corr = EULER_GAMMA * x * rho_prime(table, u) / ly
        return _additive("D", xr, corr, xr * remainder_R1(x, y), inside,
                         "expansion15", x=x, y=y, u=u)
    raise ValueError(f"unknown form {form!r}")


def dickman_sum_estimate(x, numerator="log_n") -> EstimateReport:
    """e^gamma x - gamma e^gamma x/log x, or with coefficient (1 - gamma) e^gamma for log x numerators."""
    if x < 3:
        raise ValueError("x must be >= 3")
    lx = math.log(x)
    coef = {"log_n": -EULER_GAMMA, "log_x": 1.0 - EULER_GAMMA}.get(numerator)
    if coef is None:
        raise ValueError(f"numerator must be 'log_n' or 'log_x', got {numerator!r}")
    return _additive("dickman-sum", E_GAMMA * x, coef * E_GAMMA * x / lx, x / lx ** 1.5, True,
                     numerator, x=x)


# ------------------------------------------------------------------ kernel side

def eta(x) -> float:
    lx = math.log(x)
    return math.sqrt(2.0 / (lx * math.log(lx)))


def n_estimate(ctx: ks.SaddleContext, x, y, b=0.6) -> EstimateReport:
    """y F(v), v = log(x/y), with error scale y F(v) y^(-eta_x)."""
    if x < 3 or y < 1:
        raise ValueError("n_estimate needs x >= 3, y >= 1")
    lx = math.log(x)
    v = lx - math.log(y)
    if v <= 0:
        raise ValueError(f"v = log(x/y) = {v} must be positive")
    main = y * ks.F(ctx, v)
    err = main * y ** -eta(x)
    inside = math.log(y) > lx ** b and y <= x and v >= 2
    notes = "F reduced accuracy" if ks.F_reduced_accuracy(ctx, v) else ""
    return _additive("N", main, 0.0, err, inside, notes, x=x, y=y)


def s_estimate(ctx: ks.SaddleContext, x, theta, alpha=0.0, c=0.25, A=1.0) -> EstimateReport:
    """(y F(v) sigma_v / theta) (1 - sigma_v / theta) with y = x^theta (log x)^alpha."""
    if x < 3 or not 0 < theta <= 1:
        raise ValueError("s_estimate needs x >= 3 and 0 < theta <= 1")
    lx = math.log(x)
    y = math.exp(theta * lx + alpha * math.log(lx))
    v = lx - math.log(y)
    if v < 1:
        raise ValueError(f"v = {v} < 1: sigma_v undefined")
    sig = ks.sigma_solve(ctx, v)
    q = sig / theta
    main = y * ks.F(ctx, v) * q
    err = main * (q * q + math.sqrt(math.log(v) / v))
    width = lx ** -c
    inside = width <= theta <= 1 - width and abs(alpha) <= A
    return _multiplicative("S", main, -q, err, inside, f"c={c!r} A={A!r} sigma_v={sig!r}",
                           x=x, y=y, theta=theta, alpha=alpha)
