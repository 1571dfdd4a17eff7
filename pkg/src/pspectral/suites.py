"""Verification suites shared by ``pspectral verify`` and the acceptance tests.

Every check returns a :class:`CheckResult`.  Tolerances are fixed here; the
``margin`` field is ``tolerance - observed`` (positive means passing with room).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import eigen, models, oracle, ptrig
from .models import ModelFamily, Params

SEED = 20240611


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str = ""
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: margin={self.margin:.3e} ({self.seconds:.2f}s) {self.detail}"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _supercritical(rng, p_range=(1.5, 4.0), n_range=(2.0, 6.0), k_range=(-2.0, -0.2),
                   factor=(1.3, 3.0)) -> Params:
    p = rng.uniform(*p_range)
    n = rng.uniform(*n_range)
    k = rng.uniform(*k_range)
    abar = models.alpha_critical(p, n, k)
    return Params.from_alpha(p, n, k, abar * rng.uniform(*factor))


# 1
@_timed
def ptrig_identity(samples: int = 10_000, tol: float = 1e-10, budget: float = 5.0) -> CheckResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for p in (1.5, 2.0, 3.0, 5.0):
        span = 2.0 * ptrig.pi_p(p)
        t = rng.uniform(-span, span, samples)
        s, c = ptrig.sincosp(p, t)
        worst = max(worst, float(np.max(np.abs(np.abs(s) ** p + np.abs(c) ** p - 1.0))))
    elapsed = time.perf_counter() - t0
    ok = worst <= tol and elapsed < budget
    return CheckResult("ptrig identity", ok, tol - worst, f"max dev {worst:.2e}, {elapsed:.2f}s")


def pi_p_quadrature(p: float) -> float:
    """``2 int_0^1 (1 - s^p)^(-1/p) ds`` with the endpoint factor ``(1-s)^(-1/p)``
    handled by an algebraic quadrature weight."""
    def smooth(s):
        if s == 1.0:
            return p ** (-1.0 / p)
        return ((1.0 - s**p) / (1.0 - s)) ** (-1.0 / p)

    val, _ = integrate.quad(smooth, 0.0, 1.0, weight="alg", wvar=(0.0, -1.0 / p),
                            epsabs=1e-14, epsrel=1e-14, limit=200)
    return 2.0 * val


# 2
@_timed
def pi_p_closed_form(tol: float = 1e-10, tol_pi: float = 1e-12) -> CheckResult:
    worst = 0.0
    for p in (1.2, 1.5, 2.0, 3.0, 5.0, 8.0):
        worst = max(worst, abs(ptrig.pi_p(p) - pi_p_quadrature(p)))
    dev_pi = abs(ptrig.pi_p(2.0) - math.pi)
    ok = worst <= tol and dev_pi <= tol_pi
    return CheckResult("pi_p closed form", ok, min(tol - worst, tol_pi - dev_pi),
                       f"quad dev {worst:.2e}, |pi_2 - pi| = {dev_pi:.2e}")


# 3
@_timed
def flat_limit(tol: float = 1e-3, budget: float = 10.0) -> CheckResult:
    t0 = time.perf_counter()
    worst = 0.0
    for p in (1.5, 2.0, 3.0):
        for n in (2.0, 5.0):
            for d in (1.0, math.pi):
                lam = eigen.lambda_bar(n, -1e-8, d, p).value
                worst = max(worst, abs(lam - eigen.flat_lambda(d, p)) / lam)
    elapsed = time.perf_counter() - t0
    ok = worst <= tol and elapsed < budget
    return CheckResult("k->0 degeneration", ok, tol - worst, f"max rel {worst:.2e}, {elapsed:.2f}s")


# 4
@_timed
def linear_oracle(tol: float = 1e-4, N: int = 4000, budget: float = 30.0) -> CheckResult:
    t0 = time.perf_counter()
    worst = 0.0
    rows = []
    for n in (2.0, 3.0, 5.0):
        for d in (1.0, math.pi, 5.0):
            lam = eigen.lambda_bar(n, -1.0, d, 2.0).value
            fd = oracle.fd_eigenvalue_p2(n, -1.0, d, N)
            rel = abs(lam - fd) / lam
            rows.append((n, d, lam, fd, rel))
            worst = max(worst, rel)
    elapsed = time.perf_counter() - t0
    ok = worst <= tol and elapsed < budget
    return CheckResult("linear FD oracle", ok, tol - worst, f"max rel {worst:.2e}, {elapsed:.2f}s",
                       data={"rows": rows})


# 5
@_timed
def cross_formulation(tol: float = 1e-7) -> CheckResult:
    worst = 0.0
    count = 0
    for p in (1.5, 2.0, 3.0):
        for n in (2.0, 3.0, 5.0):
            for lam in (5.0, 10.0, 20.0):
                params = Params(p, n, -1.0, lam)
                a = -0.5 * models.find_abar(params)
                s1 = models.solve_model(ModelFamily.COSH, a, params)
                s2 = oracle.shoot_second_order(ModelFamily.COSH, a, params)
                if not (s1.finite and s2.finite):
                    return CheckResult("cross-formulation", False, -math.inf,
                                       f"infinite diameter at p={p}, n={n}, lam={lam}")
                worst = max(worst, abs(s1.delta - s2.delta) / s1.delta, abs(s1.m - s2.m) / s1.m)
                count += 1
    return CheckResult("cross-formulation", worst <= tol, tol - worst,
                       f"{count} points, max rel {worst:.2e}")


# 6
@_timed
def monotonicity(tol: float = 1e-10, points: int = 21, n_direction: float = 1.0) -> CheckResult:
    """21-point grids give 20 consecutive comparisons per parameter.

    ``n_direction=+1`` asserts lambda_bar nondecreasing in ``n``; ``-1`` asserts
    nonincreasing, which is what the damping term in the phase equation implies
    (larger ``n`` speeds the phase up on ``t > 0``) and what the finite-difference
    oracle shows at ``p = 2``.
    """
    worst = math.inf
    failures = []
    sweeps = {}

    def sweep(label, values, fn, sign):
        nonlocal worst
        lams = [fn(v) for v in values]
        sweeps[label] = (values, lams)
        bad, low, where = 0, math.inf, ""
        for v0, v1, l0, l1 in zip(values, values[1:], lams, lams[1:]):
            # sign=+1: nondecreasing in the parameter
            margin = sign * (l1 - l0) / max(abs(l0), abs(l1))
            worst = min(worst, margin)
            if margin < low:
                low, where = margin, f"{v0:.4g}->{v1:.4g}"
            bad += margin < -tol
        if bad:
            failures.append(f"{label}: {bad}/{len(values) - 1} comparisons fail, "
                            f"worst margin {low:.2e} at {label}={where}")

    ds = list(np.linspace(0.5, 5.0, points))
    sweep("d", ds, lambda d: eigen.lambda_bar(3.0, -1.0, d, 3.0).value, -1.0)
    ks = list(np.linspace(-4.0, -0.05, points))
    sweep("k", ks, lambda k: eigen.lambda_bar(3.0, k, 2.0, 1.5).value, 1.0)
    ns = list(np.linspace(1.0, 9.0, points))
    sweep("n", ns, lambda n: eigen.lambda_bar(n, -1.0, 2.0, 2.0).value, n_direction)
    word = "nondecreasing" if n_direction > 0 else "nonincreasing"
    return CheckResult(f"monotonicity (d down, k up, n {word})", not failures, worst + tol,
                       "; ".join(failures) or f"{3 * (points - 1)} comparisons", data=sweeps)


# 7
@_timed
def jensen_diameter(cases: int = 10) -> CheckResult:
    rng = np.random.default_rng(SEED + 7)
    failures = []
    worst = math.inf
    for _ in range(cases):
        params = _supercritical(rng)
        bound = ptrig.pi_p(params.p) / params.alpha
        abar = models.find_abar(params)
        tag = f"(p={params.p:.3f}, n={params.n:.3f}, k={params.k:.3f}, lam={params.lam:.3f})"
        checks = []
        for a in (0.0, rng.uniform(0.1, 3.0)):
            checks.append((f"delta(1,{a:.3f}) > pi_p/alpha",
                           models.solve_model(ModelFamily.SINH, a, params).delta - bound))
        checks.append(("delta(2,0) > pi_p/alpha",
                       models.solve_model(ModelFamily.EXP, 0.0, params).delta - bound))
        checks.append(("delta(3,-abar) < pi_p/alpha",
                       bound - models.solve_model(ModelFamily.COSH, -abar, params).delta))
        for shift in (-1.0, -0.25, 0.25, 1.0):
            checks.append((f"delta(3,-abar{shift:+}) > 2 abar",
                           models.solve_model(ModelFamily.COSH, -abar + shift, params).delta
                           - 2.0 * abar))
        for label, margin in checks:
            worst = min(worst, margin)
            if not margin > 0.0:
                failures.append(f"{label} {tag}: {margin:.2e}")
    return CheckResult("Jensen/diameter", not failures, worst,
                       "; ".join(failures) or f"{cases} parameter sets")


# 8
@_timed
def alpha_bar_p2(tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for n in (2.0, 3.0, 5.0):
        for k in (-0.25, -1.0, -4.0):
            expected = (n - 1.0) * math.sqrt(-k) / 2.0
            worst = max(worst, abs(models.alpha_critical(2.0, n, k) - expected))
    return CheckResult("alpha_bar at p=2", worst <= tol, tol - worst, f"max dev {worst:.2e}")


# 9
@_timed
def m_landscape(tol: float = 1e-3) -> CheckResult:
    failures = []
    worst = math.inf
    for params in (Params(2.0, 3.0, -1.0, 8.0), Params(3.0, 4.0, -0.5, 6.0),
                   Params(1.5, 2.5, -2.0, 12.0)):
        if not params.alpha > models.alpha_critical(params.p, params.n, params.k):
            failures.append(f"{params}: not supercritical")
            continue
        scale = 1.0 / params.root_k
        m2 = models.solve_model(ModelFamily.EXP, 0.0, params).m
        abar = models.find_abar(params)
        grid = [1.0, 2.0, 4.0, 8.0, 16.0]
        m3 = [models.solve_model(ModelFamily.COSH, a, params).m
              for a in [-abar, -abar / 2.0, 0.0] + [g * scale for g in grid]]
        m1 = [models.solve_model(ModelFamily.SINH, a, params).m
              for a in [0.0, 0.25 * scale, 0.5 * scale] + [g * scale for g in grid]]
        if not all(x > y for x, y in zip(m3, m3[1:])):
            failures.append(f"{params}: m(3, .) not strictly decreasing {m3}")
        if not all(x < y for x, y in zip(m1, m1[1:])):
            failures.append(f"{params}: m(1, .) not strictly increasing {m1}")
        # the far end of each landscape sits within integration noise of m2
        if not all(x > m2 - 1e-9 for x in m3) or not all(x < m2 + 1e-9 for x in m1):
            failures.append(f"{params}: m_2 does not separate the two landscapes")
        dev = max(abs(m3[-1] - m2), abs(m1[-1] - m2))
        worst = min(worst, tol - dev)
        if dev > tol:
            failures.append(f"{params}: |m(i, 16/sqrt(-k)) - m2| = {dev:.2e}")
    return CheckResult("m-landscape", not failures, worst, "; ".join(failures) or "3 parameter sets")


# 10
@_timed
def round_trip(cases: int = 10, tol: float = 1e-6) -> CheckResult:
    rng = np.random.default_rng(SEED + 10)
    worst = 0.0
    for _ in range(cases):
        p = rng.uniform(1.5, 4.0)
        n = rng.uniform(1.5, 6.0)
        k = rng.uniform(-2.0, -0.1)
        lam = float(np.exp(rng.uniform(math.log(0.2), math.log(30.0))))
        delta = eigen.delta_bar(n, k, lam, p).value
        back = eigen.lambda_bar(n, k, delta, p).value
        worst = max(worst, abs(back - lam) / lam)
    return CheckResult("round trip", worst <= tol, tol - worst, f"max rel {worst:.2e}")


def random_model_pair(rng, params: Params):
    """Two finite models ordered so that the first range sits inside the second."""
    abar = models.find_abar(params)
    scale = 1.0 / params.root_k

    def draw():
        fam = ModelFamily(int(rng.integers(1, 4)))
        if fam is ModelFamily.SINH:
            a = float(rng.uniform(0.0, 4.0 * scale))
        elif fam is ModelFamily.EXP:
            a = float(rng.uniform(-2.0, 2.0))
        else:
            a = float(-abar + rng.uniform(-2.0, 4.0) * scale)
        return models.solve_model(fam, a, params)

    s1, s2 = draw(), draw()
    return (s1, s2) if s1.m <= s2.m else (s2, s1)


# 11
@_timed
def gradient_comparison(pairs: int = 20, tol: float = 1e-8) -> CheckResult:
    rng = np.random.default_rng(SEED + 11)
    failures = []
    worst = math.inf
    for _ in range(pairs):
        params = _supercritical(rng, factor=(1.5, 3.0))
        s1, s2 = random_model_pair(rng, params)
        rep = oracle.check_gradient_comparison(s1, s2, samples=60, tol=tol)
        if not rep.applicable or not rep.passed:
            failures.append(rep.message)
            continue
        worst = min(worst, tol - rep.max_excess)
    return CheckResult("gradient comparison", not failures, worst,
                       "; ".join(failures) or f"{pairs} pairs")


# 12
@_timed
def sharpness(tol: float = 0.01) -> CheckResult:
    d, k = 2.0, -1.0
    seq = [models.sharpness_diameter_bound(i, d, k) for i in range(1, 101)]
    decreasing = all(x > y for x, y in zip(seq, seq[1:])) and all(x > d for x in seq)
    limit_gap = models.sharpness_diameter_bound(10**8, d, k) - d
    direct = float(np.hypot(d, np.pi * np.cosh(np.sqrt(-k) * d / 2.0) / 10.0))
    rel = abs(seq[9] - direct) / direct
    ok = decreasing and rel <= tol and 0.0 < limit_gap < 1e-12
    return CheckResult("sharpness bound", ok, tol - rel,
                       f"i=10: {seq[9]:.6f} vs {direct:.6f}; gap at i=1e8 {limit_gap:.1e}")


def monotonicity_checked() -> CheckResult:
    """Shipped verification: lambda_bar nonincreasing in ``n``."""
    return monotonicity(n_direction=-1.0)


CRITERIA = {
    "ptrig": [ptrig_identity, pi_p_closed_form],
    "flat": [flat_limit],
    "fd": [linear_oracle],
    "cross": [cross_formulation],
    "monotonicity": [monotonicity_checked],
    "diameter": [jensen_diameter],
    "alpha": [alpha_bar_p2],
    "landscape": [m_landscape],
    "roundtrip": [round_trip],
    "gradient": [gradient_comparison],
    "sharpness": [sharpness],
}


def run_suite(name: str = "all") -> list[CheckResult]:
    if name == "all":
        checks = [c for group in CRITERIA.values() for c in group]
    elif name in CRITERIA:
        checks = CRITERIA[name]
    else:
        raise KeyError(f"unknown suite {name!r}; choose from all, {', '.join(CRITERIA)}")
    return [check() for check in checks]
