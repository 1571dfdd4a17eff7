"""Independent checks for the phase-based solvers.

* :func:`shoot_second_order` integrates the model in flux form
  ``(w, v = mu wdot^(p-1))`` instead of phase/amplitude variables.
* :func:`fd_eigenvalue_p2` discretizes the linear (``p = 2``) Neumann problem on
  ``[-d/2, d/2]`` and finds the first positive eigenvalue by inverse iteration.
* :func:`check_gradient_comparison` and :func:`check_maxima_fit` test the
  derivative comparison between models and the attainability of maxima.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, linalg, optimize

from .models import (IntegrationError, ModelFamily, ModelSolution, Params, alpha_critical,
                     find_abar, horizon_length, solve_model)


class ConvergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# flux-form shooting


@dataclass
class FluxSolution:
    family: ModelFamily
    a: float
    params: Params
    b: float
    delta: float
    m: float
    eps: float
    sol: object = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.b)


def _bootstrap(family: ModelFamily, a: float, params: Params, eps: float):
    """``(w, v)`` at ``a + eps`` from one term of the local expansion.

    With ``w ~ -1`` near ``a``: ``v(s) ~ lam int_a^s mu`` and
    ``wdot = (v/mu)^(1/(p-1))``.
    """
    lam, q = params.lam, 1.0 / (params.p - 1.0)

    def mu(s):
        return float(family.mu(s, params))

    def v_at(s):
        return lam * integrate.quad(mu, a, s, epsabs=0.0, epsrel=1e-13)[0]

    v_end = v_at(a + eps)

    def wdot(s):
        if s <= a:
            return 0.0
        return (v_at(s) / mu(s)) ** q

    rise = integrate.quad(wdot, a, a + eps, epsabs=0.0, epsrel=1e-12)[0]
    return -1.0 + rise, v_end


def _flux_once(family: ModelFamily, a: float, params: Params, eps: float,
               rtol: float, atol: float) -> FluxSolution:
    p, lam = params.p, params.lam
    q = 1.0 / (p - 1.0)
    w0, v0 = _bootstrap(family, a, params, eps)

    def rhs(t, y):
        with np.errstate(over="ignore"):
            mu = float(family.mu(t, params))
        wdot = math.copysign(abs(y[1] / mu) ** q, y[1])
        return [wdot, -lam * mu * math.copysign(abs(y[0]) ** (p - 1.0), y[0])]

    def critical(t, y):
        return y[1]

    critical.terminal = True
    critical.direction = -1.0
    res = integrate.solve_ivp(rhs, (a + eps, a + horizon_length(params)), [w0, v0],
                              method="DOP853", rtol=rtol, atol=atol, events=critical,
                              dense_output=True)
    if res.status < 0:
        raise IntegrationError(res.message)
    if res.status == 1:
        b = float(res.t_events[0][0])
        m = float(res.y_events[0][0][0])
        return FluxSolution(family, a, params, b, b - a, m, eps, res.sol)
    return FluxSolution(family, a, params, math.inf, math.inf, 0.0, eps, res.sol)


def shoot_second_order(family: ModelFamily, a: float, params: Params, *, eps: float | None = None,
                       rtol: float = 1e-12, atol: float = 1e-13,
                       b_tol: float = 1e-10) -> FluxSolution:
    """``b``, ``delta``, ``m`` of the model ``w_{i,a}`` from the flux-form system.

    ``wdot = (v/mu)^(1/(p-1))`` is not Lipschitz at ``v = 0`` for ``p > 2``, so the
    integration starts ``eps`` after ``a``; ``eps`` is halved until ``b`` settles.
    """
    family = ModelFamily(family)
    family.check(a)
    if eps is not None:
        return _flux_once(family, a, params, eps, rtol, atol)
    eps = 1e-5 / max(1.0, params.alpha, params.root_k)
    prev = _flux_once(family, a, params, eps, rtol, atol)
    for _ in range(20):
        eps *= 0.5
        cur = _flux_once(family, a, params, eps, rtol, atol)
        if cur.finite == prev.finite and (not cur.finite or abs(cur.b - prev.b) < b_tol):
            return cur
        prev = cur
    raise IntegrationError("flux-form start did not settle under eps-halving")


# ---------------------------------------------------------------------------
# linear finite-difference eigenvalue


def neumann_pencil(n: float, k: float, d: float, N: int):
    """Stiffness (banded, upper form) and lumped mass of ``-(mu w')' = lam mu w`` on
    ``[-d/2, d/2]`` with ``mu = cosh(sqrt(-k) t)^(n-1)`` and Neumann ends."""
    if N < 100:
        raise ValueError("N must be at least 100")
    x = np.linspace(-d / 2.0, d / 2.0, N + 1)
    h = d / N
    r = math.sqrt(-k)
    mid = 0.5 * (x[:-1] + x[1:])
    mu_mid = np.cosh(r * mid) ** (n - 1.0)
    mu = np.cosh(r * x) ** (n - 1.0)
    diag = np.zeros(N + 1)
    diag[:-1] += mu_mid / h
    diag[1:] += mu_mid / h
    off = -mu_mid / h
    mass = mu * h
    mass[0] *= 0.5
    mass[-1] *= 0.5
    return x, diag, off, mass


def fd_eigenvalue_p2(n: float, k: float, d: float, N: int = 4000, tol: float = 1e-12,
                     maxiter: int = 500) -> float:
    """Smallest positive eigenvalue of the discrete Neumann pencil.

    Inverse iteration on ``K - s M`` with a negative shift ``s`` (so the shifted
    matrix is positive definite), removing the constant mode by M-orthogonal
    projection at every step.
    """
    x, diag, off, mass = neumann_pencil(n, k, d, N)
    ones = np.ones_like(x)

    def deflate(y):
        return y - (ones @ (mass * y)) / mass.sum() * ones

    shift = -(math.pi / d) ** 2
    ab = np.zeros((2, N + 1))
    ab[0, 1:] = off
    ab[1] = diag - shift * mass
    chol = linalg.cholesky_banded(ab)

    def stiff(y):
        out = diag * y
        out[:-1] += off * y[1:]
        out[1:] += off * y[:-1]
        return out

    y = deflate(x.copy())
    lam_old = math.inf
    for _ in range(maxiter):
        y = deflate(linalg.cho_solve_banded((chol, False), mass * y))
        y /= math.sqrt(y @ (mass * y))
        lam = float(y @ stiff(y))
        if abs(lam - lam_old) <= tol * abs(lam):
            return lam
        lam_old = lam
    raise ConvergenceError("inverse iteration did not converge")


# ---------------------------------------------------------------------------
# gradient comparison


@dataclass
class GradientReport:
    applicable: bool
    passed: bool
    max_excess: float  # max of wdot_1 - wdot_2 at matched values
    samples: int
    message: str = ""


def _invert(sol: ModelSolution, s: float) -> float:
    """``t`` in ``[a, b]`` with ``w(t) = s``; ``w`` increases on that interval."""
    lo, hi = sol.a, sol.b
    return optimize.brentq(lambda t: float(sol.w(t)) - s, lo, hi, xtol=1e-14, rtol=1e-15)


def check_gradient_comparison(sol1: ModelSolution, sol2: ModelSolution, samples: int = 200,
                              tol: float = 1e-8) -> GradientReport:
    """Compare ``wdot_1(w_1^-1(s))`` with ``wdot_2(w_2^-1(s))`` on the common range.

    Only applicable when both models have a finite critical point and
    ``w_1[a_1, b_1]`` is contained in ``w_2[a_2, b_2]``, i.e. ``m_1 <= m_2``.
    """
    if not (sol1.finite and sol2.finite):
        return GradientReport(False, True, math.nan, 0, "theorem not applicable: infinite diameter")
    if sol1.m > sol2.m + 1e-12:
        return GradientReport(False, True, math.nan, 0,
                              f"theorem not applicable: range [-1, {sol1.m}] not inside [-1, {sol2.m}]")
    # interior values only; both derivatives vanish at s = -1
    levels = -1.0 + (sol1.m + 1.0) * (np.arange(1, samples + 1) / (samples + 1))
    excess = -math.inf
    for s in levels:
        d1 = float(sol1.wdot(_invert(sol1, s)))
        d2 = float(sol2.wdot(_invert(sol2, s)))
        excess = max(excess, abs(d1) - abs(d2))
    passed = excess <= tol
    return GradientReport(True, passed, excess, samples,
                          "" if passed else f"wdot_1 exceeds wdot_2 by {excess:.3e}")


# ---------------------------------------------------------------------------
# maxima fit


@dataclass
class MaximaFit:
    found: bool
    family: ModelFamily | None = None
    a: float = math.nan
    m: float = math.nan
    info: dict = field(default_factory=dict)


def _bisect_a(family: ModelFamily, params: Params, ustar: float, lo: float, hi: float,
              increasing: bool, tol: float) -> tuple[float, float]:
    """Bisection on ``a`` for ``m(family, a) = ustar`` given a monotone bracket."""
    m = math.nan
    mid = lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        m = solve_model(family, mid, params).m
        if abs(m - ustar) <= tol or hi - lo <= 1e-13 * max(1.0, abs(mid)):
            break
        if (m < ustar) == increasing:
            lo = mid
        else:
            hi = mid
    return mid, m


def check_maxima_fit(params: Params, ustar: float, tol: float = 1e-9) -> MaximaFit:
    """Find ``(i, a)`` with ``m(i, a) = ustar``, or report that none exists.

    Above the critical frequency ``m(3, .)`` decreases from 1 to ``m_2`` on
    ``[-a_bar, inf)`` and ``m(1, .)`` increases from ``m(1, 0)`` to ``m_2``; at or
    below it ``m(3, .)`` sweeps ``(0, 1]``.
    """
    if not 0.0 < ustar <= 1.0:
        raise ValueError("ustar must lie in (0, 1]")
    abar = find_abar(params)
    if abs(ustar - 1.0) <= tol:
        return MaximaFit(True, ModelFamily.COSH, -abar, 1.0)
    scale = 1.0 / params.root_k
    supercritical = params.alpha > alpha_critical(params.p, params.n, params.k)
    if not supercritical:
        hi = -abar + scale
        while solve_model(ModelFamily.COSH, hi, params).m > ustar:
            hi = -abar + 2.0 * (hi + abar)
            if hi > 1e4 * scale:
                return MaximaFit(False, info={"reason": "m(3, a) did not fall below ustar"})
        a, m = _bisect_a(ModelFamily.COSH, params, ustar, -abar, hi, False, tol)
        return MaximaFit(True, ModelFamily.COSH, a, m)

    m2 = solve_model(ModelFamily.EXP, 0.0, params).m
    if abs(ustar - m2) <= tol:
        return MaximaFit(True, ModelFamily.EXP, 0.0, m2, {"m2": m2})
    if ustar > m2:
        hi = -abar + scale
        while solve_model(ModelFamily.COSH, hi, params).m > ustar:
            hi = -abar + 2.0 * (hi + abar)
            if hi > 1e4 * scale:
                return MaximaFit(False, info={"m2": m2, "reason": "bracket search failed"})
        a, m = _bisect_a(ModelFamily.COSH, params, ustar, -abar, hi, False, tol)
        return MaximaFit(True, ModelFamily.COSH, a, m, {"m2": m2})
    m0 = solve_model(ModelFamily.SINH, 0.0, params).m
    if ustar < m0 - tol:
        return MaximaFit(False, info={"m0": m0, "m2": m2, "reason": "ustar below m(1, 0)"})
    if ustar <= m0:
        return MaximaFit(True, ModelFamily.SINH, 0.0, m0, {"m0": m0, "m2": m2})
    hi = scale
    while solve_model(ModelFamily.SINH, hi, params).m < ustar:
        hi *= 2.0
        if hi > 1e4 * scale:
            return MaximaFit(False, info={"m0": m0, "m2": m2, "reason": "bracket search failed"})
    a, m = _bisect_a(ModelFamily.SINH, params, ustar, 0.0, hi, True, tol)
    return MaximaFit(True, ModelFamily.SINH, a, m, {"m0": m0, "m2": m2})
