"""The lower bound ``lambda_bar(n, k, d)`` and its inverse ``delta_bar(n, k, lambda)``.

``lambda_bar`` is the value of ``lambda`` for which the family-3 phase started at
``phi(0) = 0`` reaches ``pi_p/2`` exactly at ``t = d/2``.  Equivalently the odd
model ``w_{3,-d/2}`` has a Neumann critical point at ``d/2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .models import (ModelFamily, Params, PrueferState, Stop, find_abar, integrate_pruefer,
                     solve_model)
from .ptrig import check_p, pi_p

RESIDUAL_TOL = 1e-9


class BracketError(RuntimeError):
    pass


@dataclass
class EigenEstimate:
    value: float
    bracket: tuple[float, float]
    iterations: int
    residual: float
    extra: dict = field(default_factory=dict)


def shoot_phase(params: Params, half_d: float) -> float:
    """``phi(half_d)`` for the family-3 phase with ``phi(0) = 0``."""
    if not half_d > 0.0:
        raise ValueError("half_d must be positive")
    traj = integrate_pruefer(ModelFamily.COSH, PrueferState(0.0, 0.0, 0.0), params,
                             Stop(horizon=half_d))
    return float(traj.state(half_d)[0])


def flat_lambda(d: float, p: float) -> float:
    """``(p-1) (pi_p/d)^p``, the ``k = 0`` value and an upper bound for every ``k < 0``."""
    return (p - 1.0) * (pi_p(p) / d) ** p


def _shooting(n: float, k: float, d: float, p: float):
    half = pi_p(p) / 2.0

    def g(lam):
        return shoot_phase(Params(p, n, k, lam), d / 2.0) - half

    return g


def lambda_bar(n: float, k: float, d: float, p: float = 2.0, tol: float = 1e-10,
               max_halvings: int = 60, maxiter: int = 200) -> EigenEstimate:
    """Root of ``g(lam) = phi(d/2) - pi_p/2`` by safeguarded secant/bisection.

    The upper end of the bracket is :func:`flat_lambda`; the lower end is found by
    halving until ``g < 0``.  Iterates never leave the bracket.
    """
    p = check_p(p)
    if not d > 0.0:
        raise ValueError("d must be positive")
    if not k < 0.0:
        raise ValueError("k must be negative")
    g = _shooting(n, k, d, p)
    hi = flat_lambda(d, p)
    g_hi = g(hi)
    if abs(g_hi) <= RESIDUAL_TOL * 1e-3:
        return EigenEstimate(hi, (hi, hi), 0, abs(g_hi))
    if g_hi < 0.0:
        raise BracketError(f"g(lambda_hi={hi!r}) = {g_hi!r} < 0; upper bracket invalid")
    lo, g_lo = hi, g_hi
    halvings = 0
    while g_lo >= 0.0:
        if halvings >= max_halvings:
            raise BracketError(f"no sign change after {max_halvings} halvings from {hi!r}")
        hi, g_hi = lo, g_lo
        lo *= 0.5
        g_lo = g(lo)
        halvings += 1

    x, gx = hi, g_hi
    it = 0
    side = 0  # Illinois bookkeeping: which end was retained last
    for it in range(1, maxiter + 1):
        width = hi - lo
        x = hi - g_hi * (hi - lo) / (g_hi - g_lo)
        # fall back to bisection when the secant point hugs an end
        if not lo + 0.01 * width < x < hi - 0.01 * width:
            x = 0.5 * (lo + hi)
        gx = g(x)
        if gx == 0.0:
            lo = hi = x
            break
        if gx > 0.0:
            hi, g_hi = x, gx
            if side == 1:
                g_lo *= 0.5
            side = 1
        else:
            lo, g_lo = x, gx
            if side == -1:
                g_hi *= 0.5
            side = -1
        if hi - lo <= tol * hi and abs(gx) <= RESIDUAL_TOL:
            break
    else:
        raise BracketError(f"root finder did not converge in {maxiter} iterations")
    residual = abs(gx)
    if residual > RESIDUAL_TOL:
        raise BracketError(f"residual {residual!r} above {RESIDUAL_TOL}")
    if x > flat_lambda(d, p) * (1.0 + 1e-12):
        raise BracketError("lambda_bar exceeds the k = 0 value")
    return EigenEstimate(x, (lo, hi), it + halvings, residual, {"halvings": halvings})


def delta_bar(n: float, k: float, lam: float, p: float = 2.0) -> EigenEstimate:
    """Minimal model diameter ``2 a_bar`` at fixed ``lambda``; inverse of :func:`lambda_bar`."""
    params = Params(p, n, k, lam)
    abar = find_abar(params)
    residual = abs(shoot_phase(params, abar) - pi_p(p) / 2.0)
    return EigenEstimate(2.0 * abar, (2.0 * abar, 2.0 * abar), 0, residual, {"a_bar": abar})


@dataclass
class DiameterReport:
    a_bar: float
    delta_min: float
    rows: list[tuple[float, float, float]]  # (a, delta, delta - 2 a_bar)
    ok: bool
    failures: list[str] = field(default_factory=list)


def verify_diameter_minimality(params: Params, a_grid, *, eq_tol: float = 1e-8) -> DiameterReport:
    """Check ``delta(3, a) > 2 a_bar`` for ``a != -a_bar`` and equality at ``a = -a_bar``."""
    abar = find_abar(params)
    dmin = 2.0 * abar
    rows, failures = [], []
    for a in sorted(float(x) for x in a_grid):
        sol = solve_model(ModelFamily.COSH, a, params)
        margin = sol.delta - dmin
        rows.append((a, sol.delta, margin))
        if abs(a + abar) <= 1e-12 * max(1.0, abar):
            if abs(margin) > eq_tol:
                failures.append(f"a={a}: |delta - 2 a_bar| = {abs(margin):.3e} at the odd model")
        elif not margin > 0.0:
            failures.append(f"a={a}: delta - 2 a_bar = {margin:.3e} <= 0")
    return DiameterReport(abar, dmin, rows, not failures, failures)
