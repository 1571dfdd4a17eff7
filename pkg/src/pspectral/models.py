"""One-dimensional model functions and their phase/amplitude integration.

A model ``w = w_{i,a}`` solves

    d/dt (mu_i wdot^(p-1)) + lam mu_i w^(p-1) = 0,   w(a) = -1, wdot(a) = 0,

with ``mu_1 = sinh^(n-1)``, ``mu_2 = exp((n-1) . )``, ``mu_3 = cosh^(n-1)`` of
``sqrt(-k) t``.  It is integrated in p-polar coordinates ``alpha w = e sinp(phi)``,
``wdot = e cosp(phi)``, where

    phi'   = alpha - T/(p-1) cosp(phi)^(p-1) sinp(phi)
    log e' = T/(p-1) |cosp(phi)|^p

and ``T = -mu'/mu``.  The first critical point ``b`` after ``a`` is where
``phi`` reaches ``pi_p/2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import OdeSolution, solve_ivp

from .ptrig import _branch, check_p, pi_p, signed_pow

# integrator tolerances; the residual checks downstream rely on these
RTOL = 1e-12
ATOL = 1e-12
METHOD = "DOP853"


class DomainError(ValueError):
    pass


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Params:
    """Exponent ``p``, dimension ``n``, curvature constant ``k < 0``, eigenvalue ``lam``."""

    p: float
    n: float
    k: float
    lam: float

    def __post_init__(self):
        check_p(self.p)
        if not self.n >= 1.0:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not self.k < 0.0:
            raise ValueError(f"k must be < 0, got {self.k}")
        if not self.lam > 0.0:
            raise ValueError(f"lambda must be > 0, got {self.lam}")

    @property
    def alpha(self) -> float:
        return (self.lam / (self.p - 1.0)) ** (1.0 / self.p)

    @property
    def root_k(self) -> float:
        return math.sqrt(-self.k)

    @classmethod
    def from_alpha(cls, p: float, n: float, k: float, alpha: float) -> Params:
        return cls(p, n, k, (p - 1.0) * alpha**p)

    def replace(self, **changes) -> Params:
        values = dict(p=self.p, n=self.n, k=self.k, lam=self.lam)
        values.update(changes)
        return Params(**values)


class ModelFamily(enum.IntEnum):
    SINH = 1
    EXP = 2
    COSH = 3

    @property
    def lower(self) -> float:
        """Left end of the domain (``0`` for ``sinh``, otherwise ``-inf``)."""
        return 0.0 if self is ModelFamily.SINH else -math.inf

    def check(self, t: float, *, open_=False) -> None:
        if self is ModelFamily.SINH and (t < 0.0 or (open_ and t == 0.0)):
            raise DomainError(f"t={t} outside the domain of family 1")

    def tau(self, t, k: float):
        r = math.sqrt(-k)
        if self is ModelFamily.SINH:
            return np.sinh(r * t)
        if self is ModelFamily.EXP:
            return np.exp(r * t)
        return np.cosh(r * t)

    def mu(self, t, params: Params):
        return self.tau(t, params.k) ** (params.n - 1.0)


def weight_T(family: ModelFamily, t: float, params: Params) -> float:
    """Drift ``T_i = -mu_i'/mu_i``."""
    family = ModelFamily(family)
    family.check(t, open_=True)
    c = (params.n - 1.0) * params.root_k
    if family is ModelFamily.SINH:
        return -c / math.tanh(params.root_k * t)
    if family is ModelFamily.EXP:
        return -c
    return -c * math.tanh(params.root_k * t)


def _drift(family: ModelFamily, params: Params):
    c = (params.n - 1.0) * params.root_k
    r = params.root_k
    if c == 0.0:
        return lambda t: 0.0
    if family is ModelFamily.SINH:
        return lambda t: -c / math.tanh(r * t)
    if family is ModelFamily.EXP:
        return lambda t: -c
    return lambda t: -c * math.tanh(r * t)


def _drift_array(family: ModelFamily, params: Params, t):
    c = (params.n - 1.0) * params.root_k
    r = params.root_k * np.asarray(t, dtype=float)
    if family is ModelFamily.SINH:
        return -c / np.tanh(r)
    if family is ModelFamily.EXP:
        return np.full_like(r, -c)
    return -c * np.tanh(r)


def pruefer_rhs(family: ModelFamily, params: Params):
    """Right-hand side ``(t, [phi, log_e]) -> [phi', log_e']``."""
    p = params.p
    q = p - 1.0
    alpha = params.alpha
    T = _drift(ModelFamily(family), params)

    def rhs(t, y):
        s, c = _branch(p, y[0])
        cq = math.copysign(abs(c) ** q, c)
        drift = T(t) / q
        return [alpha - drift * cq * s, drift * abs(c) ** p]

    return rhs


@dataclass(frozen=True)
class PrueferState:
    t: float
    phi: float
    log_e: float

    def cartesian(self, params: Params) -> tuple[float, float]:
        """``(w, wdot)`` for this state."""
        s, c = _branch(params.p, self.phi)
        e = math.exp(self.log_e)
        return e * s / params.alpha, e * c


@dataclass(frozen=True)
class Stop:
    """Stop condition: ``phi`` reaching ``target`` (if given) or ``t`` reaching ``horizon``.

    ``stall`` additionally stops when ``phi' < 0`` with ``phi < 0`` and ``t > 0``;
    for family 3 this is irreversible, so the phase never reaches ``pi_p/2``.
    """

    horizon: float
    target: float | None = None
    stall: bool = False


@dataclass
class Trajectory:
    family: ModelFamily
    params: Params
    start: PrueferState
    sol: object  # scipy OdeSolution
    t_end: float
    reason: str  # "target", "horizon" or "stall"
    event_time: float | None
    nfev: int

    def state(self, t):
        y = self.sol(t)
        return y[0], y[1]

    @property
    def t_start(self) -> float:
        return self.start.t


def integrate_pruefer(family: ModelFamily, start: PrueferState, params: Params, stop: Stop,
                      rtol: float = RTOL, atol: float = ATOL) -> Trajectory:
    """Integrate the phase/amplitude system from ``start`` until ``stop`` triggers.

    Integration runs backward when ``stop.horizon < start.t``.  Failing to reach
    the target before the horizon is reported through ``reason``, not raised.
    """
    family = ModelFamily(family)
    family.check(start.t, open_=True)
    if stop.horizon == start.t:
        raise ValueError("empty integration interval")
    rhs = pruefer_rhs(family, params)
    forward = stop.horizon > start.t
    sign = 1.0 if forward else -1.0
    events = []
    if stop.target is not None:
        target = stop.target

        def hit(t, y):
            return y[0] - target

        hit.terminal = True
        hit.direction = sign
        events.append(hit)
    if stop.stall:
        def stalled(t, y):
            if t <= 0.0 or y[0] >= 0.0:
                return 1.0
            return rhs(t, y)[0]

        stalled.terminal = True
        stalled.direction = -1.0
        events.append(stalled)

    # |sinp|^p in the amplitude equation is not smooth at phi = 0 when p < 2;
    # restarting there keeps the kink on a step boundary
    def crossing(t, y):
        return y[0]

    crossing.terminal = True
    crossing.direction = sign

    pieces, nfev = [], 0
    t0, y0 = start.t, [start.phi, start.log_e]
    split = sign * start.phi < 0.0
    reason, event_time = "horizon", None
    while True:
        evs = events + ([crossing] if split else [])
        res = solve_ivp(rhs, (t0, stop.horizon), y0, method=METHOD, rtol=rtol, atol=atol,
                        dense_output=True, events=evs or None)
        if res.status < 0:
            raise IntegrationError(res.message)
        pieces.append(res.sol)
        nfev += int(res.nfev)
        if res.status != 1:
            break
        fired = [i for i, te in enumerate(res.t_events) if len(te)]
        first = min(fired, key=lambda i: sign * res.t_events[i][0])
        t_ev = float(res.t_events[first][0])
        if split and first == len(evs) - 1:
            t0, y0, split = t_ev, [0.0, float(res.y_events[first][0][1])], False
            continue
        event_time = t_ev
        reason = "target" if stop.target is not None and first == 0 else "stall"
        break
    sol = pieces[0] if len(pieces) == 1 else _join(pieces)
    return Trajectory(family, params, start, sol, float(res.t[-1]), reason, event_time, nfev)


def _join(pieces) -> OdeSolution:
    ts = [pieces[0].ts[0]]
    interpolants = []
    for piece in pieces:
        ts.extend(piece.ts[1:])
        interpolants.extend(piece.interpolants)
    return OdeSolution(np.asarray(ts), interpolants)


# ---------------------------------------------------------------------------
# full model solutions


def dense_derivative(sol, t):
    """Time derivative of a DOP853 ``OdeSolution`` interpolant, shape ``(n_states, len(t))``.

    Forward-mode differentiation of the nested form scipy evaluates
    ``y(x) = y_old + (...((F[-1] x + F[-2]) (1 - x) + ...) x)``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    ind = np.searchsorted(sol.ts_sorted, t, side="left")
    seg = np.clip(ind - 1, 0, sol.n_segments - 1)
    if not sol.ascending:
        seg = sol.n_segments - 1 - seg
    out = np.empty((sol.interpolants[0].y_old.size, t.size))
    for j in np.unique(seg):
        ip = sol.interpolants[j]
        mask = seg == j
        x = ((t[mask] - ip.t_old) / ip.h)[:, None]
        y = np.zeros((x.shape[0], ip.y_old.size))
        dy = np.zeros_like(y)
        for i, f in enumerate(reversed(ip.F)):
            y += f
            if i % 2 == 0:
                dy = dy * x + y
                y = y * x
            else:
                dy = dy * (1.0 - x) - y
                y = y * (1.0 - x)
        out[:, mask] = (dy / ip.h).T
    return out


def horizon_length(params: Params) -> float:
    return 1e3 * max(1.0, 1.0 / params.alpha)


def singular_start(params: Params, eps: float) -> PrueferState:
    """State at ``t = eps`` of the family-1 model started at ``a = 0``.

    Near ``t = 0`` the drift is ``-(n-1)/t`` and ``cosp^(p-1)(phi) ~ (p-1) psi``
    with ``psi = phi + pi_p/2``, so ``psi' ~ alpha - (n-1) psi / t`` whose regular
    solution is ``psi = alpha t / n``.
    """
    p, n, alpha = params.p, params.n, params.alpha
    psi = alpha * eps / n
    q = p / (p - 1.0)
    log_e = math.log(alpha) - (n - 1.0) / p * ((p - 1.0) * psi) ** q
    return PrueferState(eps, -pi_p(p) / 2.0 + psi, log_e)


@dataclass
class ModelSolution:
    """The model ``w_{i,a}`` on ``[a, b]`` with ``b``, ``delta = b - a`` and ``m = w(b)``.

    ``b = inf`` (and ``m = 0``, ``delta = inf``) when the phase never reaches
    ``pi_p/2``; ``trajectory`` then covers ``[a, horizon]`` or up to the stall.
    """

    family: ModelFamily
    a: float
    params: Params
    trajectory: Trajectory
    b: float
    delta: float
    m: float
    eps: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.b)

    @property
    def t_max(self) -> float:
        return self.b if self.finite else self.trajectory.t_end

    def _states(self, t):
        t = np.asarray(t, dtype=float)
        t0 = self.trajectory.t_start
        inside = np.clip(t, t0, self.trajectory.t_end)
        phi, log_e = self.trajectory.state(inside)
        if self.eps > 0.0:
            # series on [0, eps) for the singular family-1 start
            early = t < t0
            if np.any(early):
                psi_rate = self.params.alpha / self.params.n
                phi = np.where(early, -pi_p(self.params.p) / 2.0 + psi_rate * t, phi)
                log_e = np.where(early, math.log(self.params.alpha), log_e)
        return phi, log_e

    def phi(self, t):
        return self._states(t)[0]

    def e(self, t):
        return np.exp(self._states(t)[1])

    def w(self, t):
        from .ptrig import sincosp

        phi, log_e = self._states(t)
        s, _ = sincosp(self.params.p, phi)
        return np.exp(log_e) * s / self.params.alpha

    def wdot(self, t):
        from .ptrig import sincosp

        phi, log_e = self._states(t)
        _, c = sincosp(self.params.p, phi)
        return np.exp(log_e) * c

    def flux(self, t):
        """``mu wdot^(p-1)``."""
        with np.errstate(over="ignore", invalid="ignore"):
            return self.family.mu(np.asarray(t, dtype=float), self.params) * signed_pow(
                self.wdot(t), self.params.p - 1.0)

    def residual(self, t):
        """``d/dt(mu wdot^(p-1)) + lam mu w^(p-1)`` evaluated from the dense output.

        The phase and log-amplitude interpolants are differentiated exactly;
        the chain rule through ``cosp^(p-1)`` and the exact drift
        ``T = -mu'/mu`` do the rest, so the error scales with ``mu``.  On the
        series segment ``[0, eps)`` of a singular start the derivatives are
        those of the series.
        """
        from .ptrig import sincosp

        t = np.atleast_1d(np.asarray(t, dtype=float))
        p = self.params.p
        traj = self.trajectory
        dphi, dlog_e = dense_derivative(traj.sol, np.clip(t, traj.t_start, self.t_max))
        if self.eps > 0.0:
            early = t < traj.t_start
            dphi = np.where(early, self.params.alpha / self.params.n, dphi)
            dlog_e = np.where(early, 0.0, dlog_e)
        phi, log_e = self._states(t)
        s, c = sincosp(p, phi)
        amp = np.exp((p - 1.0) * log_e)
        g = amp * signed_pow(c, p - 1.0)
        dg = (p - 1.0) * (dlog_e * g - amp * signed_pow(s, p - 1.0) * dphi)
        w = np.exp(log_e) * s / self.params.alpha
        with np.errstate(over="ignore"):
            mu = self.family.mu(t, self.params)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = mu * (dg - _drift_array(self.family, self.params, t) * g
                        + self.params.lam * signed_pow(w, p - 1.0))
        return np.where(mu == 0.0, 0.0, out)

    def summary(self) -> dict:
        return {"family": int(self.family), "a": self.a, "b": self.b, "delta": self.delta,
                "m": self.m}


def _solve_from(family: ModelFamily, start: PrueferState, a: float, params: Params,
                eps: float = 0.0) -> ModelSolution:
    half = pi_p(params.p) / 2.0
    stop = Stop(horizon=a + horizon_length(params), target=half,
                stall=family is ModelFamily.COSH)
    traj = integrate_pruefer(family, start, params, stop)
    if traj.reason == "target":
        b = traj.event_time
        _, log_e = traj.state(b)
        m = math.exp(float(log_e)) / params.alpha
        return ModelSolution(family, a, params, traj, b, b - a, m, eps)
    return ModelSolution(family, a, params, traj, math.inf, math.inf, 0.0, eps,
                         extra={"reason": traj.reason})


def solve_model(family: ModelFamily, a: float, params: Params, *, eps: float | None = None,
                b_tol: float = 1e-9) -> ModelSolution:
    """Solve the model IVP ``w(a) = -1``, ``wdot(a) = 0`` up to its first critical point."""
    family = ModelFamily(family)
    a = float(a)
    family.check(a)
    half = pi_p(params.p) / 2.0
    if family is not ModelFamily.SINH or a > 0.0:
        return _solve_from(family, PrueferState(a, -half, math.log(params.alpha)), a, params)

    if eps is not None:
        return _solve_from(family, singular_start(params, eps), a, params, eps)
    # shrink eps until halving it moves b by less than b_tol
    eps = 1e-4 / max(1.0, params.alpha, params.root_k)
    prev = _solve_from(family, singular_start(params, eps), a, params, eps)
    for _ in range(30):
        eps *= 0.5
        cur = _solve_from(family, singular_start(params, eps), a, params, eps)
        if prev.finite == cur.finite and (not cur.finite or abs(cur.b - prev.b) < b_tol):
            cur.extra["eps_change"] = abs(cur.b - prev.b) if cur.finite else 0.0
            return cur
        prev = cur
    raise IntegrationError("singular start did not settle under eps-halving")


# ---------------------------------------------------------------------------
# derived quantities


def _golden_min(f, lo: float, hi: float, tol: float = 1e-12, maxiter: int = 200):
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv * (hi - lo)
    x2 = lo + inv * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(maxiter):
        if hi - lo <= tol:
            break
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv * (hi - lo)
            f2 = f(x2)
    x = 0.5 * (lo + hi)
    return x, f(x)


def damping_profile(p: float, psi):
    """``cosp(psi)^(p-1) sinp(psi)``."""
    from .ptrig import sincosp

    s, c = sincosp(p, psi)
    return signed_pow(c, p - 1.0) * s


def critical_l(p: float) -> float:
    """``l = -min cosp^(p-1)(psi) sinp(psi)`` over ``psi`` in ``(-pi_p/2, 0)``."""
    p = check_p(p)
    half = pi_p(p) / 2.0
    _, fmin = _golden_min(lambda x: float(damping_profile(p, x)), -half, 0.0)
    return -fmin


def alpha_critical(p: float, n: float, k: float) -> float:
    """Critical frequency ``(n-1) l sqrt(-k) / (p-1)``; models with ``alpha`` at or below
    it stop oscillating (infinite diameter for families 1 and 2)."""
    if n == 1.0:
        return 0.0
    if not k < 0.0:
        raise ValueError("k must be < 0")
    return (n - 1.0) * critical_l(p) * math.sqrt(-k) / (p - 1.0)


def find_abar(params: Params) -> float:
    """Half-width of the odd family-3 model.

    Integrates the phase from ``phi(0) = 0`` backward to ``-pi_p/2``; since
    ``phi' >= alpha`` there, this happens within ``pi_p / (2 alpha)``.
    """
    return _abar_trajectory(params).event_time * -1.0


def _abar_trajectory(params: Params) -> Trajectory:
    half = pi_p(params.p) / 2.0
    stop = Stop(horizon=-(half / params.alpha) * 1.01 - 1.0, target=-half)
    traj = integrate_pruefer(ModelFamily.COSH, PrueferState(0.0, 0.0, 0.0), params, stop)
    if traj.reason != "target":
        raise IntegrationError("odd model phase failed to reach -pi_p/2")
    return traj


@dataclass(frozen=True)
class LandscapeRow:
    a: float
    b: float
    delta: float
    m: float
    finite: bool
    error: str | None = None


def model_landscape(family: ModelFamily, a_grid, params: Params) -> list[LandscapeRow]:
    """``(a, b, delta, m)`` over a grid of starting points, sorted by ``a``."""
    rows = []
    for a in sorted(float(x) for x in a_grid):
        try:
            sol = solve_model(family, a, params)
        except (IntegrationError, DomainError) as exc:
            rows.append(LandscapeRow(a, math.nan, math.nan, math.nan, False, str(exc)))
            continue
        rows.append(LandscapeRow(a, sol.b, sol.delta, sol.m, sol.finite))
    return rows


def sharpness_diameter_bound(i_index: int, d: float, k: float) -> float:
    """Upper bound ``sqrt(d^2 + pi^2 cosh(sqrt(-k) d/2)^2 / i^2)`` on the diameter of the
    ``i``-th collapsing warped product over ``[-d/2, d/2]``."""
    if i_index < 1 or not d > 0.0 or not k < 0.0:
        raise ValueError("need i >= 1, d > 0, k < 0")
    tau = math.cosh(math.sqrt(-k) * d / 2.0)
    return math.sqrt(d * d + (math.pi * tau / i_index) ** 2)
