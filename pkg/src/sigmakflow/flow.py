"""Explicit time integration of the dual, normalized-dual and radial primal flows.

Formulations
------------
``dual``           u*_t = -F_*^(-alpha)(M) w* on B_r, boundary A(t) u0*.
``normalized``     u*_tau = -F_*^(-alpha)(M) w* - u*, boundary u0*.
``primal_radial``  u_t = F^alpha(kappa) w on [0, R], Neumann pole, Dirichlet at R.

Here M = w* gamma* D^2u* gamma* and A(t) = ((1+alpha) t + 1)^(1/(1+alpha)).
Boundary values are stamped from closed forms at every step, never integrated.
"""

from dataclasses import dataclass, field, replace
from math import comb, exp, log

import numpy as np
from scipy.interpolate import CubicSpline

from . import _kernels
from .errors import CFLViolation, ConvexityError, DomainError, SpacelikeError
from .geometry import EPS_GUARD, BallField2D, RadialField, wstar_of
from .symfunc import SpeedParams

CFL = 0.2
FORMULATIONS = ("dual", "normalized", "primal_radial")


def scale_factor(t, alpha):
    """A(t) = ((1+alpha) t + 1)^(1/(1+alpha))."""
    if np.any(np.asarray(t) < 0):
        raise DomainError("time must be non-negative")
    return ((1 + alpha) * np.asarray(t, dtype=float) + 1) ** (1 / (1 + alpha)) if np.ndim(t) else \
        ((1 + alpha) * t + 1) ** (1 / (1 + alpha))


def time_change(t, alpha):
    """Normalized clock tau(t) = ln((1+alpha) t + 1) / (1+alpha); A(t) = exp(tau)."""
    if np.any(np.asarray(t) < 0):
        raise DomainError("time must be non-negative")
    return np.log1p((1 + alpha) * np.asarray(t, dtype=float)) / (1 + alpha)


def inverse_time_change(tau, alpha):
    return np.expm1((1 + alpha) * np.asarray(tau, dtype=float)) / (1 + alpha)


def hyperboloid_radius_at(t, rho0, p):
    """Radius of the hyperboloid sqrt(rho^2 + |x|^2) evolving from radius rho0.

    rho^(1+alpha) = rho0^(1+alpha) + (1+alpha) C(n,k)^(alpha/k) t.
    """
    a = p.alpha
    return (rho0 ** (1 + a) + (1 + a) * comb(p.n, p.k) ** (a / p.k) * t) ** (1 / (1 + a))


def shifted_hyperboloid_solution(rho0, shift, p):
    """Exact primal solution u(r, t) = shift + sqrt(rho(t)^2 + r^2) of the flow."""

    def u(r, t):
        rho = hyperboloid_radius_at(t, rho0, p)
        return shift + np.sqrt(rho * rho + np.asarray(r, dtype=float) ** 2)

    return u


def shifted_hyperboloid_dual(rho0, shift, p):
    """Legendre transform of ``shifted_hyperboloid_solution``: -rho(t) w* - shift."""

    def ustar(xi, t):
        rho = hyperboloid_radius_at(t, rho0, p)
        return -rho * np.sqrt(1 - np.asarray(xi, dtype=float) ** 2) - shift

    return ustar


# --------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class FlowState:
    """Snapshot of an evolving solution.

    ``boundary`` holds the base Dirichlet data u0* on the boundary nodes of a
    dual field (last node of a radial field, stencil ring of a ball field).
    """

    t: float
    tau: float
    field: object
    formulation: str
    params: SpeedParams
    boundary: np.ndarray = None

    def __post_init__(self):
        if self.formulation not in FORMULATIONS:
            raise DomainError(f"unknown formulation {self.formulation!r}")

    @property
    def A(self):
        return scale_factor(self.t, self.params.alpha)

    @property
    def h(self):
        return self.field.h


@dataclass
class StepReport:
    dt_used: float
    max_speed: float
    cfl_ratio: float
    min_eigenvalue: float
    residual: float = float("nan")


@dataclass
class Evaluation:
    """Speed data of a state at its unknown nodes (flattened).

    ``raw`` is F^alpha for primal states and F_*^(-alpha) for dual ones.
    """

    rhs: np.ndarray
    raw: np.ndarray
    wstar: np.ndarray
    min_eigenvalue: float
    max_diff: float
    residual: np.ndarray = None
    dual: bool = True

    @property
    def speed(self):
        """F^alpha (primal) or F_*^alpha (dual)."""
        return 1.0 / self.raw if self.dual else self.raw

    def ftx(self):
        """F~ x_{n+1} = F_*^alpha / w* at the unknown nodes of a dual state."""
        return 1.0 / (self.raw * self.wstar)


def _boundary_values(f):
    if isinstance(f, BallField2D):
        return f.values[f.ring].copy()
    return f.values[-1:].copy()


def dual_state(u0star, p, formulation="dual", t=0.0):
    """Initial state of a dual or normalized run; boundary data taken from ``u0star``."""
    if formulation not in ("dual", "normalized"):
        raise DomainError("dual_state builds dual or normalized states")
    if isinstance(u0star, RadialField) and u0star.rmax >= 1:
        raise DomainError("radial dual fields must live on [0, r] with r < 1")
    if isinstance(u0star, BallField2D) and p.n != 2:
        raise DomainError("ball fields require n = 2")
    base = _boundary_values(u0star)
    if formulation == "dual" and t:
        base = base / scale_factor(t, p.alpha)
    return FlowState(t, float(time_change(t, p.alpha)), u0star, formulation, p, base)


def primal_state(u0, p, t=0.0):
    if not isinstance(u0, RadialField):
        raise DomainError("the primal solver is radial")
    return FlowState(t, float(time_change(t, p.alpha)), u0, "primal_radial", p)


def _ball_geometry(f):
    I, J = (np.ascontiguousarray(a) for a in np.nonzero(f.interior))
    X, Y = f.XY
    x = X[I, J]
    y = Y[I, J]
    flat = I * f.values.shape[1] + J
    ring = np.flatnonzero(f.ring.ravel())
    return I, J, x, y, np.sqrt(1 - x * x - y * y), flat, ring


_BALL_CACHE = {}


def _ball_cached(f):
    key = (f.r, f.h)
    if key not in _BALL_CACHE:
        _BALL_CACHE.clear()
        _BALL_CACHE[key] = _ball_geometry(f)
    return _BALL_CACHE[key]


def _first_nan(arr):
    return int(np.flatnonzero(~np.isfinite(arr))[0])


def evaluate(state):
    """Right-hand side, speed and CFL data of ``state`` at its unknown nodes."""
    p = state.params
    f = state.field
    if state.formulation == "primal_radial":
        u = f.values
        phi, w, kmin, diff, g2 = _kernels.primal_radial(u, f.h, p.n, p.k, float(p.alpha))
        if np.any(g2 > 1 - EPS_GUARD):
            i = int(np.argmax(g2))
            raise SpacelikeError(f"|u'|^2 = {g2[i]:.12g} at r = {i * f.h:.6g}", point=i)
        if np.any(~(kmin > 0)) or np.any(~np.isfinite(phi)):
            i = int(np.argmin(np.where(np.isfinite(kmin), kmin, -np.inf)))
            raise ConvexityError(f"curvature {kmin[i]:.3e} <= 0 at r = {i * f.h:.6g}", point=i)
        return Evaluation(phi * w, phi, w, float(kmin.min()), float(diff.max()), dual=False)
    if isinstance(f, BallField2D):
        I, J, x, y, ws, *_ = _ball_cached(f)
        fneg, lmin, diff = _kernels.dual_ball(f.values, I, J, x, y, ws, f.h, p.k, float(p.alpha))
    else:
        fneg, ws, lmin, diff = _kernels.dual_radial(f.values, f.h, p.n, p.k, float(p.alpha))
    if np.any(~np.isfinite(fneg)):
        i = _first_nan(fneg)
        where = (int(I[i]), int(J[i])) if isinstance(f, BallField2D) else i
        raise ConvexityError(f"dual matrix not positive definite (min radius {lmin[i]:.3e})", point=where)
    rhs = -fneg * ws
    res = None
    if state.formulation == "normalized":
        rhs = rhs - _unknowns(state)
        res = rhs
    return Evaluation(rhs, fneg, ws, float(lmin.min()), float(diff.max()), res)


def cfl_step(state, cfl=CFL, ev=None):
    """Largest explicit step cfl * h^2 / maxDiff for ``state``."""
    ev = evaluate(state) if ev is None else ev
    return cfl * state.h**2 / ev.max_diff


def _apply(state, vals_unknown, boundary_vals):
    f = state.field
    if isinstance(f, BallField2D):
        *_, flat, ring = _ball_cached(f)
        new = f.values.copy()
        flat_view = new.reshape(-1)
        flat_view[flat] = vals_unknown
        flat_view[ring] = boundary_vals
        return f._successor(new)
    new = np.empty_like(f.values)
    new[:-1] = vals_unknown
    new[-1] = boundary_vals[0] if np.ndim(boundary_vals) else boundary_vals
    if not np.all(np.isfinite(new)):
        raise DomainError("non-finite values produced by the update")
    return RadialField(f.rmax, new)


def _unknowns(state):
    f = state.field
    if isinstance(f, BallField2D):
        flat = _ball_cached(f)[5]
        return f.values.reshape(-1)[flat]
    return f.values[:-1]


def _stamp(state, t_new, tau_new, boundary_provider=None):
    p = state.params
    if state.formulation == "dual":
        return scale_factor(t_new, p.alpha) * state.boundary
    if state.formulation == "normalized":
        return state.boundary
    return np.atleast_1d(boundary_provider(t_new))


def _advance_clock(state, d):
    a = state.params.alpha
    if state.formulation == "normalized":
        tau = state.tau + d
        return float(inverse_time_change(tau, a)), tau
    t = state.t + d
    return t, float(time_change(t, a))


def _step(state, d, scheme, cfl, boundary_provider, ev=None):
    if d < 0:
        raise DomainError("step must be non-negative")
    ev = evaluate(state) if ev is None else ev
    dmax = cfl * state.h**2 / ev.max_diff
    if d > dmax * (1 + 1e-12):
        raise CFLViolation(f"step {d:.6g} exceeds the CFL bound {dmax:.6g}", dmax)
    u = _unknowns(state)
    t_new, tau_new = _advance_clock(state, d)
    if scheme == "euler":
        vals = u + d * ev.rhs
    elif scheme == "midpoint":
        t_half, tau_half = _advance_clock(state, 0.5 * d)
        half = FlowState(t_half, tau_half,
                         _apply(state, u + 0.5 * d * ev.rhs, _stamp(state, t_half, tau_half, boundary_provider)),
                         state.formulation, state.params, state.boundary)
        vals = u + d * evaluate(half).rhs
    else:
        raise DomainError(f"unknown scheme {scheme!r}")
    new_field = _apply(state, vals, _stamp(state, t_new, tau_new, boundary_provider))
    new = replace(state, t=t_new, tau=tau_new, field=new_field)
    resid = float(np.max(np.abs(ev.residual))) if ev.residual is not None else float("nan")
    report = StepReport(d, float(np.max(np.abs(ev.rhs))), d / dmax, ev.min_eigenvalue, resid)
    return new, report


def step_dual(state, dt, scheme="euler", cfl=CFL):
    """One explicit step of the dual flow; returns (new state, report)."""
    if state.formulation != "dual":
        raise DomainError("step_dual needs a dual state")
    return _step(state, dt, scheme, cfl, None)


def step_normalized(state, dtau, scheme="euler", cfl=CFL):
    """One explicit step of the normalized dual flow in the clock tau."""
    if state.formulation != "normalized":
        raise DomainError("step_normalized needs a normalized state")
    return _step(state, dtau, scheme, cfl, None)


def step_primal_radial(state, dt, boundary_provider, scheme="euler", cfl=CFL):
    """One explicit step of the radial primal flow; ``boundary_provider(t)`` gives u(R, t)."""
    if state.formulation != "primal_radial":
        raise DomainError("step_primal_radial needs a primal_radial state")
    return _step(state, dt, scheme, cfl, boundary_provider)


def integrate(state, until, *, cfl=CFL, scheme="euler", boundary_provider=None, observer=None,
              max_steps=None):
    """Advance to clock value ``until`` (t, or tau for normalized runs).

    ``observer(state, evaluation)`` is called on every state, including the
    first and the last. Returns (final state, number of steps).
    """
    clock = (lambda s: s.tau) if state.formulation == "normalized" else (lambda s: s.t)
    steps = 0
    while True:
        ev = evaluate(state)
        if observer is not None:
            observer(state, ev)
        remaining = until - clock(state)
        if remaining <= 1e-14 * max(1.0, abs(until)):
            return state, steps
        if max_steps is not None and steps >= max_steps:
            return state, steps
        d = min(cfl * state.h**2 / ev.max_diff, remaining)
        state, _ = _step(state, d, scheme, cfl, boundary_provider, ev=ev)
        steps += 1


@dataclass
class StationaryResult:
    field: object
    state: FlowState
    tau: np.ndarray
    residual: np.ndarray
    converged: bool
    steps: int = 0
    dtau: np.ndarray = field(default=None, repr=False)


def run_to_stationary(state, tol=1e-6, max_tau=50.0, *, cfl=CFL, scheme="euler", observer=None):
    """Iterate the normalized flow until sup|H~| <= tol or tau > max_tau.

    H~ = -F_*^(-alpha) w* - u* is the right-hand side of the normalized flow.
    The residual history is recorded at every step.
    """
    if state.formulation != "normalized":
        raise DomainError("run_to_stationary needs a normalized state")
    taus, res, dts = [], [], []
    steps = 0
    while True:
        ev = evaluate(state)
        if observer is not None:
            observer(state, ev)
        r = float(np.max(np.abs(ev.residual)))
        taus.append(state.tau)
        res.append(r)
        if r <= tol or state.tau >= max_tau:
            break
        d = min(cfl * state.h**2 / ev.max_diff, max_tau - state.tau)
        dts.append(d)
        state, _ = _step(state, d, scheme, cfl, None, ev=ev)
        steps += 1
    return StationaryResult(state.field, state, np.array(taus), np.array(res), res[-1] <= tol, steps,
                            np.array(dts))


def rescale(state, x=None):
    """Rescaled solution: u*/A(t) on the dual side, u(A x, t)/A on the primal side.

    Normalized states are already rescaled. Without ``x`` the primal result is
    sampled at x_i = r_i / A exactly; with ``x`` it is interpolated (cubic).
    """
    A = scale_factor(state.t, state.params.alpha)
    f = state.field
    if state.formulation == "normalized":
        return f
    if state.formulation == "dual":
        return f.copy(f.values / A)
    if x is None:
        return RadialField(f.rmax / A, f.values / A)
    x = np.asarray(x, dtype=float)
    if np.any(A * x > f.rmax * (1 + 1e-12)) or np.any(x < 0):
        raise DomainError("rescaled abscissa outside the stored domain")
    spline = CubicSpline(f.r, f.values, bc_type=((1, 0.0), "not-a-knot"))
    return spline(A * x) / A


def radial_interpolant(f):
    """Even cubic interpolant of a radial field (zero slope at the pole)."""
    return CubicSpline(f.r, f.values, bc_type=((1, 0.0), "not-a-knot"))


# --------------------------------------------------------------------------
# snapshots


def emit_snapshot(state):
    """Text snapshot: one header line and one value per line (17 significant digits)."""
    f = state.field
    p = state.params
    if isinstance(f, BallField2D):
        kind, r, h, size = "ball2d", f.r, f.h, f.values.shape[0]
    else:
        kind, r, h, size = "radial", f.rmax, f.h, f.values.size
    head = (f"# sigmakflow-snapshot formulation={state.formulation} kind={kind} n={p.n} k={p.k} "
            f"alpha={float(p.alpha)!r} r={float(r)!r} h={float(h)!r} t={float(state.t)!r} tau={float(state.tau)!r} size={size}")
    body = "\n".join(f"{v:.17g}" for v in f.values.ravel())
    return head + "\n" + body + "\n"


def parse_snapshot(text):
    """Inverse of ``emit_snapshot``; dual boundary data are recovered from the stamped values."""
    lines = text.splitlines()
    head = lines[0].split()
    if head[:2] != ["#", "sigmakflow-snapshot"]:
        raise DomainError("not a sigmakflow snapshot")
    kv = dict(item.split("=", 1) for item in head[2:])
    p = SpeedParams(int(kv["n"]), int(kv["k"]), float(kv["alpha"]))
    vals = np.array([float(s) for s in lines[1:] if s.strip()])
    size = int(kv["size"])
    if kv["kind"] == "ball2d":
        f = BallField2D(float(kv["r"]), float(kv["h"]), vals.reshape(size, size))
    else:
        f = RadialField(float(kv["r"]), vals)
    t, tau = float(kv["t"]), float(kv["tau"])
    form = kv["formulation"]
    base = None
    if form in ("dual", "normalized"):
        base = _boundary_values(f)
        if form == "dual":
            base = base / scale_factor(t, p.alpha)
    return FlowState(t, tau, f, form, p, base)


def save_snapshot(path, state):
    with open(path, "w") as fh:
        fh.write(emit_snapshot(state))


def load_snapshot(path):
    with open(path) as fh:
        return parse_snapshot(fh.read())
