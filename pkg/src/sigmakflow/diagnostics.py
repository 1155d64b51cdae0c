"""Monitors that turn qualitative statements about the flow into pass/fail series.

Every monitor produces a ``MonitorSeries``: a time (or level) axis, a value
per sample and a named predicate. The verdict is recomputed from the values
and the predicate alone, so saved series can be re-judged offline.

Streaming monitors (``SandwichMonitor``, ``ResidualSignMonitor``,
``BoundaryExtremumMonitor``, ``CurvatureCeilingMonitor``) are observers for
``flow.integrate`` / ``flow.run_to_stationary``; they keep only summaries.
"""

import json
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import flow
from .errors import DomainError
from .geometry import BallField2D, RadialField, dual_curvature_matrix, primal_curvature, wstar_of
from .expander import hyperboloid_radius
from .legendre import legendre_inverse
from .symfunc import SpeedParams, speed_F_alpha, speed_F_alpha_partials


# --------------------------------------------------------------------------
# series and predicates


def _min_ge(values, tol, params):
    return bool(np.all(np.asarray(values) >= -tol))


def _max_le(values, tol, params):
    return bool(np.all(np.asarray(values) <= tol))


def measured_orders(values, ratio=2.0):
    v = np.asarray(values, dtype=float)
    return np.log(v[:-1] / v[1:]) / np.log(ratio)


def _order_ge(values, tol, params):
    # values are residuals on successively refined levels; tol is the required order
    v = np.asarray(values, dtype=float)
    if v.size < 2 or np.any(~(v > 0)):
        return bool(v.size >= 2 and np.all(v[1:] <= params.get("floor", 0.0)))
    return bool(np.all(measured_orders(v, params.get("ratio", 2.0)) >= tol))


def _decreasing_then_le(values, tol, params):
    v = np.asarray(values, dtype=float)
    start = int(params.get("transient", 0))
    slack = float(params.get("slack", 0.0))
    tail = v[start:]
    mono = bool(np.all(np.diff(tail) <= slack * np.maximum(np.abs(tail[:-1]), 1e-300)))
    return mono and bool(v[-1] <= tol)


def _strictly_decreasing(values, tol, params):
    return bool(np.all(np.diff(np.asarray(values, dtype=float)) < -tol))


PREDICATES = {
    "min_ge": _min_ge,
    "max_le": _max_le,
    "order_ge": _order_ge,
    "decreasing_then_le": _decreasing_then_le,
    "strictly_decreasing": _strictly_decreasing,
}


@dataclass
class MonitorSeries:
    """Named series with a predicate; ``verdict`` is derived, never stored independently."""

    name: str
    times: np.ndarray
    values: np.ndarray
    predicate: str
    tol: float
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise DomainError("times and values must have the same length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise DomainError("times must be strictly increasing")
        if self.predicate not in PREDICATES:
            raise DomainError(f"unknown predicate {self.predicate!r}")

    @property
    def verdict(self):
        return PREDICATES[self.predicate](self.values, self.tol, self.params)

    @property
    def passed(self):
        return self.verdict

    def csv_text(self):
        lines = ["time,value"] + [f"{t:.17g},{v:.17g}" for t, v in zip(self.times, self.values)]
        return "\n".join(lines) + "\n"

    def verdict_block(self):
        v = self.values
        return {
            "name": self.name,
            "predicate": self.predicate,
            "tol": self.tol,
            "params": self.params,
            "verdict": "pass" if self.verdict else "fail",
            "samples": int(v.size),
            "final": float(v[-1]) if v.size else None,
            "min": float(np.min(v)) if v.size else None,
            "max": float(np.max(v)) if v.size else None,
            "details": self.details,
        }

    def verdict_json(self):
        return json.dumps(self.verdict_block(), indent=2, sort_keys=True, default=_json_default)

    def write(self, directory):
        """Write ``<name>.csv`` and ``<name>.json`` into ``directory``; returns both paths."""
        import os

        base = os.path.join(directory, _slug(self.name))
        with open(base + ".csv", "w") as fh:
            fh.write(self.csv_text())
        with open(base + ".json", "w") as fh:
            fh.write(self.verdict_json() + "\n")
        return base + ".csv", base + ".json"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return repr(o)


def _slug(name):
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name)


# --------------------------------------------------------------------------
# comparison


def _values_of(state):
    f = state.field if isinstance(state, flow.FlowState) else state
    if isinstance(f, BallField2D):
        return f.values[f.support]
    return f.values


def comparison_check(run_a, run_b, tol=1e-8, name="comparison"):
    """Per-time min over points of (B - A); passes iff it never drops below -tol.

    ``details['premise']`` records whether B >= A held at t = 0 and on the
    boundary of the first state, the hypothesis of the comparison principle.
    """
    if len(run_a) != len(run_b) or len(run_a) == 0:
        raise DomainError("runs must be non-empty and of equal length")
    times, vals = [], []
    for a, b in zip(run_a, run_b):
        if abs(a.t - b.t) > 1e-12 * max(1.0, abs(a.t)) or type(a.field) is not type(b.field) \
                or a.field.values.shape != b.field.values.shape or a.field.h != b.field.h:
            raise DomainError("runs are not on the same grid and clock")
        times.append(a.t)
        vals.append(float(np.min(_values_of(b) - _values_of(a))))
    premise = vals[0] >= -tol
    return MonitorSeries(name, times, vals, "min_ge", tol, details={"premise": bool(premise)})


class SandwichMonitor:
    """Streaming check A(t) lower <= u* <= A(t) upper on every point of every step.

    ``lower`` and ``upper`` are profiles of |xi|; both barriers of the
    comparison argument are scaled copies A(t) u0* and A(t) u_exp*, so the
    profiles are evaluated once. The recorded value is
    min(u* - A lower, A upper - u*) over the support.
    """

    def __init__(self, lower, upper, tol=1e-8, name="sandwich", every=1):
        self.lower, self.upper, self.tol, self.name, self.every = lower, upper, tol, name, every
        self.times, self.values, self.low_margin, self.high_margin = [], [], [], []
        self._count = 0
        self._prof = None

    def __call__(self, state, ev=None):
        self._count += 1
        if (self._count - 1) % self.every:
            return
        f = state.field
        if self._prof is None:
            rho = f.rho[f.support] if isinstance(f, BallField2D) else f.r
            self._prof = (np.asarray(self.lower(rho)), np.asarray(self.upper(rho)))
        lo_p, hi_p = self._prof
        A = state.A
        u = _values_of(state)
        lo = float(np.min(u - A * lo_p))
        hi = float(np.min(A * hi_p - u))
        if self.times and state.t <= self.times[-1]:
            return
        self.times.append(state.t)
        self.low_margin.append(lo)
        self.high_margin.append(hi)
        self.values.append(min(lo, hi))

    def series(self):
        return MonitorSeries(self.name, self.times, self.values, "min_ge", self.tol,
                             details={"worst_lower": float(np.min(self.low_margin)),
                                      "worst_upper": float(np.min(self.high_margin))})


class ResidualSignMonitor:
    """Streaming min of H~ = -F_*^(-alpha) w* - u* over the unknowns of a normalized run."""

    def __init__(self, tol=1e-8, name="residual_sign"):
        self.tol, self.name = tol, name
        self.times, self.values, self.sup = [], [], []

    def __call__(self, state, ev):
        if ev.residual is None:
            raise DomainError("residual sign needs a normalized run")
        if self.times and state.tau <= self.times[-1]:
            return
        self.times.append(state.tau)
        self.values.append(float(np.min(ev.residual)))
        self.sup.append(float(np.max(np.abs(ev.residual))))

    def series(self):
        return MonitorSeries(self.name, self.times, self.values, "min_ge", self.tol,
                             details={"final_sup": self.sup[-1] if self.sup else None})


class BoundaryExtremumMonitor:
    """Space-time extrema of F~ x_{n+1} = F_*^alpha / w* in the interior versus the parabolic boundary.

    The parabolic boundary is the t = 0 slice (interior values) together with
    the lateral boundary, where F~ x_{n+1} = A(t)^alpha / (-u0*). The recorded
    value is the running relative excess of interior extrema over boundary
    extrema; the monitor passes iff it never exceeds ``tol``.
    """

    def __init__(self, tol=1e-6, name="boundary_extremum"):
        self.tol, self.name = tol, name
        self.times, self.values = [], []
        self.bmax, self.bmin = -np.inf, np.inf
        self.imax, self.imin = -np.inf, np.inf

    def __call__(self, state, ev):
        if state.formulation != "dual":
            raise DomainError("boundary extremum applies to dual runs")
        vals = ev.ftx()
        A = state.A
        lateral = A ** state.params.alpha / (-state.boundary)
        self.bmax = max(self.bmax, float(np.max(lateral)))
        self.bmin = min(self.bmin, float(np.min(lateral)))
        if not self.times:
            self.bmax = max(self.bmax, float(np.max(vals)))
            self.bmin = min(self.bmin, float(np.min(vals)))
        else:
            self.imax = max(self.imax, float(np.max(vals)))
            self.imin = min(self.imin, float(np.min(vals)))
        if self.times and state.t <= self.times[-1]:
            return
        excess = max(self.imax / self.bmax - 1.0, 1.0 - self.imin / self.bmin, 0.0) if self.times else 0.0
        self.times.append(state.t)
        self.values.append(excess)

    def series(self):
        return MonitorSeries(self.name, self.times, self.values, "max_le", self.tol,
                             details={"boundary": [self.bmin, self.bmax], "interior": [self.imin, self.imax]})


def boundary_extremum_check(run, tol=1e-6, name="boundary_extremum"):
    """Batch form of ``BoundaryExtremumMonitor`` over a list of dual states."""
    mon = BoundaryExtremumMonitor(tol, name)
    for s in run:
        mon(s, flow.evaluate(s))
    return mon.series()


class CurvatureCeilingMonitor:
    """Largest principal curvature along a run against a user-set ceiling.

    Dual states report 1 / (smallest curvature radius).
    """

    def __init__(self, ceiling, name="kappa_max"):
        self.ceiling, self.name = ceiling, name
        self.times, self.values = [], []

    def __call__(self, state, ev=None):
        if self.times and state.t <= self.times[-1]:
            return
        if state.formulation == "primal_radial":
            kmax = float(np.max(primal_curvature(state.field, state.params).kappa[:-1]))
        else:
            ev = flow.evaluate(state) if ev is None else ev
            kmax = 1.0 / ev.min_eigenvalue
        self.times.append(state.t)
        self.values.append(kmax)

    def series(self):
        return MonitorSeries(self.name, self.times, self.values, "max_le", self.ceiling)


# --------------------------------------------------------------------------
# local bounds for Phi


def phi_bounds_check(run, c, name="phi_bounds"):
    """Upper bound Phi < C2 V0 and, for alpha > 1, the lower bound on K = {u + t <= c}.

    ``run`` is a list of primal radial states. C2 is the largest Phi / v on
    the parabolic boundary that the scheme resolves (t = 0 slice and the last
    interior node at all times). Values are the margins per time slice; the
    series passes iff every margin is positive.
    """
    p = run[0].params
    data = []
    for s in run:
        cd = primal_curvature(s.field, p)
        phi = speed_F_alpha(p, cd.kappa[:-1])
        v = cd.tilt[:-1]
        u = s.field.values[:-1]
        data.append((s.t, u, v, phi))
    C2 = max(float(np.max(data[0][3] / data[0][2])), max(float(d[3][-1] / d[2][-1]) for d in data))
    inK = [d[1] + d[0] <= c for d in data]
    if not any(np.any(m) for m in inK):
        raise DomainError(f"K = {{u + t <= {c}}} is empty on this run")
    V0 = max(float(np.max(d[2][m])) for d, m in zip(data, inK) if np.any(m))
    gamma = 4.0 + 8.0 * V0 * V0
    lower = p.alpha > 1
    times, margins, notes = [], [], []
    if not lower:
        notes.append("alpha = 1: lower bound skipped (it requires alpha > 1)")
    for (t, u, v, phi), m in zip(data, inK):
        if not np.any(m):
            continue
        up = float(np.min(C2 * V0 - phi[m]))
        margin = up
        if lower:
            bound = ((c - t - u[m]) / c) ** gamma * np.exp(2 * (v[m] - V0)) / ((p.alpha - 1) * V0)
            margin = min(margin, float(np.min(phi[m] - bound)))
        times.append(t)
        margins.append(margin)
    return MonitorSeries(name, times, margins, "min_ge", 0.0,
                         details={"C2": C2, "V0": V0, "gamma": gamma, "lower_checked": lower, "notes": notes})


# --------------------------------------------------------------------------
# evolution identities


def _radial_fd(f, h):
    """Central first/second derivatives of an even radial sample (pole reflected, NaN at the end)."""
    g = np.concatenate([f[1:2], f, [np.nan]])
    d1 = (g[2:] - g[:-2]) / (2 * h)
    d2 = (g[2:] - 2 * g[1:-1] + g[:-2]) / (h * h)
    d1[0] = 0.0
    return d1, d2


def _operator_terms(state, p):
    """Phi, v, Phi^{ii} and the covariant Hessian pieces on nodes 0..N-2."""
    f = state.field
    h = f.h
    cd = primal_curvature(f, p)
    m = f.N - 1  # drop the boundary node and its one-sided neighbour
    kap = cd.curv_matrix[:m].diagonal(axis1=1, axis2=2)
    phi = speed_F_alpha(p, kap)
    dphi = speed_F_alpha_partials(p, kap)
    upp = _radial_fd(f.values, h)[1][:m]
    return dict(u=f.values[:m], up=cd.grad[:m], upp=upp, w=cd.w[:m], v=cd.tilt[:m], phi=phi,
                prad=dphi[:, 0], pang=dphi[:, 1] if p.n > 1 else 0.0,
                ksq=np.sum(dphi * kap * kap, axis=1), r=f.r[:m], h=h)


def _trace_hessian(g, T, n):
    """Phi^{ij} nabla_ij g for a radial scalar g sampled on the operator nodes."""
    h, w, r = T["h"], T["w"], T["r"]
    gp, gpp = _radial_fd(g, h)
    # (g'/w)'/w expanded so that only even profiles are differenced
    rad = gpp / (w * w) + gp * T["up"] * T["upp"] / w**4
    with np.errstate(divide="ignore", invalid="ignore"):
        ang = np.where(r > 0, gp / (np.where(r > 0, r, 1.0) * w * w), gpp / (w * w))
    return T["prad"] * rad + (n - 1) * T["pang"] * ang


def evolution_identity_residuals(prev, cur, nxt, p, margin=0.2):
    """Sup residuals of the three scalar evolution identities at the middle state.

    The time derivative along the normal is (f(t+d) - f(t-d)) / 2d plus the
    tangential correction f' Phi u' / w. Nodes with r > (1 - margin) R are
    excluded (boundary-contaminated stencils).
    """
    d = 0.5 * (nxt.t - prev.t)
    if not (abs((cur.t - prev.t) - d) < 1e-9 * max(1.0, d) and d > 0):
        raise DomainError("states must be equally spaced in time")
    Tm, T0, Tp = (_operator_terms(s, p) for s in (prev, cur, nxt))
    keep = T0["r"] <= (1 - margin) * cur.field.rmax
    keep[-2:] = False
    out = {}
    rhs = {
        "eel1": (1 - p.alpha) * T0["phi"] * T0["v"],
        "eel2": -T0["ksq"] * T0["v"],
        "eel3": -T0["ksq"] * T0["phi"],
    }
    for name, key in (("eel1", "u"), ("eel2", "v"), ("eel3", "phi")):
        g = T0[key]
        gt = (Tp[key] - Tm[key]) / (2 * d)
        gp, _ = _radial_fd(g, T0["h"])
        normal_dt = gt + gp * T0["phi"] * T0["up"] / T0["w"]
        L = normal_dt - _trace_hessian(g, T0, p.n)
        out[name] = float(np.max(np.abs(L - rhs[name])[keep]))
    return out


def self_similar_triple(p, N, R=4.0, t0=0.5, delta=None, scheme="euler"):
    """Primal run of the expanding hyperboloid sampled at t0 - d, t0, t0 + d (d proportional to h)."""
    a = hyperboloid_radius(p)
    exact = lambda r, t: np.sqrt(a * a * flow.scale_factor(t, p.alpha) ** 2 + np.asarray(r) ** 2)
    f = RadialField.from_function(lambda r: exact(r, 0.0), R, N)
    h = f.h
    d = 0.5 * h if delta is None else delta
    st = flow.primal_state(f, p)
    bp = lambda t: exact(R, t)
    out = []
    for target in (t0 - d, t0, t0 + d):
        st, _ = flow.integrate(st, target, boundary_provider=bp, scheme=scheme)
        out.append(st)
    return out


def evolution_identity_check(triples, p, nominal=1.0, name="evolution_identity"):
    """Residuals of eel1-eel3 over a refinement ladder (coarse to fine, h halved each level).

    Returns one series per identity; each passes iff every measured order is
    at least 0.8 * ``nominal``. For alpha = 1 the first identity has zero
    right side, so its series reports |L u| itself.
    """
    res = [evolution_identity_residuals(*tr, p) for tr in triples]
    hs = [tr[1].field.h for tr in triples]
    out = {}
    for key in ("eel1", "eel2", "eel3"):
        vals = [r[key] for r in res]
        out[key] = MonitorSeries(f"{name}_{key}", np.arange(len(vals)), vals, "order_ge", 0.8 * nominal,
                                 params={"ratio": hs[0] / hs[1] if len(hs) > 1 else 2.0},
                                 details={"h": hs, "orders": measured_orders(vals, hs[0] / hs[1]).tolist()
                                          if len(vals) > 1 else []})
    return out


# --------------------------------------------------------------------------
# scaling covariance


@dataclass
class AnalyticRadial:
    """Radial profile with analytic first and second derivatives."""

    u: object
    du: object
    d2u: object

    def scaled(self, beta):
        """The profile beta * u(x / beta)."""
        return AnalyticRadial(lambda r: beta * self.u(np.asarray(r) / beta),
                              lambda r: self.du(np.asarray(r) / beta),
                              lambda r: self.d2u(np.asarray(r) / beta) / beta)


def hyperboloid_profile(rho, shift=0.0):
    return AnalyticRadial(lambda r: shift + np.sqrt(rho * rho + np.asarray(r) ** 2),
                          lambda r: np.asarray(r) / np.sqrt(rho * rho + np.asarray(r) ** 2),
                          lambda r: rho * rho / (rho * rho + np.asarray(r) ** 2) ** 1.5)


def _analytic_speed_support(prof, r, p):
    from .geometry import radial_curvature_closed_form

    kr, ka, _, s = radial_curvature_closed_form(prof.u(r), prof.du(r), prof.d2u(r), r, p.n)
    kap = np.concatenate([np.asarray(kr)[:, None], np.repeat(np.asarray(ka)[:, None], p.n - 1, axis=1)], axis=1)
    return speed_F_alpha(p, kap), s


def scaling_covariance_analytic(prof, beta, p, r=None):
    """Max relative defects of F^alpha(beta x) = beta^-alpha F^alpha(x) and s(beta x) = beta s(x)."""
    if beta <= 0:
        raise DomainError("beta must be positive")
    r = np.linspace(0.0, 5.0, 201) if r is None else np.asarray(r, dtype=float)
    F0, s0 = _analytic_speed_support(prof, r, p)
    F1, s1 = _analytic_speed_support(prof.scaled(beta), beta * r, p)
    dF = float(np.max(np.abs(F1 - beta ** (-p.alpha) * F0) / np.abs(F0)))
    ds = float(np.max(np.abs(s1 - beta * s0) / np.abs(s0)))
    return dF, ds


def scaling_covariance_check(prof, beta, p, times=(0.1, 0.5), h=1 / 128, R=4.0, exact=None,
                             scaled_prof=None, tol=5e-3, analytic_tol=1e-12, name="scaling_covariance"):
    """Analytic covariance and the flow-orbit identity u(x, t) = u^(beta x, beta^(1+alpha) t) / beta.

    Both radial primal flows are run with the same spacing h: the base one on
    [0, R], the scaled one on [0, beta R]. They are compared at the base nodes
    x_i for which beta x_i is again a node. ``exact(r, t)`` supplies Dirichlet
    data for the base run; the scaled run uses beta * exact(r / beta, t / beta^(1+alpha)).
    ``scaled_prof`` replaces the scaled initial profile (negative controls).
    """
    dF, ds = scaling_covariance_analytic(prof, beta, p)
    if exact is None:
        raise DomainError("exact Dirichlet data are required for the orbit runs")
    N = int(round(R / h))
    M = int(round(beta * R / h))
    if abs(M * h - beta * R) > 1e-9 * R:
        raise DomainError("beta R must be a multiple of h")
    idx = np.arange(N + 1)
    img = beta * idx
    match = np.abs(img - np.round(img)) < 1e-9
    if match.sum() < 2:
        raise DomainError("no grid nodes shared between the base and the scaled run")
    base = flow.primal_state(RadialField(R, prof.u(np.linspace(0, R, N + 1))), p)
    sp = prof.scaled(beta) if scaled_prof is None else scaled_prof
    scaled = flow.primal_state(RadialField(M * h, sp.u(np.linspace(0, M * h, M + 1))), p)
    e = p.alpha + 1
    bp = lambda t: exact(R, t)
    bq = lambda t: beta * exact(R, t / beta**e)
    devs = []
    j = np.round(img[match]).astype(int)
    for t in times:
        base, _ = flow.integrate(base, t, boundary_provider=bp)
        scaled, _ = flow.integrate(scaled, beta**e * t, boundary_provider=bq)
        devs.append(float(np.max(np.abs(base.field.values[match] - scaled.field.values[j] / beta))))
    analytic_ok = dF <= analytic_tol and ds <= analytic_tol
    return MonitorSeries(name, list(times), devs, "max_le", tol,
                         details={"analytic_speed_defect": dF, "analytic_support_defect": ds,
                                  "analytic_pass": analytic_ok, "beta": beta, "compared_nodes": int(match.sum())})


# --------------------------------------------------------------------------
# convergence to expanders


class ConvergenceMonitor:
    """Sup distance to a target dual profile on the inner ``fraction`` of the ball, versus tau."""

    def __init__(self, target_dual, fraction=0.8, tol=1e-3, every=100, transient=0.2,
                 name="convergence"):
        self.target, self.fraction, self.tol, self.every = target_dual, fraction, tol, every
        self.transient, self.name = transient, name
        self.times, self.values = [], []
        self._count = 0
        self._cache = None

    def _setup(self, f):
        if isinstance(f, BallField2D):
            rho = f.rho[f.support]
            mask = rho <= self.fraction * f.r
            vals = lambda ff: ff.values[ff.support][mask]
        else:
            rho = f.r
            mask = rho <= self.fraction * f.rmax
            vals = lambda ff: ff.values[mask]
        self._cache = (self.target(rho[mask]), vals)

    def __call__(self, state, ev=None):
        self._count += 1
        if (self._count - 1) % self.every:
            return
        if self._cache is None:
            self._setup(state.field)
        tgt, vals = self._cache
        if self.times and state.tau <= self.times[-1]:
            return
        self.times.append(state.tau)
        self.values.append(float(np.max(np.abs(vals(state.field) - tgt))))

    def series(self):
        n = len(self.values)
        return MonitorSeries(self.name, self.times, self.values, "decreasing_then_le", self.tol,
                             params={"transient": int(self.transient * n), "slack": 1e-9})


def convergence_report(run, target_dual, fraction=0.8, tol=1e-3, transient=0.2, name="convergence"):
    """Batch form of ``ConvergenceMonitor`` over a list of normalized states."""
    mon = ConvergenceMonitor(target_dual, fraction, tol, every=1, transient=transient, name=name)
    for s in run:
        mon(s)
    return mon.series()


def residual_history_series(result, tol=1e-6, transient=0.2, name="stationary_residual"):
    """sup|H~| versus tau from ``run_to_stationary``; also reports the integral sum sup|H~| dtau."""
    res = result.residual
    integral = float(np.sum(res[:-1] * result.dtau)) if res.size > 1 else 0.0
    return MonitorSeries(name, result.tau, res, "decreasing_then_le", tol,
                         params={"transient": int(transient * res.size), "slack": 1e-9},
                         details={"integral": integral, "converged": bool(result.converged)})


def domain_exhaustion_check(limits, disk=None, name="domain_exhaustion"):
    """Compare stationary dual limits for increasing ball radii on a common inner disk.

    ``limits`` maps r to a radial dual field on [0, r]. Each limit is inverted
    to a primal profile; profiles are compared on the common disk |x| <= disk
    (default: 90% of the smallest primal domain). The series holds the sup
    distance of each limit to the largest-radius one, ordered by r; it passes
    iff that distance strictly decreases. Consecutive gaps are reported too.
    """
    radii = sorted(limits)
    prim = {r: legendre_inverse(limits[r]) for r in radii}
    top = min(pr.rmax for pr in prim.values())
    disk = 0.9 * top if disk is None else float(disk)
    x = np.linspace(0.0, disk, 401)
    vals = {r: flow.radial_interpolant(prim[r])(x) for r in radii}
    ref = radii[-1]
    dist = [float(np.max(np.abs(vals[r] - vals[ref]))) for r in radii[:-1]]
    gaps = [float(np.max(np.abs(vals[b] - vals[a]))) for a, b in zip(radii[:-1], radii[1:])]
    return MonitorSeries(name, radii[:-1], dist, "strictly_decreasing", 0.0,
                         details={"disk": disk, "reference_radius": ref, "consecutive_gaps": gaps,
                                  "pole_values": [float(vals[r][0]) for r in radii]})
