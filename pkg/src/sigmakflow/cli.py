"""Command line entry point: ``sigmakflow <subcommand> --config <path> [--threads N] [--out DIR]``.

The config is an INI file (sections of key = value lines). Unknown sections
or keys are rejected before anything runs. The output directory is taken
from ``--out``, else the ``OUTPUT_DIR`` environment variable, else
``[output] dir``, else ``./sigmakflow-out``.

Exit status: 0 when every requested monitor passes, 1 on a failed monitor or
a solver error (the last state is dumped), 2 on an invalid config.
"""

import argparse
import configparser
import json
import os
import sys
import time
import warnings

import numpy as np

from . import diagnostics as D
from . import expander as E
from . import flow
from . import legendre as L
from .errors import DomainError
from .geometry import BallField2D, GridField2D, RadialField, condition_a_check
from .symfunc import SpeedParams

SUBCOMMANDS = (
    "check-condition-a", "flow-dual", "flow-normalized", "flow-primal-radial", "expander-radial",
    "expander-limit", "legendre", "diagnose", "compare-exact",
)

# section -> key -> (type, default)
SCHEMA = {
    "params": {"n": (int, 2), "k": (int, 1), "alpha": (float, 1.0)},
    "grid": {"kind": (str, "radial"), "r": (float, 0.9), "h": (str, "1/128"), "R": (float, 10.0)},
    "initial": {"selector": (str, "hyperboloid"), "rho": (float, None), "shift": (float, 0.0),
                "snapshot": (str, ""), "amplitude": (float, 0.0), "mode": (int, 2)},
    "time": {"until": (float, 1.0), "scheme": (str, "euler"), "cfl": (float, flow.CFL)},
    "tolerances": {"stationary": (float, 1e-6), "max_tau": (float, 50.0), "sup_error": (float, 5e-3),
                   "monitor": (float, 1e-8), "extremum": (float, 1e-6), "condition_c": (float, 1.0)},
    "monitors": {"list": (str, ""), "kappa_ceiling": (float, 1e3), "every": (int, 1)},
    "expander": {"c": (float, 0.0), "R": (float, 50.0), "N": (int, 2000), "truncated": (str, "no")},
    "legendre": {"direction": (str, "forward"), "r": (float, 0.9), "h": (str, "1/32")},
    "diagnose": {"checks": (str, "evolution_identity"), "beta": (float, 1.5), "levels": (str, "64,128,256"),
                 "height_cutoff": (float, 6.0)},
    "output": {"dir": (str, ""), "plot": (str, "yes")},
}

KNOWN_MONITORS = ("sandwich", "residual_sign", "boundary_extremum", "kappa_max")


class ConfigError(Exception):
    pass


def _parse_fraction(text):
    text = str(text).strip()
    if "/" in text:
        a, b = text.split("/", 1)
        return float(a) / float(b)
    return float(text)


def _yes(text):
    t = str(text).strip().lower()
    if t in ("yes", "true", "1", "on"):
        return True
    if t in ("no", "false", "0", "off"):
        return False
    raise ConfigError(f"expected yes/no, got {text!r}")


def load_config(path):
    """Parse and validate an INI config; returns a nested dict with defaults filled in."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    cfg = {}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        for key in cp[sec]:
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {key!r} in [{sec}]")
    for sec, keys in SCHEMA.items():
        cfg[sec] = {}
        for key, (typ, default) in keys.items():
            if cp.has_option(sec, key):
                raw = cp.get(sec, key)
                try:
                    cfg[sec][key] = typ(raw)
                except ValueError as exc:
                    raise ConfigError(f"[{sec}] {key} = {raw!r}: {exc}") from exc
            else:
                cfg[sec][key] = default
    try:
        cfg["params"] = SpeedParams(cfg["params"]["n"], cfg["params"]["k"], cfg["params"]["alpha"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    for sec, key in (("grid", "h"), ("legendre", "h")):
        try:
            cfg[sec][key] = _parse_fraction(cfg[sec][key])
        except ValueError as exc:
            raise ConfigError(f"[{sec}] {key}: {exc}") from exc
        if not cfg[sec][key] > 0:
            raise ConfigError(f"[{sec}] {key} must be positive")
    if cfg["grid"]["kind"] not in ("radial", "ball"):
        raise ConfigError("[grid] kind must be radial or ball")
    if not 0 < cfg["grid"]["r"] < 1:
        raise ConfigError("[grid] r must lie in (0, 1)")
    if cfg["time"]["scheme"] not in ("euler", "midpoint"):
        raise ConfigError("[time] scheme must be euler or midpoint")
    if not 0 < cfg["time"]["cfl"] <= 1:
        raise ConfigError("[time] cfl must lie in (0, 1]")
    if cfg["initial"]["selector"] not in ("hyperboloid", "dual_closed_form", "snapshot", "anisotropic_trace"):
        raise ConfigError(f"unknown initial selector {cfg['initial']['selector']!r}")
    mons = [m.strip() for m in cfg["monitors"]["list"].split(",") if m.strip()]
    for m in mons:
        if m not in KNOWN_MONITORS:
            raise ConfigError(f"unknown monitor {m!r}")
    cfg["monitors"]["list"] = mons
    cfg["expander"]["truncated"] = _yes(cfg["expander"]["truncated"])
    cfg["output"]["plot"] = _yes(cfg["output"]["plot"])
    if cfg["legendre"]["direction"] not in ("forward", "inverse"):
        raise ConfigError("[legendre] direction must be forward or inverse")
    try:
        cfg["diagnose"]["levels"] = [int(x) for x in cfg["diagnose"]["levels"].split(",")]
    except ValueError as exc:
        raise ConfigError(f"[diagnose] levels: {exc}") from exc
    cfg["diagnose"]["checks"] = [c.strip() for c in cfg["diagnose"]["checks"].split(",") if c.strip()]
    for c in cfg["diagnose"]["checks"]:
        if c not in ("evolution_identity", "scaling_covariance", "phi_bounds"):
            raise ConfigError(f"unknown diagnose check {c!r}")
    return cfg


# --------------------------------------------------------------------------
# initial data


def _rho0(cfg):
    rho = cfg["initial"]["rho"]
    return E.hyperboloid_radius(cfg["params"]) if rho is None else rho


def initial_dual(cfg):
    """Dual initial field from the config (closed forms, snapshot or anisotropic trace)."""
    sel = cfg["initial"]["selector"]
    g = cfg["grid"]
    if sel == "snapshot":
        return flow.load_snapshot(cfg["initial"]["snapshot"]).field
    rho, shift = _rho0(cfg), cfg["initial"]["shift"]
    amp, mode = cfg["initial"]["amplitude"], cfg["initial"]["mode"]
    if sel in ("hyperboloid", "dual_closed_form"):
        prof = lambda s: -rho * np.sqrt(1 - s * s) - shift
        if g["kind"] == "radial":
            return RadialField.from_function(prof, g["r"], int(round(g["r"] / g["h"])))
        return BallField2D.from_function(lambda x, y: prof(np.hypot(x, y)), g["r"], g["h"])
    if g["kind"] != "ball":
        raise ConfigError("anisotropic traces need [grid] kind = ball")
    return BallField2D.from_function(
        lambda x, y: -rho * np.sqrt(1 - x * x - y * y) - (shift + amp * np.cos(mode * np.arctan2(y, x))),
        g["r"], g["h"])


def initial_primal(cfg):
    g = cfg["grid"]
    rho, shift = _rho0(cfg), cfg["initial"]["shift"]
    if cfg["initial"]["selector"] == "snapshot":
        return flow.load_snapshot(cfg["initial"]["snapshot"]).field
    return RadialField.from_function(lambda r: shift + np.sqrt(rho * rho + r * r), g["R"],
                                     int(round(g["R"] / g["h"])))


# --------------------------------------------------------------------------
# output


def emit_plot_data(series, directory):
    """One CSV per series plus ``plot.gp`` (gnuplot) referencing them; returns the written paths."""
    os.makedirs(directory, exist_ok=True)
    written = []
    names = []
    for s in series:
        base = D._slug(s.name)
        stem, i = base, 1
        while stem in names:
            i += 1
            stem = f"{base}_{i}"
        names.append(stem)
        path = os.path.join(directory, stem + ".csv")
        with open(path, "w") as fh:
            fh.write(s.csv_text())
        written.append(path)
    if not series:
        warnings.warn("no monitor series to plot", stacklevel=2)
    lines = ["# gnuplot script", "set datafile separator ','", "set key outside"]
    for s, stem in zip(series, names):
        v = s.values
        log = v.size > 1 and np.all(v > 0) and np.max(v) / np.min(v) > 100
        lines.append(f"set title '{s.name}'")
        lines.append("set logscale y" if log else "unset logscale y")
        lines.append(f"plot '{stem}.csv' using 1:2 skip 1 with lines title '{s.name}'")
        lines.append("pause -1")
    script = os.path.join(directory, "plot.gp")
    with open(script, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    written.append(script)
    return written


class _Tracker:
    """Observer chain that remembers the last state (dumped on solver errors)."""

    def __init__(self, observers=()):
        self.observers = list(observers)
        self.last = None

    def __call__(self, state, ev):
        self.last = state
        for ob in self.observers:
            ob(state, ev)


def _build_monitors(cfg, state, *, upper_profile=None):
    p = cfg["params"]
    tol = cfg["tolerances"]
    mons = []
    for m in cfg["monitors"]["list"]:
        if m == "sandwich":
            if state.formulation != "dual":
                raise ConfigError("sandwich monitor needs flow-dual")
            base = state.field
            rad = base.rho[base.support] if isinstance(base, BallField2D) else base.r
            prof0 = base.values[base.support] if isinstance(base, BallField2D) else base.values
            upper = upper_profile
            if upper is None:
                sol = E.solve_radial_shooting(p, max(cfg["initial"]["shift"], 0.0))
                upper = sol.dual
            lookup = dict(zip(np.round(rad, 14), prof0))
            lower = lambda rho: np.array([lookup[x] for x in np.round(rho, 14)])
            mons.append(D.SandwichMonitor(lower, upper, tol["monitor"], every=cfg["monitors"]["every"]))
        elif m == "residual_sign":
            if state.formulation != "normalized":
                raise ConfigError("residual_sign monitor needs a normalized run")
            mons.append(D.ResidualSignMonitor(tol["monitor"]))
        elif m == "boundary_extremum":
            if state.formulation != "dual":
                raise ConfigError("boundary_extremum monitor needs flow-dual")
            mons.append(D.BoundaryExtremumMonitor(tol["extremum"]))
        elif m == "kappa_max":
            mons.append(D.CurvatureCeilingMonitor(cfg["monitors"]["kappa_ceiling"]))
    return mons


def _sup_on(f, values):
    if isinstance(f, BallField2D):
        return float(np.max(np.abs(values[f.support])))
    return float(np.max(np.abs(values)))


# --------------------------------------------------------------------------
# subcommands; each returns (summary dict, list of MonitorSeries)


def cmd_check_condition_a(cfg, out):
    u0 = initial_primal(cfg)
    rep = condition_a_check(u0, cfg["params"], cfg["tolerances"]["condition_c"])
    summary = {"holds": rep.holds, "spacelike": rep.spacelike, "strictly_convex": rep.strictly_convex,
               "asymptotic_phi": rep.asymptotic_phi, "c0": rep.c0, "C": rep.big_c,
               "declared_C": rep.declared_c, "notes": rep.notes}
    return summary, [], rep.holds


def _dual_run(cfg, out, formulation):
    p = cfg["params"]
    f = initial_dual(cfg)
    st = flow.dual_state(f, p, formulation)
    mons = _build_monitors(cfg, st)
    tracker = _Tracker(mons)
    try:
        if formulation == "dual":
            st, steps = flow.integrate(st, cfg["time"]["until"], cfl=cfg["time"]["cfl"],
                                       scheme=cfg["time"]["scheme"], observer=tracker)
            extra = {"steps": steps}
        else:
            res = flow.run_to_stationary(st, cfg["tolerances"]["stationary"], cfg["tolerances"]["max_tau"],
                                         cfl=cfg["time"]["cfl"], scheme=cfg["time"]["scheme"], observer=tracker)
            st = res.state
            hist = D.residual_history_series(res, cfg["tolerances"]["stationary"])
            extra = {"steps": res.steps, "converged": bool(res.converged), "final_residual": float(res.residual[-1]),
                     "residual_integral": hist.details["integral"]}
            mons.append(_Static(hist))
    except (ArithmeticError, DomainError) as exc:
        dump = os.path.join(out, "failure_state.snap")
        flow.save_snapshot(dump, tracker.last if tracker.last is not None else st)
        raise _SolverFailure(str(exc), dump) from exc
    flow.save_snapshot(os.path.join(out, "final.snap"), st)
    summary = {"t": st.t, "tau": st.tau, "A": float(st.A), **extra}
    return summary, [m.series() for m in mons]


class _Static:
    def __init__(self, s):
        self.s = s

    def series(self):
        return self.s


class _SolverFailure(Exception):
    def __init__(self, msg, dump):
        super().__init__(msg)
        self.dump = dump


def cmd_flow_dual(cfg, out):
    summary, series = _dual_run(cfg, out, "dual")
    return summary, series, None


def cmd_flow_normalized(cfg, out):
    summary, series = _dual_run(cfg, out, "normalized")
    return summary, series, summary.get("converged")


def _primal_exact(cfg):
    return flow.shifted_hyperboloid_solution(_rho0(cfg), cfg["initial"]["shift"], cfg["params"])


def cmd_flow_primal_radial(cfg, out):
    p = cfg["params"]
    u0 = initial_primal(cfg)
    ex = _primal_exact(cfg)
    R = u0.rmax
    st = flow.primal_state(u0, p)
    mons = _build_monitors(cfg, st)
    tracker = _Tracker(mons)
    try:
        st, steps = flow.integrate(st, cfg["time"]["until"], cfl=cfg["time"]["cfl"], scheme=cfg["time"]["scheme"],
                                   boundary_provider=lambda t: ex(R, t), observer=tracker)
    except (ArithmeticError, DomainError) as exc:
        dump = os.path.join(out, "failure_state.snap")
        flow.save_snapshot(dump, tracker.last if tracker.last is not None else st)
        raise _SolverFailure(str(exc), dump) from exc
    flow.save_snapshot(os.path.join(out, "final.snap"), st)
    err = float(np.max(np.abs(st.field.values - ex(st.field.r, st.t))))
    return {"t": st.t, "steps": steps, "supError": err}, [m.series() for m in mons], None


def cmd_expander_radial(cfg, out):
    p = cfg["params"]
    ec = cfg["expander"]
    if ec["truncated"]:
        rho, shift = _rho0(cfg), cfg["initial"]["shift"]
        r = cfg["grid"]["r"]
        sol = E.solve_radial_truncated(p, r, -rho * np.sqrt(1 - r * r) - shift, N=ec["N"])
    else:
        sol = E.solve_radial_shooting(p, ec["c"], R=ec["R"], N=ec["N"])
    st = flow.FlowState(0.0, 0.0, sol.profile, "primal_radial", p)
    flow.save_snapshot(os.path.join(out, "expander.snap"), st)
    with open(os.path.join(out, "expander.json"), "w") as fh:
        fh.write(sol.summary_json() + "\n")
    return sol.summary(), [], None


def cmd_expander_limit(cfg, out):
    p = cfg["params"]
    summary, series = _dual_run(cfg, out, "normalized")
    lim = flow.load_snapshot(os.path.join(out, "final.snap")).field
    if isinstance(lim, RadialField):
        r = lim.rmax
        rho, shift = _rho0(cfg), cfg["initial"]["shift"]
        ref = E.solve_radial_truncated(p, r, -rho * np.sqrt(1 - r * r) - shift)
        diff = float(np.max(np.abs(lim.values - ref.dual(lim.r))))
        summary.update({"shooting_mu": ref.mu, "limit_mu": float(-lim.values[0]), "sup_vs_shooting": diff})
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            angles, phi = L.boundary_trace(lim)
        summary.update({"trace_min": float(phi.min()), "trace_max": float(phi.max()),
                        "trace_warnings": [str(w.message) for w in caught]})
    return summary, series, summary.get("converged")


def cmd_legendre(cfg, out):
    lc = cfg["legendre"]
    p = cfg["params"]
    rho, shift = _rho0(cfg), cfg["initial"]["shift"]
    exact_dual = lambda s: -rho * np.sqrt(1 - s * s) - shift
    if lc["direction"] == "forward":
        if cfg["grid"]["kind"] == "radial":
            u = initial_primal(cfg)
            d = L.legendre_transform(u, r=lc["r"], N=int(round(lc["r"] / lc["h"])))
            err = float(np.max(np.abs(d.values - exact_dual(d.r))))
            back = L.legendre_inverse(d)
            inv = float(np.max(np.abs(back.values - (shift + np.sqrt(rho * rho + back.r**2)))))
        else:
            Lh = cfg["grid"]["h"]
            u = GridField2D.from_function(lambda x, y: shift + np.sqrt(rho * rho + x * x + y * y), cfg["grid"]["R"], Lh)
            d = L.legendre_transform(u, r=lc["r"], h=lc["h"])
            err = float(np.nanmax(np.abs(d.values - exact_dual(np.where(d.support, d.rho, 0.0)))[d.support]))
            back = L.legendre_inverse(d)
            X, Y = back.XY
            inv = float(np.max(np.abs(back.values - (shift + np.sqrt(rho * rho + X * X + Y * Y)))))
        flow.save_snapshot(os.path.join(out, "transform.snap"), flow.FlowState(0.0, 0.0, d, "dual", p, None))
        return {"sup_error_vs_closed_form": err, "involution_error": inv}, [], None
    f = initial_dual(cfg)
    back = L.legendre_inverse(f)
    if isinstance(back, RadialField):
        err = float(np.max(np.abs(back.values - (shift + np.sqrt(rho * rho + back.r**2)))))
    else:
        X, Y = back.XY
        err = float(np.max(np.abs(back.values - (shift + np.sqrt(rho * rho + X * X + Y * Y)))))
    return {"sup_error_vs_closed_form": err}, [], None


def cmd_diagnose(cfg, out):
    p = cfg["params"]
    dc = cfg["diagnose"]
    series = []
    for check in dc["checks"]:
        if check == "evolution_identity":
            triples = [D.self_similar_triple(p, N, R=cfg["grid"]["R"]) for N in dc["levels"]]
            series.extend(D.evolution_identity_check(triples, p).values())
        elif check == "scaling_covariance":
            rho, shift = _rho0(cfg), cfg["initial"]["shift"]
            series.append(D.scaling_covariance_check(D.hyperboloid_profile(rho, shift), dc["beta"], p,
                                                     h=cfg["grid"]["h"], R=cfg["grid"]["R"],
                                                     exact=_primal_exact(cfg), tol=cfg["tolerances"]["sup_error"]))
        elif check == "phi_bounds":
            ex = _primal_exact(cfg)
            u0 = initial_primal(cfg)
            st = flow.primal_state(u0, p)
            run = [st]
            for t in np.linspace(0, cfg["time"]["until"], 11)[1:]:
                st, _ = flow.integrate(st, t, boundary_provider=lambda s: ex(u0.rmax, s))
                run.append(st)
            series.append(D.phi_bounds_check(run, dc["height_cutoff"]))
    return {"checks": dc["checks"]}, series, None


def _guarded(st, out, mons, until, **kw):
    """``flow.integrate`` with the monitors attached and the last state dumped on solver errors."""
    tracker = _Tracker(mons)
    try:
        return flow.integrate(st, until, observer=tracker, **kw)
    except (ArithmeticError, DomainError) as exc:
        dump = os.path.join(out, "failure_state.snap")
        flow.save_snapshot(dump, tracker.last if tracker.last is not None else st)
        raise _SolverFailure(str(exc), dump) from exc


def cmd_compare_exact(cfg, out):
    """Self-similar regression: exact expanding hyperboloid versus the dual or primal solver."""
    p = cfg["params"]
    a = E.hyperboloid_radius(p)
    g = cfg["grid"]
    T = cfg["time"]["until"]
    if g["kind"] == "ball" or cfg["initial"]["selector"] == "dual_closed_form":
        prof = lambda s: -a * np.sqrt(1 - s * s)
        if g["kind"] == "radial":
            f = RadialField.from_function(prof, g["r"], int(round(g["r"] / g["h"])))
        else:
            f = BallField2D.from_function(lambda x, y: prof(np.hypot(x, y)), g["r"], g["h"])
        st = flow.dual_state(f, p)
        mons = _build_monitors(cfg, st)
        t0 = time.perf_counter()
        st, steps = _guarded(st, out, mons, T, cfl=cfg["time"]["cfl"], scheme=cfg["time"]["scheme"])
        wall = time.perf_counter() - t0
        A = st.A
        if isinstance(f, BallField2D):
            exact = np.where(f.support, -a * A * np.sqrt(1 - np.where(f.support, f.rho, 0.0) ** 2), 0.0)
            err = float(np.max(np.abs(st.field.values - exact)[f.support]))
        else:
            err = float(np.max(np.abs(st.field.values - prof(f.r) * A)))
        formulation = "dual"
    else:
        R = g["R"]
        ex = lambda r, t: np.sqrt(a * a * flow.scale_factor(t, p.alpha) ** 2 + np.asarray(r) ** 2)
        f = RadialField.from_function(lambda r: ex(r, 0.0), R, int(round(R / g["h"])))
        st = flow.primal_state(f, p)
        mons = _build_monitors(cfg, st)
        t0 = time.perf_counter()
        st, steps = _guarded(st, out, mons, T, cfl=cfg["time"]["cfl"], scheme=cfg["time"]["scheme"],
                             boundary_provider=lambda t: ex(R, t))
        wall = time.perf_counter() - t0
        err = float(np.max(np.abs(st.field.values - ex(f.r, st.t))))
        formulation = "primal_radial"
    flow.save_snapshot(os.path.join(out, "final.snap"), st)
    tol = cfg["tolerances"]["sup_error"]
    s = D.MonitorSeries("supError", [st.t], [err], "max_le", tol)
    return {"formulation": formulation, "t": st.t, "steps": steps, "supError": err,
            "_wall": wall}, [s] + [m.series() for m in mons], None


COMMANDS = {
    "check-condition-a": cmd_check_condition_a,
    "flow-dual": cmd_flow_dual,
    "flow-normalized": cmd_flow_normalized,
    "flow-primal-radial": cmd_flow_primal_radial,
    "expander-radial": cmd_expander_radial,
    "expander-limit": cmd_expander_limit,
    "legendre": cmd_legendre,
    "diagnose": cmd_diagnose,
    "compare-exact": cmd_compare_exact,
}


def _config_echo(cfg):
    out = {}
    for sec, vals in cfg.items():
        if sec == "params":
            out[sec] = {"n": vals.n, "k": vals.k, "alpha": vals.alpha}
        else:
            out[sec] = vals
    return out


def run_experiment(subcommand, cfg, out, threads=1):
    """Run one subcommand; writes summary.json (deterministic) and timing.json. Returns the exit status."""
    os.makedirs(out, exist_ok=True)
    stale = os.path.join(out, "failure_state.snap")
    if os.path.exists(stale):
        os.remove(stale)
    t0 = time.perf_counter()
    try:
        summary, series, ok = COMMANDS[subcommand](cfg, out)
    except _SolverFailure as exc:
        _write_json(os.path.join(out, "summary.json"),
                    {"subcommand": subcommand, "config": _config_echo(cfg), "error": str(exc), "state_dump": exc.dump})
        print(f"solver error: {exc} (state dumped to {exc.dump})", file=sys.stderr)
        return 1
    except (ArithmeticError, DomainError) as exc:
        _write_json(os.path.join(out, "summary.json"),
                    {"subcommand": subcommand, "config": _config_echo(cfg), "error": str(exc)})
        print(f"solver error: {exc}", file=sys.stderr)
        return 1
    wall = time.perf_counter() - t0
    summary.pop("_wall", None)
    verdicts = {}
    for s in series:
        s.write(out)
        verdicts[s.name] = "pass" if s.verdict else "fail"
    if cfg["output"]["plot"] and series:
        emit_plot_data(series, os.path.join(out, "plots"))
    doc = {"subcommand": subcommand, "config": _config_echo(cfg), "threads": threads,
           "results": summary, "verdicts": verdicts}
    _write_json(os.path.join(out, "summary.json"), doc)
    _write_json(os.path.join(out, "timing.json"), {"wall_time_seconds": wall})
    passed = all(v == "pass" for v in verdicts.values()) and ok is not False
    return 0 if passed else 1


def _write_json(path, doc):
    def fmt(o):
        if isinstance(o, float):
            return float(f"{o:.17g}")
        return D._json_default(o)

    with open(path, "w") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True, default=fmt) + "\n")


def main(argv=None):
    ap = argparse.ArgumentParser(prog="sigmakflow", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", required=True)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default=None)
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = args.out or os.environ.get("OUTPUT_DIR") or cfg["output"]["dir"] or "sigmakflow-out"
    try:
        return run_experiment(args.subcommand, cfg, out, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
