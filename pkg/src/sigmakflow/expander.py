"""Radial self-expanders: closed-form hyperboloid and ODE shooting.

A graph u is a self-expander when sigma_k^(alpha/k)(kappa) equals its support
function s = (u - x.Du)/w. For radial graphs the equation is an ODE in r. It
is integrated in the rapidity variables

    psi = u - r,   theta = artanh(u'),

so that u' -> 1 (theta -> infinity) causes no loss of precision:

    psi' = tanh(theta) - 1,   theta' = kappa_rad / cosh(theta),
    kappa_ang = sinh(theta) / r,   s = psi cosh(theta) + r exp(-theta).

sigma_k is affine in kappa_rad, so kappa_rad has a closed form at every r.
"""

import json
from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .errors import ConeError, DomainError
from .geometry import BallField2D, RadialField, dual_curvature_matrix, primal_curvature
from .symfunc import SpeedParams, speed_F_alpha, speed_F_star

THETA_MAX = 350.0
R0 = 1e-5


def hyperboloid_radius(p):
    """Radius a = C(n,k)^(alpha/(k(1+alpha))) of the expanding hyperboloid sqrt(a^2 + |x|^2)."""
    return comb(p.n, p.k) ** (p.alpha / (p.k * (1 + p.alpha)))


@dataclass
class ExpanderSolution:
    """Radial expander: profile on [0, R], asymptotic constant c and pole value mu."""

    profile: RadialField
    c: float
    mu: float
    residual: float
    R: float
    tail_error: float = float("nan")
    params: SpeedParams = None
    interpolant: object = field(default=None, repr=False)
    ode: object = field(default=None, repr=False)

    def __call__(self, r):
        """Profile u(r), evaluated from the dense ODE output."""
        return self.interpolant(r)

    def dual(self, rho, samples=20000):
        """Legendre transform u*(rho) read off the ODE solution parametrically.

        Along the profile rho = u'(x) and u*(rho) = x rho - u(x), with
        du*/drho = x; a Hermite spline in rho interpolates these triples.
        """
        rho = np.asarray(rho, dtype=float)
        top = float(np.max(rho)) if rho.size else 0.0
        th_top = np.arctanh(min(top, 1 - 1e-15))
        th_end = self.ode.y[1, -1]
        if th_top > th_end + 1e-9:
            raise DomainError(f"profile slopes stop at {np.tanh(th_end):.12g} < {top:.12g}")
        th_top = min(th_top, th_end)
        x_hi = self.ode.t[-1]
        if th_top < th_end:
            k = int(np.searchsorted(self.ode.y[1], th_top))
            x_hi = self.ode.t[min(k + 1, self.ode.t.size - 1)]
        x = np.linspace(R0, x_hi, samples)
        psi, th = self.ode.sol(x)
        slope = np.tanh(th)
        ustar = x * slope - (psi + x)
        xs = np.concatenate([[0.0], x])
        slope = np.concatenate([[0.0], slope])
        ustar = np.concatenate([[-self.mu], ustar])
        return CubicHermiteSpline(slope, ustar, xs)(rho)

    def summary(self):
        p = self.params
        return {
            "mu": self.mu, "c": self.c, "residual": self.residual, "R": self.R,
            "tail_error": self.tail_error, "N": int(self.profile.N),
            "h": self.profile.h, "n": p.n, "k": p.k, "alpha": p.alpha,
        }

    def summary_json(self):
        return json.dumps(self.summary(), indent=2, default=repr)


# --------------------------------------------------------------------------
# the radial ODE


def _kappa_rad(p, T, q):
    n, k = p.n, p.k
    return (T - comb(n - 1, k) * q**k) / (comb(n - 1, k - 1) * q ** (k - 1))


class _Fail(Exception):
    pass


def _rhs_factory(p):
    n, k = p.n, p.k
    ka_exp = k / p.alpha
    c1, c2 = comb(n - 1, k - 1), comb(n - 1, k)
    ln2 = np.log(2.0)

    def rhs(r, y):
        # theta' = kappa_rad / cosh(theta), assembled in logs: q^(k-1) cosh overflows for large theta
        psi, th = y
        if not th > 0:
            raise _Fail(r)
        e2 = np.exp(-2.0 * th)
        log_ch = th + np.log1p(e2) - ln2
        log_q = th + np.log1p(-e2) - ln2 - np.log(r)
        s = psi * np.exp(log_ch) + r * np.exp(-th)
        if not s > 0:
            raise _Fail(r)
        tanh = np.tanh(th)
        first = np.exp(ka_exp * np.log(s) - (k - 1) * log_q - log_ch) / c1
        dth = first - (c2 / c1) * tanh / r
        return [tanh - 1.0, dth]

    return rhs


def _pole_start(p, mu, r0=R0):
    q0 = (mu ** (p.k / p.alpha) / comb(p.n, p.k)) ** (1.0 / p.k)
    if q0 * r0 >= 0.5:
        raise _Fail(r0)
    return [mu + 0.5 * q0 * r0 * r0 - r0, np.arctanh(q0 * r0)]


def _shoot(p, mu, R, *, stop_theta=None, dense=False, rtol=1e-12, atol=1e-13):
    """Integrate from the pole; returns the solve_ivp result or None on cone failure."""
    if mu <= 0:
        return None
    events = []
    big = lambda r, y: y[1] - THETA_MAX
    big.terminal = True
    events.append(big)
    if stop_theta is not None:
        hit = lambda r, y: y[1] - stop_theta
        hit.terminal = True
        events.append(hit)
    try:
        sol = solve_ivp(_rhs_factory(p), (R0, R), _pole_start(p, mu), method="DOP853",
                        rtol=rtol, atol=atol, events=events, dense_output=dense)
    except _Fail:
        return None
    if sol.status < 0:
        return None
    return sol


def _c_estimate(p, mu, R):
    """Estimate of lim (u - r); psi + r psi' removes the 1/r tail; -inf on failure."""
    sol = _shoot(p, mu, R)
    if sol is None:
        return -np.inf
    r, (psi, th) = sol.t[-1], sol.y[:, -1]
    if sol.status == 1:
        return psi
    return psi + r * (np.tanh(th) - 1.0)


def _c_extrapolated(p, mu, R):
    c1, c2, c4 = (_c_estimate(p, mu, m * R) for m in (1, 2, 4))
    if not np.isfinite(c1 + c2 + c4):
        return (c4 if np.isfinite(c4) else -np.inf), np.inf
    d1, d2 = c2 - c1, c4 - c2
    if d1 == 0 or d2 == 0 or d2 / d1 <= 0 or d2 / d1 >= 1:
        return c4, abs(d2)
    ratio = d2 / d1
    return c4 + d2 * ratio / (1 - ratio), abs(d2 * ratio / (1 - ratio))


def _bracket(g, target, lo=1e-3, hi=1.0):
    while g(hi) < target:
        lo, hi = hi, 2 * hi
        if hi > 1e6:
            raise ConeError("no bracket for the pole value")
    return lo, hi


def _profile(p, mu, R, N):
    sol = _shoot(p, mu, R, dense=True)
    if sol is None:
        raise ConeError(f"shot from mu={mu} leaves the admissible cone")
    r_end = sol.t[-1]
    th_end, psi_end = sol.y[1, -1], sol.y[0, -1]

    def u(r):
        r = np.asarray(r, dtype=float)
        out = np.empty(r.shape)
        inner = r < R0
        q0 = (mu ** (p.k / p.alpha) / comb(p.n, p.k)) ** (1.0 / p.k)
        out[inner] = mu + 0.5 * q0 * r[inner] ** 2
        mid = (~inner) & (r <= r_end)
        if np.any(mid):
            out[mid] = sol.sol(r[mid])[0] + r[mid]
        tail = r > r_end
        out[tail] = psi_end + r[tail]  # theta beyond THETA_MAX: psi is frozen
        return out

    grid = np.linspace(0.0, R, N + 1)
    return RadialField(R, u(grid)), u, sol


def _profile_residual(prof, p, slope_cap=0.99):
    # finite-difference check where the graph is safely spacelike; nearly null tails are skipped
    up = np.gradient(prof.values, prof.h)
    m = int(np.argmax(np.abs(up) > slope_cap)) if np.any(np.abs(up) > slope_cap) else prof.N + 1
    m = max(m, 3)
    sub = RadialField(prof.h * (m - 1), prof.values[:m].copy())
    return float(np.max(expander_residual_primal(sub, p)[1:-1]))


def solve_radial_shooting(p, c, R=50.0, tol=1e-12, N=2000):
    """Radial expander with u(r) - r -> c.

    The pole value mu is found by bracketing and Brent's method on the
    extrapolated asymptotic constant (tail estimated from R, 2R and 4R).
    """
    if c < 0:
        raise DomainError("asymptotic constant must be >= 0")
    g = lambda mu: _c_extrapolated(p, mu, R)[0]
    a = hyperboloid_radius(p)
    lo, hi = _bracket(g, c, lo=a * 0.5 if c > 0 else a * 0.5, hi=a * 1.5)
    if g(lo) > c:
        lo = 1e-3
    mu = brentq(lambda m: g(m) - c, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
    c_found, tail = _c_extrapolated(p, mu, R)
    prof, u, sol = _profile(p, mu, R, N)
    return ExpanderSolution(prof, c_found, mu, _profile_residual(prof, p), R, tail, p, u, sol)


def solve_radial_truncated(p, r_dual, boundary_value, tol=1e-13, N=2000):
    """Radial expander whose dual lives on [0, r_dual] with u*(r_dual) = boundary_value.

    This is the stationary problem of the normalized dual flow on the ball of
    radius r_dual. The shot stops where u' = r_dual and the Legendre value
    x u'(x) - u(x) there is matched to ``boundary_value``.
    """
    if not 0 < r_dual < 1:
        raise DomainError("r_dual must lie in (0, 1)")
    th_star = np.arctanh(r_dual)

    def end(mu):
        sol = _shoot(p, mu, 1e4, stop_theta=th_star)
        if sol is None or sol.status != 1 or sol.t_events[1].size == 0:
            return None
        x = sol.t_events[1][0]
        psi = sol.y_events[1][0][0]
        return x, x * r_dual - (psi + x)

    def g(mu):
        e = end(mu)
        return -np.inf if e is None else -e[1]  # -u*(r_dual) increases with mu

    target = -boundary_value
    a = hyperboloid_radius(p)
    lo, hi = 1e-3, a
    while g(hi) < target:
        lo, hi = hi, 2 * hi
        if hi > 1e6:
            raise ConeError("no bracket for the pole value")
    mu = brentq(lambda m: g(m) - target, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
    x_end, _ = end(mu)
    prof, u, sol = _profile(p, mu, x_end, N)
    res = _profile_residual(prof, p)
    return ExpanderSolution(prof, float("nan"), mu, res, x_end, float("nan"), p, u, sol)


def expander_residual(f, p):
    """Pointwise |sigma_k^(alpha/k)(kappa) - s| (graph) or |F_*^(-alpha) w* + u*| (dual).

    Ball fields and radial fields on [0, r] with r < 1 are read as dual
    potentials, wider radial fields as graphs. ``expander_residual_primal``
    and ``expander_residual_dual`` skip the guess.
    """
    if isinstance(f, BallField2D) or (isinstance(f, RadialField) and f.rmax < 1):
        return expander_residual_dual(f, p)
    return expander_residual_primal(f, p)


def expander_residual_primal(f, p):
    cd = primal_curvature(f, p)
    return np.abs(speed_F_alpha(p, cd.kappa) - cd.support)


def expander_residual_dual(f, p):
    dc = dual_curvature_matrix(f, p)
    if isinstance(f, BallField2D):
        mask = f.interior
    else:
        mask = np.ones(f.values.shape, dtype=bool)
    if np.any(~dc.positive[mask]):
        raise ConeError("dual matrix is not positive definite")
    out = np.full(np.shape(f.values), np.nan)
    lam = dc.lam[mask]
    out[mask] = np.abs(speed_F_star(p, lam) ** (-p.alpha) * dc.wstar[mask] + f.values[mask])
    return out
