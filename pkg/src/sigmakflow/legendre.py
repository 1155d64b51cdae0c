"""Discrete Legendre transform between graph fields and dual fields.

u*(xi) = max_x (x.xi - u(x)) is taken exactly over the grid, then refined by
one Newton step on the local quadratic interpolant around the maximizing node.
The same routine inverts the transform (the conjugate is an involution).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvexityError, DomainError, SpacelikeError, TraceUnstable
from .geometry import BallField2D, GridField2D, RadialField

DEGENERATE_TOL = 1e-12
CHUNK = 2048


@dataclass
class LegendrePair:
    """A field, its transform, the matched abscissae and the Young equality defect."""

    primal: object
    dual: object
    argmax: np.ndarray
    match_error: float


# --------------------------------------------------------------------------
# radial


def _check_convex_1d(values, h):
    d2 = np.empty(values.size)
    d2[0] = 2.0 * (values[1] - values[0])
    d2[1:-1] = values[2:] - 2.0 * values[1:-1] + values[:-2]
    d2[-1] = d2[-2]
    d2 /= h * h
    if np.all(np.abs(d2) <= DEGENERATE_TOL * max(1.0, np.max(np.abs(values)))):
        raise ConvexityError("degenerate input: vanishing second differences", point=0)
    bad = np.flatnonzero(~(d2[:-1] > 0))
    if bad.size:
        i = int(bad[0])
        raise ConvexityError(f"not strictly convex at node {i} (second difference {d2[i]:.3e})", point=i)
    return d2


def _radial_conjugate(values, h, y):
    """max_{x >= 0} (x y - f(x)) for an even convex profile sampled at x_i = i h."""
    N = values.size - 1
    x = np.arange(N + 1) * h
    slopes = np.diff(values) / h
    i = np.searchsorted(slopes, y, side="left")  # node maximizing x_i y - f_i
    i = np.clip(i, 0, N)
    # local quadratic: pole reflected evenly, last node one-sided
    im = np.clip(i, 1, N - 1)
    fm, f0, fp = values[im - 1], values[im], values[im + 1]
    d2 = (fp - 2 * f0 + fm) / (h * h)
    d1 = (fp - fm) / (2 * h) + d2 * (x[i] - x[im])
    pole = i == 0
    d1 = np.where(pole, 0.0, d1)
    d2 = np.where(pole, 2.0 * (values[1] - values[0]) / (h * h), d2)
    step = (y - d1) / d2
    val = x[i] * y - values[i] + 0.5 * d2 * step * step
    return val, x[i] + step, i


def legendre_transform(u, r=None, N=None, h=None):
    """Legendre transform of a convex spacelike graph field.

    Radial input gives a ``RadialField`` on [0, r] with ``N`` intervals; r
    defaults to the largest discrete slope, i.e. the closure of the discrete
    gradient image. ``GridField2D`` input gives a ``BallField2D`` of radius
    ``r`` and spacing ``h``; B_r must lie in the discrete gradient image.
    """
    return legendre_pair(u, r=r, N=N, h=h).dual


def legendre_pair(u, r=None, N=None, h=None):
    """Like ``legendre_transform`` but also returns maximizers and the matched-pair defect."""
    if isinstance(u, RadialField):
        slopes = np.diff(u.values) / u.h
        if np.any(np.abs(slopes) >= 1):
            i = int(np.argmax(np.abs(slopes) >= 1))
            raise SpacelikeError(f"discrete slope {slopes[i]:.6g} is not spacelike", point=i)
        _check_convex_1d(u.values, u.h)
        smax = float(slopes[-1])
        r = smax if r is None else float(r)
        if r > smax * (1 + 1e-12):
            raise DomainError(f"requested radius {r} exceeds the discrete gradient image {smax:.6g}")
        N = u.N if N is None else int(N)
        rho = np.linspace(0.0, r, N + 1)
        val, xm, _ = _radial_conjugate(u.values, u.h, rho)
        dual = RadialField(r, val)
        # Young defect at matched pairs: u(x) + u*(Du(x)) - x Du(x)
        up = np.gradient(u.values, u.h)
        inside = (up >= 0) & (up <= r)
        us = _radial_conjugate(u.values, u.h, up[inside])[0]
        err = float(np.max(np.abs(u.values[inside] + us - u.r[inside] * up[inside]))) if inside.any() else 0.0
        return LegendrePair(u, dual, xm, err)
    if isinstance(u, GridField2D):
        if r is None or h is None:
            raise DomainError("2-D transforms need the ball radius r and spacing h")
        return _grid_transform(u, float(r), float(h))
    raise TypeError(f"unsupported field {type(u).__name__}")


def legendre_inverse(ustar, N=None, L=None, h=None):
    """Inverse transform u(x) = max_xi (x.xi - u*(xi)) on the gradient image Du*(B_r).

    Radial input gives a ``RadialField`` on [0, X] with X the largest discrete
    slope of u*. Ball input gives a ``GridField2D`` on the square [-L, L]^2
    (default: the largest square inside the gradient image of the ring).
    """
    if isinstance(ustar, RadialField):
        _check_convex_1d(ustar.values, ustar.h)
        slopes = np.diff(ustar.values) / ustar.h
        X = float(slopes[-1])
        N = ustar.N if N is None else int(N)
        x = np.linspace(0.0, X, N + 1)
        val, _, _ = _radial_conjugate(ustar.values, ustar.h, x)
        return RadialField(X, val)
    if isinstance(ustar, BallField2D):
        return _ball_inverse(ustar, L, h)
    raise TypeError(f"unsupported field {type(ustar).__name__}")


# --------------------------------------------------------------------------
# two dimensions


def _hess_at(vals, i, j, h):
    g = np.stack([(vals[i + 1, j] - vals[i - 1, j]) / (2 * h), (vals[i, j + 1] - vals[i, j - 1]) / (2 * h)], -1)
    hxx = (vals[i + 1, j] - 2 * vals[i, j] + vals[i - 1, j]) / h**2
    hyy = (vals[i, j + 1] - 2 * vals[i, j] + vals[i, j - 1]) / h**2
    hxy = (vals[i + 1, j + 1] - vals[i + 1, j - 1] - vals[i - 1, j + 1] + vals[i - 1, j - 1]) / (4 * h * h)
    return g, hxx, hxy, hyy


def _conjugate_points(P, vals, Q, valid, h):
    """max over sample points P (values ``vals``) of P.q - vals, Newton-refined; returns value, argmax index."""
    P = P[valid]
    f = vals[valid]
    best = np.empty(len(Q), dtype=np.int64)
    for s in range(0, len(Q), CHUNK):
        q = Q[s:s + CHUNK]
        best[s:s + CHUNK] = np.argmax(q @ P.T - f[None, :], axis=1)
    return np.flatnonzero(valid.ravel())[best]


def _refine(vals, flat_idx, Q, X, Y, h):
    i, j = np.unravel_index(flat_idx, vals.shape)
    edge = (i == 0) | (j == 0) | (i == vals.shape[0] - 1) | (j == vals.shape[1] - 1)
    if np.any(edge):
        raise DomainError("conjugate maximizer reaches the edge of the sampled domain")
    g, a, b, c = _hess_at(vals, i, j, h)
    if np.any(~np.isfinite(g)) or np.any(~np.isfinite(a + b + c)):
        raise DomainError("conjugate maximizer adjacent to an unsampled point")
    det = a * c - b * b
    if np.any(~(det > 0)) or np.any(~(a > 0)):
        k = int(np.argmax(~((det > 0) & (a > 0))))
        raise ConvexityError("local Hessian not positive definite at a maximizer", point=(int(i[k]), int(j[k])))
    d = Q - g
    sx = (c * d[:, 0] - b * d[:, 1]) / det
    sy = (a * d[:, 1] - b * d[:, 0]) / det
    x0 = X[i, j]
    y0 = Y[i, j]
    val = x0 * Q[:, 0] + y0 * Q[:, 1] - vals[i, j] + 0.5 * (d[:, 0] * sx + d[:, 1] * sy)
    return val, np.stack([x0 + sx, y0 + sy], -1)


def _check_convex_2d(vals, h, mask):
    inner = mask.copy()
    inner[0, :] = inner[-1, :] = inner[:, 0] = inner[:, -1] = False
    for di, dj in ((1, 0), (0, 1), (1, 1), (1, -1)):
        nb = np.roll(np.roll(mask, di, 0), dj, 1) & np.roll(np.roll(mask, -di, 0), -dj, 1)
        inner &= nb
    I, J = np.nonzero(inner)
    if I.size == 0:
        raise DomainError("field too small to test convexity")
    _, a, b, c = _hess_at(vals, I, J, h)
    if np.all(np.abs(a) + np.abs(c) <= DEGENERATE_TOL * max(1.0, np.nanmax(np.abs(vals)))):
        raise ConvexityError("degenerate input: vanishing second differences", point=(int(I[0]), int(J[0])))
    bad = ~((a > 0) & (a * c - b * b > 0))
    if np.any(bad):
        k = int(np.argmax(bad))
        raise ConvexityError("not strictly convex", point=(int(I[k]), int(J[k])))


def _grid_transform(u, r, h):
    X, Y = u.XY
    vals = u.values
    mask = np.ones(vals.shape, dtype=bool)
    g = np.stack(np.gradient(vals, u.h), -1)
    if np.any(np.sum(g * g, -1) >= 1):
        raise SpacelikeError("discrete gradient is not spacelike")
    _check_convex_2d(vals, u.h, mask)
    target = BallField2D.from_function(lambda x, y: np.zeros_like(x), r, h)
    sup = target.support
    Xi, Yi = target.XY
    Q = np.stack([Xi[sup], Yi[sup]], -1)
    P = np.stack([X.ravel(), Y.ravel()], -1)
    idx = _conjugate_points(P, vals.ravel(), Q, mask.ravel(), u.h)
    try:
        val, xm = _refine(vals, idx, Q, X, Y, u.h)
    except DomainError as exc:
        raise DomainError(f"B_{r:g} is not inside the discrete gradient image: {exc}") from exc
    out = np.full(Xi.shape, np.nan)
    out[sup] = val
    dual = BallField2D(r, h, out)
    # matched-pair defect on grid points whose gradient lands in B_r
    gi = g[1:-1, 1:-1].reshape(-1, 2)
    inside = np.hypot(gi[:, 0], gi[:, 1]) < r
    err = 0.0
    if inside.any():
        Qm = gi[inside]
        us, _ = _refine(vals, _conjugate_points(P, vals.ravel(), Qm, mask.ravel(), u.h), Qm, X, Y, u.h)
        xin = np.stack([X[1:-1, 1:-1].ravel(), Y[1:-1, 1:-1].ravel()], -1)[inside]
        fin = vals[1:-1, 1:-1].ravel()[inside]
        err = float(np.max(np.abs(fin + us - np.sum(xin * Qm, -1))))
    return LegendrePair(u, dual, xm, err)


def _ball_inverse(ustar, L, h):
    vals = ustar.values
    sup = ustar.support
    _check_convex_2d(np.where(sup, vals, 0.0), ustar.h, sup)
    Xi, Yi = ustar.XY
    I, J = np.nonzero(ustar.interior)
    g, *_ = _hess_at(vals, I, J, ustar.h)
    on_edge = ustar.interior & ~np.roll(ustar.interior, 1, 0) | ustar.interior & ~np.roll(ustar.interior, -1, 0) \
        | ustar.interior & ~np.roll(ustar.interior, 1, 1) | ustar.interior & ~np.roll(ustar.interior, -1, 1)
    reach = float(np.min(np.hypot(g[:, 0], g[:, 1])[on_edge[I, J]]))
    L = reach / np.sqrt(2) * 0.999 if L is None else float(L)
    h = ustar.h if h is None else float(h)
    M = int(np.floor(L / h))
    L = M * h
    c = np.arange(-M, M + 1) * h
    X, Y = np.meshgrid(c, c, indexing="ij")
    Q = np.stack([X.ravel(), Y.ravel()], -1)
    P = np.stack([Xi.ravel(), Yi.ravel()], -1)
    idx = _conjugate_points(P, np.where(sup, vals, np.inf).ravel(), Q, sup.ravel(), ustar.h)
    val, _ = _refine(vals, idx, Q, Xi, Yi, ustar.h)
    return GridField2D(L, h, val.reshape(X.shape))


# --------------------------------------------------------------------------
# Young inequality and boundary trace


def young_residual(u, ustar):
    """min over all grid pairs (x, xi) of u(x) + u*(xi) - x.xi (radial fields)."""
    x, f = u.r, u.values
    rho, g = ustar.r, ustar.values
    return float(np.min(f[:, None] + g[None, :] - x[:, None] * rho[None, :]))


def boundary_trace(ustar, A=1.0, n_angles=64, tol=1e-3):
    """phi = -u*/A on the unit sphere, extrapolated linearly in w* from the outermost points.

    Radial fields return a scalar. Ball fields return ``(angles, phi)`` with
    ``n_angles`` equally spaced angles. A ``TraceUnstable`` warning is issued
    when the estimates from the outermost and the next band differ by more
    than ``tol`` (relative to max(1, |phi|)).
    """
    if A <= 0:
        raise DomainError("scale A must be positive")
    if isinstance(ustar, RadialField):
        v = ustar.values
        ws = np.sqrt(1 - ustar.r**2)
        e1 = v[-1] - ws[-1] * (v[-1] - v[-2]) / (ws[-1] - ws[-2])
        e2 = v[-2] - ws[-2] * (v[-2] - v[-3]) / (ws[-2] - ws[-3])
        if abs(e1 - e2) > tol * max(1.0, abs(e1)):
            warnings.warn(f"trace estimates {e1:.6g} and {e2:.6g} disagree", TraceUnstable, stacklevel=2)
        return -e1 / A
    if isinstance(ustar, BallField2D):
        sup = ustar.support
        X, Y = ustar.XY
        rho = np.hypot(X[sup], Y[sup])
        ang = np.arctan2(Y[sup], X[sup])
        v = ustar.values[sup]
        ws = np.sqrt(1 - rho * rho)
        h = ustar.h
        rmax = rho.max()
        angles = np.linspace(-np.pi, np.pi, n_angles, endpoint=False)
        phi = np.empty(n_angles)
        worst = 0.0
        for m, th in enumerate(angles):
            dth = np.angle(np.exp(1j * (ang - th)))
            est = []
            for lo, hi in ((rmax - 2.5 * h, rmax + 1e-12), (rmax - 5 * h, rmax - 2.5 * h)):
                sel = (rho > lo) & (rho <= hi) & (np.abs(dth) * rho < 3 * h)
                B = np.stack([np.ones(sel.sum()), ws[sel], dth[sel], dth[sel] ** 2], -1)
                coef, *_ = np.linalg.lstsq(B, v[sel], rcond=None)
                est.append(coef[0])
            phi[m] = -est[0] / A
            worst = max(worst, abs(est[0] - est[1]) / max(1.0, abs(est[0])))
        if worst > tol:
            warnings.warn(f"trace estimates from the outer bands disagree by {worst:.3e}", TraceUnstable, stacklevel=2)
        return angles, phi
    raise TypeError(f"unsupported field {type(ustar).__name__}")
