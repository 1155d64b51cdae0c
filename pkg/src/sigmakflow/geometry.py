"""Discrete differential geometry of spacelike graphs and of their dual potentials.

Field containers
----------------
``RadialField``   u(r) on the uniform grid r_i = i*h, i = 0..N, with N*h = rmax.
``GridField2D``   a primal graph u(x) on the square [-L, L]^2 (n = 2).
``BallField2D``   a dual potential u*(xi) on the Cartesian points of the disk
                  |xi| < r plus the one-cell ring of points needed by the
                  nine-point stencil; NaN elsewhere.
"""

from dataclasses import dataclass, field
from math import ceil

import numpy as np

from .errors import ConvexityError, DomainError, SpacelikeError
from .symfunc import speed_F_alpha, sigma

EPS_GUARD = 1e-6
JACOBI_TOL = 1e-13
CONVEX_TOL = 1e-8


# --------------------------------------------------------------------------
# field containers


@dataclass
class RadialField:
    rmax: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 3:
            raise DomainError("a radial field needs at least three nodes")
        if not self.rmax > 0:
            raise DomainError("rmax must be positive")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("radial field values must be finite")

    @classmethod
    def from_function(cls, f, rmax, N):
        r = np.linspace(0.0, rmax, N + 1)
        return cls(rmax, f(r))

    @property
    def N(self):
        return self.values.size - 1

    @property
    def h(self):
        return self.rmax / self.N

    @property
    def r(self):
        return np.linspace(0.0, self.rmax, self.N + 1)

    def copy(self, values=None):
        return RadialField(self.rmax, self.values.copy() if values is None else values)


def _half_width(r, h):
    return int(ceil(r / h - 1e-9)) + 1


@dataclass
class GridField2D:
    L: float
    h: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        M = int(round(self.L / self.h))
        if abs(M * self.h - self.L) > 1e-9 * self.L:
            raise DomainError("L must be an integer multiple of h")
        if self.values.shape != (2 * M + 1, 2 * M + 1):
            raise DomainError(f"expected a {(2 * M + 1,) * 2} grid, got {self.values.shape}")

    @classmethod
    def from_function(cls, f, L, h):
        M = int(round(L / h))
        c = np.arange(-M, M + 1) * h
        X, Y = np.meshgrid(c, c, indexing="ij")
        return cls(M * h, h, f(X, Y))

    @property
    def coords(self):
        M = (self.values.shape[0] - 1) // 2
        return np.arange(-M, M + 1) * self.h

    @property
    def XY(self):
        c = self.coords
        return np.meshgrid(c, c, indexing="ij")


@dataclass
class BallField2D:
    r: float
    h: float
    values: np.ndarray
    _masks: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not 0 < self.r <= 1:
            raise DomainError("ball radius must lie in (0, 1]")
        M = _half_width(self.r, self.h)
        if self.values.shape != (2 * M + 1, 2 * M + 1):
            raise DomainError(f"expected a {(2 * M + 1,) * 2} grid, got {self.values.shape}")
        if not np.all(np.isfinite(self.values[self.support])):
            raise DomainError("ball field values must be finite on the support")

    @classmethod
    def from_function(cls, f, r, h):
        M = _half_width(r, h)
        c = np.arange(-M, M + 1) * h
        X, Y = np.meshgrid(c, c, indexing="ij")
        interior, ring = _ball_masks(X, Y, r)
        support = interior | ring
        if np.any(X[support] ** 2 + Y[support] ** 2 >= 1.0):
            raise DomainError("stencil ring reaches |xi| >= 1; reduce r or h")
        vals = np.full(X.shape, np.nan)
        vals[support] = f(X[support], Y[support])
        return cls(r, h, vals)

    def _build(self):
        if self._masks is None:
            M = (self.values.shape[0] - 1) // 2
            c = np.arange(-M, M + 1) * self.h
            X, Y = np.meshgrid(c, c, indexing="ij")
            interior, ring = _ball_masks(X, Y, self.r)
            self._masks = dict(X=X, Y=Y, interior=interior, ring=ring)
        return self._masks

    @property
    def XY(self):
        m = self._build()
        return m["X"], m["Y"]

    @property
    def rho(self):
        X, Y = self.XY
        return np.hypot(X, Y)

    @property
    def interior(self):
        return self._build()["interior"]

    @property
    def ring(self):
        return self._build()["ring"]

    @property
    def support(self):
        m = self._build()
        return m["interior"] | m["ring"]

    def copy(self, values=None):
        return BallField2D(self.r, self.h, self.values.copy() if values is None else values)

    def _successor(self, values):
        # same grid, values already validated by the caller; shares the masks
        out = object.__new__(BallField2D)
        out.r, out.h, out.values, out._masks = self.r, self.h, values, self._build()
        return out


def _ball_masks(X, Y, r):
    interior = X**2 + Y**2 < r * r
    grown = interior.copy()
    grown[1:, :] |= interior[:-1, :]
    grown[:-1, :] |= interior[1:, :]
    g2 = grown.copy()
    g2[:, 1:] |= grown[:, :-1]
    g2[:, :-1] |= grown[:, 1:]
    ring = g2 & ~interior
    if interior[0, :].any() or interior[-1, :].any() or interior[:, 0].any() or interior[:, -1].any():
        raise DomainError("interior touches the grid edge")
    return interior, ring


# --------------------------------------------------------------------------
# finite differences


def radial_derivatives(values, h):
    """First and second radial derivatives of an even radial profile.

    Central differences inside, the even reflection u(-h) = u(h) at the pole
    and second-order one-sided stencils at the outer node.
    """
    u = np.asarray(values, dtype=float)
    up = np.empty_like(u)
    upp = np.empty_like(u)
    up[1:-1] = (u[2:] - u[:-2]) / (2 * h)
    upp[1:-1] = (u[2:] - 2 * u[1:-1] + u[:-2]) / h**2
    up[0] = 0.0
    upp[0] = 2 * (u[1] - u[0]) / h**2
    up[-1] = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * h)
    upp[-1] = (2 * u[-1] - 5 * u[-2] + 4 * u[-3] - u[-4]) / h**2
    return up, upp


def _d1(u, h, axis):
    u = np.moveaxis(u, axis, 0)
    d = np.empty_like(u)
    d[1:-1] = (u[2:] - u[:-2]) / (2 * h)
    d[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h)
    d[-1] = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * h)
    return np.moveaxis(d, 0, axis)


def _d2(u, h, axis):
    u = np.moveaxis(u, axis, 0)
    d = np.empty_like(u)
    d[1:-1] = (u[2:] - 2 * u[1:-1] + u[:-2]) / h**2
    d[0] = (2 * u[0] - 5 * u[1] + 4 * u[2] - u[3]) / h**2
    d[-1] = (2 * u[-1] - 5 * u[-2] + 4 * u[-3] - u[-4]) / h**2
    return np.moveaxis(d, 0, axis)


def grid_derivatives(values, h):
    """Gradient and Hessian of a 2-D grid function, second order everywhere."""
    ux = _d1(values, h, 0)
    uy = _d1(values, h, 1)
    uxx = _d2(values, h, 0)
    uyy = _d2(values, h, 1)
    uxy = _d1(uy, h, 0)
    grad = np.stack([ux, uy], axis=-1)
    hess = np.stack([np.stack([uxx, uxy], -1), np.stack([uxy, uyy], -1)], -2)
    return grad, hess


def _ball_hessian(f):
    """Nine-point Hessian of a ball field at its interior points (flattened)."""
    u = f.values
    h = f.h
    I, J = np.nonzero(f.interior)
    c = u[I, J]
    uxx = (u[I + 1, J] - 2 * c + u[I - 1, J]) / h**2
    uyy = (u[I, J + 1] - 2 * c + u[I, J - 1]) / h**2
    uxy = (u[I + 1, J + 1] - u[I + 1, J - 1] - u[I - 1, J + 1] + u[I - 1, J - 1]) / (4 * h * h)
    ux = (u[I + 1, J] - u[I - 1, J]) / (2 * h)
    uy = (u[I, J + 1] - u[I, J - 1]) / (2 * h)
    hess = np.stack([np.stack([uxx, uxy], -1), np.stack([uxy, uyy], -1)], -2)
    return (I, J), np.stack([ux, uy], -1), hess


# --------------------------------------------------------------------------
# small symmetric eigenproblems


def jacobi_eigvalsh(m, tol=JACOBI_TOL, max_sweeps=60):
    """Eigenvalues of symmetric matrices ``(..., n, n)`` by cyclic Jacobi, sorted descending."""
    a = np.array(m, dtype=float, copy=True)
    n = a.shape[-1]
    if n == 1:
        return a[..., 0, :]
    iu = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(a[..., iu[0], iu[1]] ** 2, axis=-1))
        scale = np.sqrt(np.sum(a**2, axis=(-2, -1)))
        if np.all(off <= tol * np.maximum(scale, 1e-300)):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[..., p, q]
                nz = apq != 0.0
                theta = np.where(nz, (a[..., q, q] - a[..., p, p]) / (2.0 * np.where(nz, apq, 1.0)), 0.0)
                t = np.where(nz, np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0)), 0.0)
                t = np.where(nz & (theta == 0.0), 1.0, t)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cp = a[..., :, p].copy()
                cq = a[..., :, q].copy()
                a[..., :, p] = c[..., None] * cp - s[..., None] * cq
                a[..., :, q] = s[..., None] * cp + c[..., None] * cq
                rp = a[..., p, :].copy()
                rq = a[..., q, :].copy()
                a[..., p, :] = c[..., None] * rp - s[..., None] * rq
                a[..., q, :] = s[..., None] * rp + c[..., None] * rq
    lam = np.diagonal(a, axis1=-2, axis2=-1)
    return -np.sort(-lam, axis=-1)


# --------------------------------------------------------------------------
# primal curvature


@dataclass
class CurvatureData:
    grad: np.ndarray
    w: np.ndarray
    curv_matrix: np.ndarray
    kappa: np.ndarray
    support: np.ndarray
    tilt: np.ndarray


def radial_curvature_closed_form(u, up, upp, r, n):
    """Principal curvatures of a radial graph: returns (kappa_rad, kappa_ang, w, s).

    kappa_ang has multiplicity n-1 and takes its umbilic limit u''(0)/w^3 at r = 0.
    """
    u, up, upp, r = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (u, up, upp, r)))
    if np.any(np.abs(up) >= 1):
        idx = np.argmax(np.abs(up))
        raise SpacelikeError("|u'| >= 1: graph is not spacelike", point=np.unravel_index(idx, up.shape))
    w = np.sqrt(1 - up * up)
    k_rad = upp / w**3
    with np.errstate(divide="ignore", invalid="ignore"):
        k_ang = np.where(r > 0, up / (np.where(r > 0, r, 1.0) * w), k_rad)
    s = (u - r * up) / w
    out = (k_rad, k_ang, w, s)
    if np.ndim(u) == 0:
        return tuple(float(x) for x in out)
    return out


def _guard(gradsq, where):
    bad = gradsq > 1 - EPS_GUARD
    if np.any(bad):
        idx = np.unravel_index(np.argmax(np.where(bad, gradsq, -np.inf)), gradsq.shape)
        raise SpacelikeError(f"|Du|^2 = {gradsq[idx]:.12g} exceeds 1 - {EPS_GUARD:g}", point=where(idx))


def primal_curvature(u, p):
    """Curvature package of a primal graph (``RadialField`` or ``GridField2D``).

    For radial fields the n-dimensional curvature matrix is diagonal with one
    radial and n-1 angular entries; for grid fields n must be 2.
    """
    if isinstance(u, RadialField):
        r = u.r
        up, upp = radial_derivatives(u.values, u.h)
        _guard(up * up, lambda idx: float(r[idx]))
        k_rad, k_ang, w, s = radial_curvature_closed_form(u.values, up, upp, r, p.n)
        diag = np.concatenate([k_rad[:, None], np.repeat(k_ang[:, None], p.n - 1, axis=1)], axis=1)
        mat = np.zeros((r.size, p.n, p.n))
        mat[:, np.arange(p.n), np.arange(p.n)] = diag
        kappa = -np.sort(-diag, axis=1)
        return CurvatureData(up, w, mat, kappa, s, 1 / w)
    if isinstance(u, GridField2D):
        if p.n != 2:
            raise DomainError("grid fields are two-dimensional; use n = 2")
        X, Y = u.XY
        grad, hess = grid_derivatives(u.values, u.h)
        gs = np.sum(grad**2, axis=-1)
        _guard(gs, lambda idx: (float(X[idx]), float(Y[idx])))
        w = np.sqrt(1 - gs)
        gam = np.eye(2) + grad[..., :, None] * grad[..., None, :] / (w * (1 + w))[..., None, None]
        mat = gam @ hess @ gam / w[..., None, None]
        mat = 0.5 * (mat + np.swapaxes(mat, -1, -2))
        kappa = jacobi_eigvalsh(mat)
        s = (u.values - X * grad[..., 0] - Y * grad[..., 1]) / w
        return CurvatureData(grad, w, mat, kappa, s, 1 / w)
    raise TypeError(f"unsupported primal field {type(u).__name__}")


# --------------------------------------------------------------------------
# dual curvature


@dataclass
class DualCurvature:
    """Dual matrix w* gamma* D^2u* gamma* and its eigenvalues (curvature radii).

    ``positive`` flags the points where the matrix is positive definite.
    Radial fields report all nodes; ball fields report interior points with
    NaN elsewhere.
    """

    matrix: np.ndarray
    lam: np.ndarray
    wstar: np.ndarray
    positive: np.ndarray


def wstar_of(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho >= 1):
        raise DomainError("|xi| must be < 1")
    return np.sqrt(1 - rho * rho)


def dual_curvature_matrix(ustar, p):
    """Curvature-radius matrix of a dual potential (``RadialField`` or ``BallField2D``)."""
    if isinstance(ustar, RadialField):
        rho = ustar.r
        ws = wstar_of(rho)
        up, upp = radial_derivatives(ustar.values, ustar.h)
        l_rad = ws**3 * upp
        with np.errstate(divide="ignore", invalid="ignore"):
            l_ang = np.where(rho > 0, ws * up / np.where(rho > 0, rho, 1.0), upp)
        diag = np.concatenate([l_rad[:, None], np.repeat(l_ang[:, None], p.n - 1, axis=1)], axis=1)
        mat = np.zeros((rho.size, p.n, p.n))
        mat[:, np.arange(p.n), np.arange(p.n)] = diag
        lam = -np.sort(-diag, axis=1)
        return DualCurvature(mat, lam, ws, lam[:, -1] > 0)
    if isinstance(ustar, BallField2D):
        if p.n != 2:
            raise DomainError("ball fields are two-dimensional; use n = 2")
        X, Y = ustar.XY
        (I, J), _, hess = _ball_hessian(ustar)
        xi = np.stack([X[I, J], Y[I, J]], -1)
        ws = wstar_of(np.hypot(xi[:, 0], xi[:, 1]))
        gam = np.eye(2) - xi[:, :, None] * xi[:, None, :] / (1 + ws)[:, None, None]
        m = ws[:, None, None] * (gam @ hess @ gam)
        m = 0.5 * (m + np.swapaxes(m, -1, -2))
        lam = jacobi_eigvalsh(m)
        shape = ustar.values.shape
        mat_full = np.full(shape + (2, 2), np.nan)
        lam_full = np.full(shape + (2,), np.nan)
        ws_full = np.full(shape, np.nan)
        pos = np.zeros(shape, dtype=bool)
        mat_full[I, J] = m
        lam_full[I, J] = lam
        ws_full[I, J] = ws
        pos[I, J] = lam[:, -1] > 0
        return DualCurvature(mat_full, lam_full, ws_full, pos)
    raise TypeError(f"unsupported dual field {type(ustar).__name__}")


def klein_scalars(ustar):
    """Dual height u*/w* and the hyperboloid coordinate x_{n+1} = 1/w* on the field's points."""
    if isinstance(ustar, RadialField):
        ws = wstar_of(ustar.r)
        return ustar.values / ws, 1 / ws
    if isinstance(ustar, BallField2D):
        rho = np.where(ustar.support, ustar.rho, 0.0)
        ws = wstar_of(rho)
        v = np.where(ustar.support, ustar.values / ws, np.nan)
        x = np.where(ustar.support, 1 / ws, np.nan)
        return v, x
    rho = np.asarray(ustar, dtype=float)
    return None, 1 / wstar_of(rho)


# --------------------------------------------------------------------------
# Condition A


@dataclass
class ConditionAReport:
    spacelike: bool
    strictly_convex: bool
    asymptotic_phi: float
    c0: float
    big_c: float
    declared_c: float
    holds: bool
    notes: list = field(default_factory=list)


def condition_a_check(u0, p, declared_c=1.0):
    """Measure the Condition-A quantities of a primal initial graph."""
    notes = []
    if isinstance(u0, RadialField):
        radius = u0.r
        vals = u0.values
        outer = radius >= 0.95 * u0.rmax
    else:
        X, Y = u0.XY
        radius = np.hypot(X, Y)
        vals = u0.values
        outer = (radius >= 0.95 * u0.L) & (radius <= u0.L)
    phi = float(np.mean(vals[outer] - radius[outer]))
    try:
        cd = primal_curvature(u0, p)
    except SpacelikeError as exc:
        notes.append(str(exc))
        return ConditionAReport(False, False, phi, float("nan"), float("nan"), declared_c, False, notes)
    strictly_convex = bool(np.all(cd.kappa > CONVEX_TOL))
    if not strictly_convex:
        notes.append(f"min principal curvature {cd.kappa.min():.3e} <= {CONVEX_TOL:g}")
    sk = sigma(p.k, cd.kappa)
    if np.all(sk > 0):
        Fa = speed_F_alpha(p, cd.kappa)
        c0 = float(np.min(Fa))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(cd.support > 0, Fa / cd.support, np.inf)
        big_c = float(np.max(ratio))
    else:
        notes.append(f"sigma_{p.k} <= 0 somewhere: outside the Gamma_k cone")
        c0, big_c = float("nan"), float("nan")
    holds = strictly_convex and phi > 0 and c0 > 0 and big_c < declared_c
    return ConditionAReport(True, strictly_convex, phi, c0, big_c, declared_c, bool(holds), notes)


def require_convex_dual(dc, where=None):
    """Raise ``ConvexityError`` at the first non-positive-definite point of ``dc``."""
    bad = ~dc.positive
    if where is not None:
        bad &= where
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ConvexityError("dual matrix lost positive definiteness", point=idx)
