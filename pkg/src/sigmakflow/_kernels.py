"""Compiled per-step kernels for the explicit flow solvers.

Each kernel evaluates, at the unknown nodes of a field, the speed and the
largest eigenvalue of the linearised diffusion coefficient (for the CFL
bound). Radial kernels exploit that the curvature matrix has one radial and
n-1 equal angular eigenvalues; the ball kernel is specialised to n = 2.
The generic numpy path in ``geometry``/``symfunc`` is the reference these
are tested against.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _binom(m, j):
    if j < 0 or j > m:
        return 0.0
    out = 1.0
    for i in range(j):
        out = out * (m - i) / (i + 1)
    return out


@njit(cache=True)
def _sig_rad(a, q, n, j):
    # sigma_j of (a, q, ..., q) with n-1 copies of q
    if j == 0:
        return 1.0
    return a * _binom(n - 1, j - 1) * q ** (j - 1) + _binom(n - 1, j) * q**j


@njit(cache=True)
def _sig_rad_drop_ang(a, q, n, j):
    # sigma_j of (a, q, ..., q) with n-2 copies of q
    if j == 0:
        return 1.0
    if j < 0:
        return 0.0
    return a * _binom(n - 2, j - 1) * q ** (j - 1) + _binom(n - 2, j) * q**j


@njit(cache=True)
def _sig_q(q, m, j):
    # sigma_j of m copies of q
    if j < 0:
        return 0.0
    return _binom(m, j) * q**j


@njit(cache=True)
def primal_radial(u, h, n, k, alpha):
    """Phi = sigma_k^(alpha/k), w, min curvature, diffusion and |u'|^2 at nodes 0..N-1."""
    N = u.size - 1
    phi = np.empty(N)
    w = np.empty(N)
    kmin = np.empty(N)
    diff = np.empty(N)
    grad2 = np.empty(N)
    beta = alpha / k
    for i in range(N):
        if i == 0:
            up = 0.0
            upp = 2.0 * (u[1] - u[0]) / (h * h)
        else:
            up = (u[i + 1] - u[i - 1]) / (2.0 * h)
            upp = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h)
        g2 = up * up
        grad2[i] = g2
        if g2 >= 1.0:
            phi[i] = np.nan
            w[i] = 0.0
            kmin[i] = np.nan
            diff[i] = np.inf
            continue
        wi = np.sqrt(1.0 - g2)
        ka = upp / (wi * wi * wi)
        if i == 0:
            q = ka
        else:
            q = up / (i * h * wi)
        sk = _sig_rad(ka, q, n, k)
        w[i] = wi
        kmin[i] = min(ka, q)
        if sk <= 0.0:
            phi[i] = np.nan
            diff[i] = np.inf
            continue
        ph = sk**beta
        phi[i] = ph
        c = beta * sk ** (beta - 1.0)
        d_rad = c * _sig_q(q, n - 1, k - 1)
        d_ang = c * _sig_rad_drop_ang(ka, q, n, k - 1)
        diff[i] = max(d_rad, d_ang) / (wi * wi)
    return phi, w, kmin, diff, grad2


@njit(cache=True)
def dual_radial(u, h, n, k, alpha):
    """F_*^(-alpha), w*, min curvature radius and diffusion at nodes 0..N-1."""
    N = u.size - 1
    fneg = np.empty(N)
    ws = np.empty(N)
    lmin = np.empty(N)
    diff = np.empty(N)
    for i in range(N):
        rho = i * h
        wi = np.sqrt(1.0 - rho * rho)
        ws[i] = wi
        if i == 0:
            upp = 2.0 * (u[1] - u[0]) / (h * h)
            la = upp
            q = upp
        else:
            up = (u[i + 1] - u[i - 1]) / (2.0 * h)
            upp = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h)
            la = wi * wi * wi * upp
            q = wi * up / rho
        lmin[i] = min(la, q)
        if la <= 0.0 or q <= 0.0:
            fneg[i] = np.nan
            diff[i] = np.inf
            continue
        sn = la * q ** (n - 1)
        snk = _sig_rad(la, q, n, n - k)
        fs = (sn / snk) ** (1.0 / k)
        fn = 1.0 / fs if alpha == 1.0 else fs ** (-alpha)
        fneg[i] = fn
        # d F_* / d lambda for the radial and one angular eigenvalue
        d_rad = fs / k * (_sig_q(q, n - 1, n - 1) / sn - _sig_q(q, n - 1, n - k - 1) / snk)
        d_ang = fs / k * (_sig_rad_drop_ang(la, q, n, n - 1) / sn - _sig_rad_drop_ang(la, q, n, n - k - 1) / snk)
        coef = alpha * fn / fs * wi * wi
        diff[i] = coef * max(d_rad * wi * wi, d_ang)
    return fneg, ws, lmin, diff


@njit(cache=True)
def dual_ball(u, I, J, x, y, ws, h, k, alpha):
    """F_*^(-alpha), min curvature radius and diffusion at the interior points of a 2-D ball."""
    m = I.size
    fneg = np.empty(m)
    lmin = np.empty(m)
    diff = np.empty(m)
    h2 = h * h
    for p in range(m):
        i = I[p]
        j = J[p]
        c = u[i, j]
        uxx = (u[i + 1, j] - 2.0 * c + u[i - 1, j]) / h2
        uyy = (u[i, j + 1] - 2.0 * c + u[i, j - 1]) / h2
        uxy = (u[i + 1, j + 1] - u[i + 1, j - 1] - u[i - 1, j + 1] + u[i - 1, j - 1]) / (4.0 * h2)
        xi = x[p]
        yi = y[p]
        wi = ws[p]
        g = 1.0 / (1.0 + wi)
        g11 = 1.0 - xi * xi * g
        g12 = -xi * yi * g
        g22 = 1.0 - yi * yi * g
        a11 = g11 * uxx + g12 * uxy
        a12 = g11 * uxy + g12 * uyy
        a21 = g12 * uxx + g22 * uxy
        a22 = g12 * uxy + g22 * uyy
        m11 = wi * (a11 * g11 + a12 * g12)
        m12 = wi * (a11 * g12 + a12 * g22)
        m22 = wi * (a21 * g12 + a22 * g22)
        half = 0.5 * (m11 + m22)
        rad = np.sqrt(0.25 * (m11 - m22) ** 2 + m12 * m12)
        l1 = half + rad
        l2 = half - rad
        lmin[p] = l2
        if l2 <= 0.0:
            fneg[p] = np.nan
            diff[p] = np.inf
            continue
        if k == 1:
            s = l1 + l2
            fs = l1 * l2 / s
            d = max(l1 * l1, l2 * l2) / (s * s)
        else:
            fs = np.sqrt(l1 * l2)
            d = 0.5 * np.sqrt(l1 / l2)
        fn = 1.0 / fs if alpha == 1.0 else fs ** (-alpha)
        fneg[p] = fn
        diff[p] = alpha * fn / fs * wi * wi * d
    return fneg, lmin, diff
