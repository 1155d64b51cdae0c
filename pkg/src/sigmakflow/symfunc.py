"""Elementary symmetric functions of principal curvatures and the flow speeds.

All functions accept a single curvature vector of shape ``(n,)`` or a batch of
shape ``(..., n)``; the reduction is always over the last axis.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ConeError, DomainError


@dataclass(frozen=True)
class SpeedParams:
    """Dimension ``n``, order ``k`` and exponent ``alpha`` of the speed sigma_k^(alpha/k)."""

    n: int
    k: int
    alpha: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n}")
        if int(self.k) != self.k or not 1 <= self.k <= self.n:
            raise DomainError(f"k must be an integer in [1, n], got k={self.k}, n={self.n}")
        if not self.alpha >= 1.0:
            raise DomainError(f"alpha must be >= 1, got {self.alpha}")

    @property
    def binom(self):
        """C(n, k), the value of sigma_k on the unit vector (1, ..., 1)."""
        return comb(self.n, self.k)


def _as_kappa(kappa):
    kappa = np.asarray(kappa, dtype=float)
    if kappa.ndim == 0:
        raise DomainError("curvature vector must have at least one axis")
    return kappa


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


def _elementary(kappa, kmax):
    """Return [sigma_0, ..., sigma_kmax] of ``kappa`` by the product-expansion recurrence.

    Expands prod_i (1 + kappa_i t) one factor at a time; O(n * kmax).
    """
    n = kappa.shape[-1]
    e = [np.ones(kappa.shape[:-1])] + [np.zeros(kappa.shape[:-1]) for _ in range(kmax)]
    for i in range(n):
        x = kappa[..., i]
        for j in range(min(i + 1, kmax), 0, -1):
            e[j] = e[j] + x * e[j - 1]
    return e


def sigma(k, kappa):
    """Elementary symmetric polynomial sigma_k(kappa), with sigma_0 = 1."""
    kappa = _as_kappa(kappa)
    n = kappa.shape[-1]
    if int(k) != k or k < 0 or k > n:
        raise DomainError(f"sigma_k needs 0 <= k <= n, got k={k}, n={n}")
    return _unwrap(_elementary(kappa, int(k))[int(k)])


def sigma_partials(k, kappa):
    """All partial derivatives d sigma_k / d kappa_i = sigma_{k-1}(kappa | i).

    Returns an array with the shape of ``kappa`` (0-based along the last axis).
    """
    kappa = _as_kappa(kappa)
    n = kappa.shape[-1]
    if int(k) != k or k < 0 or k > n:
        raise DomainError(f"sigma_k needs 0 <= k <= n, got k={k}, n={n}")
    out = np.empty_like(kappa)
    if k == 0:
        out[...] = 0.0
        return out
    for i in range(n):
        rest = np.delete(kappa, i, axis=-1)
        out[..., i] = _elementary(rest, int(k) - 1)[int(k) - 1]
    return out


def sigma_partial(k, kappa, i):
    """sigma_{k-1} of ``kappa`` with the ``i``-th entry removed (``i`` is 1-based)."""
    kappa = _as_kappa(kappa)
    n = kappa.shape[-1]
    if int(i) != i or not 1 <= i <= n:
        raise DomainError(f"index must satisfy 1 <= i <= {n}, got {i}")
    return _unwrap(sigma_partials(k, kappa)[..., int(i) - 1])


def speed_F_alpha(p, kappa):
    """Primal speed F^alpha = sigma_k(kappa)^(alpha/k)."""
    sk = np.asarray(sigma(p.k, kappa))
    if np.any(~(sk > 0)):
        raise ConeError(f"sigma_{p.k} <= 0: curvature left the Gamma_{p.k} cone")
    return _unwrap(sk ** (p.alpha / p.k))


def speed_F_alpha_partials(p, kappa):
    """d F^alpha / d kappa_i = (alpha/k) sigma_k^(alpha/k - 1) sigma_{k-1}(kappa | i)."""
    kappa = _as_kappa(kappa)
    sk = np.asarray(sigma(p.k, kappa))
    if np.any(~(sk > 0)):
        raise ConeError(f"sigma_{p.k} <= 0: curvature left the Gamma_{p.k} cone")
    coef = (p.alpha / p.k) * sk ** (p.alpha / p.k - 1.0)
    return np.asarray(coef)[..., None] * sigma_partials(p.k, kappa)


def speed_F_star(p, lam):
    """Dual speed F_* = (sigma_n / sigma_{n-k})^(1/k) of the curvature radii ``lam``."""
    lam = _as_kappa(lam)
    if np.any(~(lam > 0)):
        raise ConeError("dual speed needs every curvature radius > 0")
    n = lam.shape[-1]
    e = _elementary(lam, n)
    return _unwrap((e[n] / e[n - p.k]) ** (1.0 / p.k))


def speed_F_star_partials(p, lam):
    """d F_* / d lambda_i, for the explicit-scheme diffusion coefficient."""
    lam = _as_kappa(lam)
    n = lam.shape[-1]
    fs = np.asarray(speed_F_star(p, lam))
    e = _elementary(lam, n)
    dn = sigma_partials(n, lam)
    dnk = sigma_partials(n - p.k, lam)
    dlog = dn / e[n][..., None] - dnk / e[n - p.k][..., None]
    return (fs / p.k)[..., None] * dlog


def cone_check(p, kappa, strict=False):
    """True where sigma_j(kappa) > 0 for j = 1..k (and, if ``strict``, every kappa_i > 0)."""
    kappa = _as_kappa(kappa)
    e = _elementary(kappa, p.k)
    ok = np.ones(kappa.shape[:-1], dtype=bool)
    for j in range(1, p.k + 1):
        ok &= e[j] > 0
    if strict:
        ok &= np.all(kappa > 0, axis=-1)
    return bool(ok) if ok.ndim == 0 else ok
