"""Laguerre polynomials, normalized Laguerre functions, and the radial
projection kernel.

The twisted-Laplacian projection onto the eigenvalue mu = 2k + d acts by
twisted convolution with the radial kernel

    varsigma_k(z) = L_k^{d-1}(|z|^2 / 2) exp(-|z|^2 / 4),

so everything here is about evaluating L_k^alpha and its L^2(0, inf)
normalization

    NL_k^alpha(t) = (k! / Gamma(k + alpha + 1))^{1/2} t^{alpha/2} e^{-t/2} L_k^alpha(t)

stably up to large k, together with the classical cosine asymptotic
(with its error envelope) that describes the oscillatory range
0 < t < nu = 4k + 2*alpha + 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .config import DEFAULT_CONFIG

K_MAX = DEFAULT_CONFIG.k_max


class LaguerreRangeError(ValueError):
    """Raised when an evaluation would overflow or an index is out of range."""


@dataclass(frozen=True)
class LaguerreIndex:
    k: int
    alpha: float = 0.0

    def __post_init__(self):
        if self.k < 0 or self.k > K_MAX:
            raise LaguerreRangeError(f"k={self.k} outside [0, {K_MAX}]")
        if self.alpha < 0:
            raise LaguerreRangeError("alpha must be >= 0")


@dataclass(frozen=True)
class SpectralIndex:
    """Dimension d and Laguerre index k of the eigenvalue mu = 2k + d."""

    d: int
    k: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.k < 0 or self.k > K_MAX:
            raise LaguerreRangeError(f"k={self.k} outside [0, {K_MAX}]")

    @property
    def mu(self) -> int:
        return 2 * self.k + self.d

    @property
    def alpha(self) -> int:
        return self.d - 1


def laguerre_poly(idx: LaguerreIndex, t):
    """L_k^alpha(t) by the three-term recurrence, vectorized over t.

    Values can overflow double precision for extreme (k, t); that is
    signaled rather than returned as inf.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    k, a = idx.k, idx.alpha
    p_prev = np.ones_like(t)
    if k == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = 1.0 + a - t
    for j in range(1, k):
        p, p_prev = ((2 * j + 1 + a - t) * p - (j + a) * p_prev) / (j + 1), p
    if not np.all(np.isfinite(p)):
        raise LaguerreRangeError(f"L_{k}^{a} overflowed for the given t range")
    return p if p.ndim else float(p)


def laguerre_poly_sum(idx: LaguerreIndex, t):
    """Direct evaluation of the defining sum; reference oracle for small k.

    sum_{j=0}^{k} C(k + alpha, k - j) (-t)^j / j!
    """
    t = np.asarray(t, dtype=float)
    k, a = idx.k, idx.alpha
    total = np.zeros_like(t)
    for j in range(k + 1):
        # C(k + a, k - j) via log-gamma, exact enough for oracle use
        logc = gammaln(k + a + 1) - gammaln(k - j + 1) - gammaln(a + j + 1)
        total = total + math.exp(logc) * (-t) ** j / math.factorial(j)
    return total if total.ndim else float(total)


def normalized_laguerre(idx: LaguerreIndex, t):
    """L^2(0, inf)-normalized Laguerre function NL_k^alpha(t).

    Uses the recurrence directly on the normalized functions,

      NL_{k+1} = ((2k + alpha + 1 - t) NL_k - sqrt(k(k + alpha)) NL_{k-1})
                 / sqrt((k+1)(k+1+alpha)),

    which keeps every intermediate bounded (the unnormalized recurrence
    overflows near k ~ 150 in the oscillatory range).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    k, a = idx.k, idx.alpha
    # NL_0 = t^{a/2} e^{-t/2} / sqrt(Gamma(a+1)), evaluated in log form
    with np.errstate(divide="ignore"):
        log0 = np.where(t > 0, 0.5 * a * np.log(np.where(t > 0, t, 1.0)), 0.0)
    f_prev = np.exp(log0 - 0.5 * t - 0.5 * gammaln(a + 1))
    if a > 0:
        f_prev = np.where(t > 0, f_prev, 0.0)
    if k == 0:
        return f_prev if f_prev.ndim else float(f_prev)
    f = (a + 1 - t) * f_prev / math.sqrt(a + 1)
    for j in range(1, k):
        f, f_prev = (
            ((2 * j + a + 1 - t) * f - math.sqrt(j * (j + a)) * f_prev)
            / math.sqrt((j + 1) * (j + 1 + a)),
            f,
        )
    return f if f.ndim else float(f)


@dataclass(frozen=True)
class AsymptoticEval:
    """Leading cosine term and error envelope in the oscillatory range."""

    main: object
    error_envelope: object
    nu: float
    theta: object
    in_validated_window: bool


#: validated window for the cosine asymptotic, as fractions of nu
ASYMPTOTIC_WINDOW = (1.0 / 64.0, 1.0 / 2.0)


def laguerre_asymptotic(idx: LaguerreIndex, t) -> AsymptoticEval:
    """Cosine asymptotic for NL_k^alpha(t) in the oscillatory range.

    With nu = 4k + 2*alpha + 2 and theta = arccos(sqrt(t/nu)),

      main = sqrt(2/pi) (-1)^k (t(nu-t))^{-1/4}
             cos((nu(2 theta - sin 2 theta) - pi) / 4),

    and the error envelope (unit constant) is
    nu^{1/4}(nu-t)^{-7/4} + (nu t)^{-3/4}.  The formula is validated on
    t in [nu/64, nu/2], far from the turning point t = nu where the
    envelope blows up; outside that window the value is returned with
    in_validated_window = False.
    """
    if idx.k < 1:
        raise LaguerreRangeError("the asymptotic needs k >= 1")
    t = np.asarray(t, dtype=float)
    nu = 4.0 * idx.k + 2.0 * idx.alpha + 2.0
    if np.any(t <= 0) or np.any(t >= nu):
        raise ValueError(f"t must lie strictly inside (0, nu) with nu={nu}")
    theta = np.arccos(np.sqrt(t / nu))
    phase = (nu * (2 * theta - np.sin(2 * theta)) - math.pi) / 4.0
    main = (
        math.sqrt(2.0 / math.pi)
        * (-1.0) ** idx.k
        * (t * (nu - t)) ** -0.25
        * np.cos(phase)
    )
    envelope = nu**0.25 * (nu - t) ** -1.75 + (nu * t) ** -0.75
    lo, hi = ASYMPTOTIC_WINDOW
    inside = bool(np.all((t >= lo * nu) & (t <= hi * nu)))
    if main.ndim == 0:
        main, envelope, theta = float(main), float(envelope), float(theta)
    return AsymptoticEval(main, envelope, nu, theta, inside)


# ---------------------------------------------------------------------------
# projection kernel
# ---------------------------------------------------------------------------

def kernel_varsigma(s: SpectralIndex, r, route: str = "auto"):
    """Radial profile of the projection kernel at radius r = |z|.

    Two algebraically equal routes are exposed:

      * "poly": L_k^{d-1}(r^2/2) e^{-r^2/4}, evaluated by running the
        polynomial recurrence on the damped values directly;
      * "normalized": 2^{(d-1)/2} sqrt((k+d-1)!/k!) r^{-(d-1)} NL_k^{d-1}(r^2/2),
        the rewriting through the normalized Laguerre function (the
        r = 0 limit is filled in exactly); the 2^{(d-1)/2} comes from
        t^{alpha/2} = (r^2/2)^{alpha/2}.

    "auto" uses the damped-polynomial route, which is bounded for every
    (k, r) of interest.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be >= 0")
    u = 0.5 * r * r
    a = s.alpha
    if route in ("auto", "poly"):
        # damped recurrence: same coefficients as L_k^a, applied to
        # p_j = L_j^a(u) e^{-u/2}; growth stays polynomial in k
        p_prev = np.exp(-0.5 * u)
        if s.k == 0:
            out = p_prev
        else:
            p = (1.0 + a - u) * p_prev
            for j in range(1, s.k):
                p, p_prev = ((2 * j + 1 + a - u) * p - (j + a) * p_prev) / (j + 1), p
            out = p
        if not np.all(np.isfinite(out)):
            raise LaguerreRangeError("kernel evaluation overflowed")
        return out if out.ndim else float(out)
    if route == "normalized":
        scale = 2.0 ** (0.5 * a) * math.exp(0.5 * (gammaln(s.k + s.d) - gammaln(s.k + 1)))
        nl = normalized_laguerre(LaguerreIndex(s.k, a), u)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r > 0, scale * r ** (-float(a)) * np.where(r > 0, nl, 0.0), 0.0)
        at_zero = math.exp(gammaln(s.k + s.d) - gammaln(s.k + 1) - gammaln(s.d))
        out = np.where(r == 0, at_zero, out)
        return out if out.ndim else float(out)
    raise ValueError(f"unknown route {route!r}")


def kernel_weighted_sum(d: int, weights, r):
    """sum_k w_k varsigma_k(r) in one recurrence sweep, vectorized over r.

    `weights` maps the Laguerre index k to a (complex) weight; indices up
    to max(weights) are visited once, so multiplier operators built from
    many eigenvalues cost one pass.
    """
    r = np.asarray(r, dtype=float)
    u = 0.5 * r * r
    a = d - 1
    k_top = max(weights)
    if k_top > K_MAX:
        raise LaguerreRangeError(f"k={k_top} outside [0, {K_MAX}]")
    acc = np.zeros(u.shape, dtype=complex)
    p_prev = np.exp(-0.5 * u)
    if 0 in weights:
        acc = acc + weights[0] * p_prev
    if k_top == 0:
        return acc
    p = (1.0 + a - u) * p_prev
    if 1 in weights:
        acc = acc + weights[1] * p
    for j in range(1, k_top):
        p, p_prev = ((2 * j + 1 + a - u) * p - (j + a) * p_prev) / (j + 1), p
        w = weights.get(j + 1)
        if w is not None:
            acc = acc + w * p
    return acc


def kernel_sup(s: SpectralIndex, n_scan: int = 20001):
    """sup_r |varsigma_k(r)| by scan; returns (sup, argmax_r).

    The scan covers the oscillatory range and a margin beyond the
    turning point r = 2 sqrt(mu - ...); past it the kernel decays
    exponentially.
    """
    r_max = 2.0 * math.sqrt(s.mu) + 6.0
    r = np.linspace(0.0, r_max, n_scan)
    vals = np.abs(kernel_varsigma(s, r))
    i = int(np.argmax(vals))
    return float(vals[i]), float(r[i])


def kernel_l2_norm(s: SpectralIndex) -> float:
    """Closed form of the L^2(R^{2d}) norm of the projection kernel.

    ||varsigma_k||_2 = [omega_{2d-1} 2^{d-1} Gamma(k+d)/k!]^{1/2} with
    omega_{2d-1} = 2 pi^d / Gamma(d) the unit-sphere area in R^{2d};
    follows from Laguerre orthogonality after u = r^2/2.
    """
    d, k = s.d, s.k
    omega = 2.0 * math.pi**d / math.gamma(d)
    return math.sqrt(omega * 2.0 ** (d - 1) * math.exp(gammaln(k + d) - gammaln(k + 1)))


def kernel_l2_norm_quadrature(s: SpectralIndex, n: int = 200001) -> float:
    """Radial quadrature cross-check of kernel_l2_norm."""
    r_max = 2.0 * math.sqrt(s.mu) + 12.0
    r = np.linspace(0.0, r_max, n)
    vals = np.abs(kernel_varsigma(s, r)) ** 2 * r ** (2 * s.d - 1)
    omega = 2.0 * math.pi**s.d / math.gamma(s.d)
    return math.sqrt(omega * np.trapezoid(vals, r))
