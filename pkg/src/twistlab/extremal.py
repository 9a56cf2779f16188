"""Lower-bound machinery for the projection operator norms.

The projection kernel oscillates radially with an explicit phase

    g(s) = (mu/2)(2 theta(s) - sin 2 theta(s)) - pi/4,
    theta(s) = arccos(s / (2 sqrt(mu))),

monotone decreasing in s with |g'| ~ sqrt(mu).  Picking the ~mu radii
t_j in (sqrt(mu)/8, sqrt(mu)/3) where |cos g| = 1 and keeping thin rings
D_j = [t_j, t_j + pi/(8 sqrt(mu))] of coherent kernel sign yields the
test function f = sum_j chi_{D_j}(|z|) varsigma_k(z) whose projection
piles up near the origin; the ratio ||P f||_q / ||f||_p realizes the
concentration branch of the sharp exponent.

Everything mu-sweep sized here is evaluated in radial coordinates: the
test function and the kernel are radial, so the projection integral
reduces to a (ring radius) x (sphere marginal) quadrature and large mu
costs nothing compared to cube grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, roots_legendre

from .field import Field, Grid, lp_norm
from .laguerre import SpectralIndex, kernel_l2_norm, kernel_sup, kernel_varsigma
from .region import ExponentPoint


@dataclass(frozen=True)
class RingSystem:
    mu: int
    d: int
    roots: np.ndarray          # radii with |cos g| = 1, increasing
    half_width: float          # ring width pi / (8 sqrt(mu))

    @property
    def N(self) -> int:
        return len(self.roots)

    def intervals(self) -> np.ndarray:
        return np.stack([self.roots, self.roots + self.half_width], axis=1)


def ring_theta(mu: float, s):
    return np.arccos(np.asarray(s, dtype=float) / (2.0 * math.sqrt(mu)))


def ring_g(mu: float, s):
    th = ring_theta(mu, s)
    return 0.5 * mu * (2.0 * th - np.sin(2.0 * th)) - math.pi / 4.0


def build_rings(s: SpectralIndex) -> RingSystem:
    """All radii t_j in (sqrt(mu)/8, sqrt(mu)/3) with sin g(t_j) = 0.

    g is monotone decreasing, so the roots are bracketed by consecutive
    integer levels of g/pi and found by bisection.
    """
    mu = s.mu
    if mu < 25:
        raise ValueError("the ring construction needs mu >= 25")
    lo, hi = math.sqrt(mu) / 8.0, math.sqrt(mu) / 3.0
    g_lo, g_hi = float(ring_g(mu, lo)), float(ring_g(mu, hi))
    m_start = math.ceil(g_hi / math.pi)
    m_end = math.floor(g_lo / math.pi)
    roots = []
    for m in range(m_start, m_end + 1):
        target = m * math.pi
        a, b = lo, hi  # g(a) = g_lo > target > g_hi = g(b)
        for _ in range(80):
            mid = 0.5 * (a + b)
            if float(ring_g(mu, mid)) > target:
                a = mid
            else:
                b = mid
        roots.append(0.5 * (a + b))
    roots = np.array(sorted(roots))
    if roots.size == 0:
        raise RuntimeError(f"no ring radii bracketed for mu={mu}")
    return RingSystem(mu, s.d, roots, math.pi / (8.0 * math.sqrt(mu)))


def ring_extremizer(s: SpectralIndex, grid: Grid) -> Field:
    """The ring test function sampled on a cube grid."""
    if not grid.resolves(s.mu):
        raise ValueError(f"grid step {grid.h:.4f} does not resolve mu={s.mu}")
    rings = build_rings(s)
    mesh = grid.meshgrid()
    r = np.sqrt(sum(m * m for m in mesh))
    edges = rings.intervals()
    inside = np.zeros(grid.shape, dtype=bool)
    lo = edges[:, 0]
    pos = np.searchsorted(lo, r, side="right") - 1
    valid = pos >= 0
    inside[valid] = r[valid] <= edges[pos[valid], 1]
    return Field(grid, np.where(inside, kernel_varsigma(s, r), 0.0).astype(complex))


# ---------------------------------------------------------------------------
# radial evaluation of the ring extremizer and its projection
# ---------------------------------------------------------------------------

_GL8 = roots_legendre(8)
_GL24 = roots_legendre(24)


def _sphere_area(two_d: int) -> float:
    # area of the unit sphere in R^{two_d}
    return 2.0 * math.pi ** (two_d / 2.0) / math.gamma(two_d / 2.0)


class RingProfile:
    """Radial-coordinate workhorse for the ring extremizer at one mu.

    Exposes L^p norms of the test function and pointwise values of its
    projection near the origin, all through 1-2 dimensional quadrature;
    this is what makes mu ~ 10^3 sweeps affordable.
    """

    def __init__(self, s: SpectralIndex):
        self.s = s
        self.rings = build_rings(s)
        self.mu = s.mu
        # per-ring Gauss-Legendre radii and weights
        x, w = _GL8
        ivals = self.rings.intervals()
        mid = 0.5 * (ivals[:, 0] + ivals[:, 1])
        rad = 0.5 * (ivals[:, 1] - ivals[:, 0])
        self.rho = (mid[:, None] + rad[:, None] * x[None, :]).ravel()
        self.rho_w = (rad[:, None] * w[None, :]).ravel()
        self.f_rho = kernel_varsigma(s, self.rho)
        # dense kernel table for interpolated evaluation at shifted radii
        wavelength = 2.0 * math.pi / math.sqrt(self.mu)
        r_hi = float(ivals[-1, 1]) + 1.0
        n_tab = int(r_hi / (wavelength / 256.0)) + 2
        self.tab_r = np.linspace(0.0, r_hi, n_tab)
        self.tab_v = kernel_varsigma(s, self.tab_r)

    def _kernel_at(self, r):
        return np.interp(r, self.tab_r, self.tab_v)

    def lp_norm(self, p: float) -> float:
        """||f||_p over R^{2d} by per-ring quadrature."""
        two_d = 2 * self.s.d
        if p == math.inf:
            return float(np.max(np.abs(self.f_rho)))
        vals = np.abs(self.f_rho) ** p * self.rho ** (two_d - 1)
        return float((_sphere_area(two_d) * np.sum(vals * self.rho_w)) ** (1.0 / p))

    def projection_at(self, r_out, n_angle: int = 64, n_disk: int = 24):
        """P_mu f at radius r_out from the origin (the projection of a
        radial function is radial).

        Direct polar quadrature of the twisted-convolution integral: the
        ring radius runs over the per-ring nodes, the angular factor over
        the one- or two-dimensional sphere marginal, and the kernel is
        read from the dense radial table.
        """
        r_out = np.atleast_1d(np.asarray(r_out, dtype=float))
        d = self.s.d
        rho = self.rho
        if d == 1:
            phi = (np.arange(n_angle) + 0.5) * (2.0 * math.pi / n_angle)
            cu, sv = np.cos(phi), np.sin(phi)
            ang_w = np.full(n_angle, 2.0 * math.pi / n_angle)
            marg = 1.0
        elif d == 2:
            # two coordinates of a uniform point on S^3 are uniform on the
            # unit disk with surface factor 2 pi
            xs, ws = _GL24
            ss = 0.5 * (xs + 1.0)
            sw = 0.5 * ws
            phi = (np.arange(n_disk) + 0.5) * (2.0 * math.pi / n_disk)
            cu = np.outer(ss, np.cos(phi)).ravel()
            sv = np.outer(ss, np.sin(phi)).ravel()
            ang_w = (np.outer(ss * sw, np.full(n_disk, 2.0 * math.pi / n_disk))).ravel()
            marg = 2.0 * math.pi
        else:
            raise NotImplementedError("radial projection implemented for d <= 2")
        out = np.empty(r_out.shape, dtype=complex)
        two_d = 2 * d
        radial = self.f_rho * self.rho ** (two_d - 1) * self.rho_w
        for i, r in enumerate(r_out):
            dist = np.sqrt(
                np.maximum(r * r + rho[:, None] ** 2 - 2.0 * r * rho[:, None] * cu[None, :], 0.0)
            )
            phase = np.exp(0.5j * r * rho[:, None] * sv[None, :])
            inner = (self._kernel_at(dist) * phase) @ ang_w
            out[i] = np.sum(radial * inner)
        out *= marg * (2.0 * math.pi) ** (-d)
        return out

    def origin_ball_radius(self) -> float:
        return math.pi / (32.0 * math.sqrt(self.mu))

    def projection_ball_min(self, n_r: int = 24) -> float:
        r = np.linspace(0.0, self.origin_ball_radius(), n_r)
        return float(np.min(np.abs(self.projection_at(r))))

    def projection_ball_lq(self, q: float, n_r: int = 48) -> float:
        """|| P f ||_{L^q(|z| <= pi/(32 sqrt(mu)))}, a certified lower
        portion of the global L^q norm."""
        rb = self.origin_ball_radius()
        x, w = _GL24
        r = 0.5 * rb * (x + 1.0)
        rw = 0.5 * rb * w
        vals = np.abs(self.projection_at(r))
        two_d = 2 * self.s.d
        if q == math.inf:
            return float(np.max(vals))
        integrand = vals**q * r ** (two_d - 1)
        return float((_sphere_area(two_d) * np.sum(integrand * rw)) ** (1.0 / q))


# ---------------------------------------------------------------------------
# norm reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormReport:
    mu: int
    d: int
    pr: float
    qr: float
    value: float
    method: str
    certification: str
    seed: int | None = None


def corner_norms(s: SpectralIndex) -> list:
    """Exact operator norms at the four corners of the Riesz square.

    The kernel K(z, w) = (2 pi)^{-d} varsigma_k(z - w) e^{(i/2) Im z.conj(w)}
    has modulus depending on z - w only, which gives
      2->2: 1 (orthogonal projection),
      1->inf: (2 pi)^{-d} sup |varsigma_k|,
      1->2 and 2->inf: (2 pi)^{-d} ||varsigma_k||_2
    (Cauchy-Schwarz in the output/input variable respectively).
    """
    d = s.d
    scale = (2.0 * math.pi) ** (-d)
    sup, _ = kernel_sup(s)
    l2 = kernel_l2_norm(s)
    return [
        NormReport(s.mu, d, 0.5, 0.5, 1.0, "corner_exact", "exact"),
        NormReport(s.mu, d, 1.0, 0.0, scale * sup, "corner_exact", "exact"),
        NormReport(s.mu, d, 0.5, 0.0, scale * l2, "corner_exact", "exact"),
        NormReport(s.mu, d, 1.0, 0.5, scale * l2, "corner_exact", "exact"),
    ]


def _eigenfunction_profile_norm(k: int, p: float) -> float:
    """L^p(C) norm of the lowest-free-index eigenfunction at level k,
    whose modulus is (2 pi)^{-1/2} (k!)^{-1/2} (r/sqrt(2))^k e^{-r^2/4}."""
    logc = -0.5 * math.log(2.0 * math.pi) - 0.5 * gammaln(k + 1) - 0.5 * k * math.log(2.0)
    if p == math.inf:
        # maximum at r = sqrt(2k)
        if k == 0:
            return math.exp(logc)
        return math.exp(logc + 0.5 * k * math.log(2.0 * k) - 0.5 * k)
    # 2 pi int r^{kp+1} e^{-p r^2/4} dr = 2 pi Gamma(kp/2 + 1) (4/p)^{kp/2+1} / 2
    logint = (
        math.log(math.pi)
        + gammaln(0.5 * k * p + 1.0)
        + (0.5 * k * p + 1.0) * math.log(4.0 / p)
    )
    return math.exp(logc + logint / p)


def _ratio_exponents(x: ExponentPoint):
    pr, qr = float(x.pr), float(x.qr)
    p = math.inf if pr == 0 else 1.0 / pr
    q = math.inf if qr == 0 else 1.0 / qr
    return p, q


def norm_lower_bound(
    s: SpectralIndex,
    x: ExponentPoint,
    strategy: str,
    seed: int = 0,
    grid: Grid | None = None,
) -> NormReport:
    """A certified lower bound on the p -> q projection norm: the ratio
    ||P f||_q / ||f||_p for an explicitly constructed f."""
    p, q = _ratio_exponents(x)
    if strategy == "single_eigenfunction":
        if s.d == 1:
            num = _eigenfunction_profile_norm(s.k, q)
            den = _eigenfunction_profile_norm(s.k, p)
        else:
            # product eigenfunction: level k in the first coordinate
            num = _eigenfunction_profile_norm(s.k, q) * _eigenfunction_profile_norm(0, q)
            den = _eigenfunction_profile_norm(s.k, p) * _eigenfunction_profile_norm(0, p)
        value = num / den
        return NormReport(s.mu, s.d, float(x.pr), float(x.qr), value, strategy, "lower_bound", seed)
    if strategy == "ring_extremizer":
        prof = RingProfile(s)
        value = prof.projection_ball_lq(q) / prof.lp_norm(p)
        return NormReport(s.mu, s.d, float(x.pr), float(x.qr), value, strategy, "lower_bound", seed)
    if strategy == "eigenspace_ascent":
        if abs(float(x.pr) - 0.5) > 1e-12:
            raise ValueError("eigenspace ascent certifies L^2 -> L^q bounds only")
        value = eigenspace_ascent(s, q, seed=seed, grid=grid)
        return NormReport(s.mu, s.d, float(x.pr), float(x.qr), value, strategy, "lower_bound", seed)
    raise ValueError(f"unknown strategy {strategy!r}")


def best_lower_bound(s: SpectralIndex, x: ExponentPoint, strategies, seed: int = 0):
    reports = [norm_lower_bound(s, x, st, seed=seed) for st in strategies]
    return max(reports, key=lambda r: r.value)


# ---------------------------------------------------------------------------
# eigenspace ascent (p = 2)
# ---------------------------------------------------------------------------

ASCENT_RESTARTS = 8
ASCENT_STEP = 0.1
ASCENT_STALL = 50
ASCENT_TOL = 1e-6
ASCENT_MAX_ITER = 2000


def eigenspace_ascent(
    s: SpectralIndex,
    q: float,
    seed: int = 0,
    grid: Grid | None = None,
    a_max: int | None = None,
) -> float:
    """max ||sum_a c_a Phi_{a,k}||_q over ||c||_2 = 1, by projected
    gradient ascent with restarts (d = 1).

    Any feasible c certifies a lower bound on the 2 -> q norm since the
    combination lies in the eigenspace; restarts guard against local
    optima but soundness never depends on global optimality.
    """
    if s.d != 1:
        raise NotImplementedError("ascent implemented for d = 1")
    from .projector import _basis_table_cached

    if grid is None:
        grid = Grid.for_eigenvalue(s.mu, 1)
    if a_max is None:
        a_max = min(4 * s.k + 40, 80)
    table = _basis_table_cached(grid, s.k, a_max)
    basis = table.reshape(a_max + 1, -1)
    vol = grid.cell_volume
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(ASCENT_RESTARTS):
        c = rng.standard_normal(a_max + 1) + 1j * rng.standard_normal(a_max + 1)
        c /= np.linalg.norm(c)
        last_gain_iter = 0
        current = 0.0
        for it in range(1, ASCENT_MAX_ITER + 1):
            u = c @ basis
            absu = np.abs(u)
            if q == math.inf:
                val = float(absu.max())
                grad = basis.conj() @ (
                    (absu >= val - 1e-15) * np.exp(1j * np.angle(u))
                )
            else:
                S = vol * float(np.sum(absu**q))
                val = S ** (1.0 / q)
                grad = (
                    0.5
                    * vol
                    * S ** (1.0 / q - 1.0)
                    * (basis.conj() @ (absu ** (q - 2) * u))
                )
            if val > current * (1 + ASCENT_TOL):
                last_gain_iter = it
            current = max(current, val)
            if it - last_gain_iter >= ASCENT_STALL:
                break
            step = ASCENT_STEP / math.sqrt(it)
            c = c + step * grad / max(np.linalg.norm(grad), 1e-300)
            c /= np.linalg.norm(c)
        best = max(best, current)
    return best


# ---------------------------------------------------------------------------
# scaling fits
# ---------------------------------------------------------------------------

def scaling_fit(reports) -> tuple:
    """Least-squares slope of log(value) against log(mu), with its
    standard error.  Needs >= 4 reports at distinct mu sharing
    (pr, qr, method)."""
    if len(reports) < 4:
        raise ValueError("need at least 4 reports")
    keys = {(r.pr, r.qr, r.method) for r in reports}
    if len(keys) != 1:
        raise ValueError("reports mix exponent pairs or methods")
    mus = np.array([r.mu for r in reports], dtype=float)
    if len(set(mus)) < 4:
        raise ValueError("need >= 4 distinct mu")
    vals = np.array([r.value for r in reports], dtype=float)
    return fit_loglog(mus, vals)


def fit_loglog(xs, ys) -> tuple:
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.log(np.asarray(ys, dtype=float))
    n = len(xs)
    A = np.stack([xs, np.ones(n)], axis=1)
    coef, res, *_ = np.linalg.lstsq(A, ys, rcond=None)
    slope = float(coef[0])
    if n > 2:
        resid = ys - A @ coef
        s2 = float(resid @ resid) / (n - 2)
        denom = float(np.sum((xs - xs.mean()) ** 2))
        stderr = math.sqrt(s2 / denom) if denom > 0 else 0.0
    else:
        stderr = 0.0
    return slope, stderr
