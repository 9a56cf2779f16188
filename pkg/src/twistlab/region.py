"""Exponent calculus on the Riesz square.

Mapping properties of the twisted-Laplacian spectral projection are
parametrized by points (1/p, 1/q) in the square [1/2, 1] x [0, 1/2]
(1 <= p <= 2 <= q <= infinity, with q = infinity encoded as 1/q = 0).
This module provides the five canonical corner points and their duals,
the duality involution (x, y) -> (1 - y, 1 - x), membership of a point
in the regions where the sharp operator-norm growth exponent is given
by each of four affine laws, the exponent itself, the tag describing
which kind of estimate (strong / weak / restricted weak) holds, and the
pentagon governing uniform resolvent bounds.

All of these are rational-linear objects. Points built from rationals
are handled in exact integer arithmetic so that region membership and
exponent comparisons are never subject to rounding; float inputs fall
back to a fixed absolute tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Num = Union[int, float, Fraction]

#: absolute tolerance used for membership tests on float-valued points
FLOAT_TOL = 1e-12

REGION_TAGS = (
    "SegmentBC",
    "SegmentBCdual",
    "R1",
    "R2",
    "R2_dual",
    "R3_closed",
    "OutsideRieszSquare",
)

ESTIMATE_TAGS = ("Strong", "Weak", "RestrictedWeak", "StrongFailsNoLorentzClaim")


def _coerce(v: Num) -> Union[Fraction, float]:
    """Normalize a coordinate: ints and Fractions stay exact, floats stay float.

    Strings of the form "a/b" or decimal literals are accepted for CLI use.
    """
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        s = v.strip()
        if "/" in s:
            return Fraction(s)
        try:
            return Fraction(int(s))
        except ValueError:
            return float(s)
    return float(v)


def _is_exact(v) -> bool:
    return isinstance(v, Fraction)


def _sign(v, exact: bool):
    """Sign of v with the float tolerance applied on the inexact path."""
    if exact:
        return (v > 0) - (v < 0)
    if v > FLOAT_TOL:
        return 1
    if v < -FLOAT_TOL:
        return -1
    return 0


@dataclass(frozen=True)
class ExponentPoint:
    """A point (1/p, 1/q) on the Riesz square; pr = 1/p, qr = 1/q."""

    pr: Union[Fraction, float]
    qr: Union[Fraction, float]

    def __post_init__(self):
        pr = _coerce(self.pr)
        qr = _coerce(self.qr)
        object.__setattr__(self, "pr", pr)
        object.__setattr__(self, "qr", qr)
        if not _in_riesz_square(pr, qr):
            raise ValueError(
                f"({pr}, {qr}) is outside the Riesz square [1/2,1]x[0,1/2]"
            )

    @property
    def exact(self) -> bool:
        return _is_exact(self.pr) and _is_exact(self.qr)

    def dual(self) -> "ExponentPoint":
        return ExponentPoint(1 - self.qr, 1 - self.pr)

    def as_floats(self):
        return float(self.pr), float(self.qr)


def _in_riesz_square(pr, qr) -> bool:
    exact = _is_exact(pr) and _is_exact(qr)
    tol = 0 if exact else FLOAT_TOL
    return (
        float(pr) >= 0.5 - tol
        and float(pr) <= 1 + tol
        and float(qr) >= -tol
        and float(qr) <= 0.5 + tol
    )


def dual_point(x: ExponentPoint) -> ExponentPoint:
    """The duality involution (x, y) -> (1 - y, 1 - x); fixes the line x + y = 1."""
    return x.dual()


@dataclass(frozen=True)
class CanonicalPoints:
    """The five corner points of the sharp-exponent geometry, plus duals."""

    d: int
    A: ExponentPoint
    B: ExponentPoint
    C: ExponentPoint
    D: ExponentPoint
    F: ExponentPoint
    A_dual: ExponentPoint
    B_dual: ExponentPoint
    C_dual: ExponentPoint
    D_dual: ExponentPoint
    F_dual: ExponentPoint

    def as_dict(self) -> dict:
        def enc(p):
            return [str(p.pr), str(p.qr)]

        return {
            "d": self.d,
            "A": enc(self.A),
            "B": enc(self.B),
            "C": enc(self.C),
            "D": enc(self.D),
            "F": enc(self.F),
            "A'": enc(self.A_dual),
            "B'": enc(self.B_dual),
            "C'": enc(self.C_dual),
            "D'": enc(self.D_dual),
            "F'": enc(self.F_dual),
        }


def canonical_points(d: int) -> CanonicalPoints:
    """Exact rational coordinates of the corner points for dimension d >= 1."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    A = ExponentPoint(Fraction(2 * d + 3, 2 * (2 * d + 1)), Fraction(1, 2))
    B = ExponentPoint(
        Fraction((2 * d) ** 2 + 8 * d - 1, 4 * d * (2 * d + 1)),
        Fraction(2 * d - 1, 4 * d),
    )
    C = ExponentPoint(Fraction(1), Fraction(2 * d - 1, 4 * d))
    D = ExponentPoint(Fraction(d + 1, 2 * d), Fraction(1, 2))
    F = ExponentPoint(
        Fraction((2 * d) ** 2 + 4 * d - 4, 4 * d * (2 * d - 1)),
        Fraction(d - 1, 2 * d - 1),
    )
    return CanonicalPoints(
        d, A, B, C, D, F, A.dual(), B.dual(), C.dual(), D.dual(), F.dual()
    )


# ---------------------------------------------------------------------------
# the four affine exponent laws
# ---------------------------------------------------------------------------

def rho_affine_parts(x: ExponentPoint, d: int):
    """The four affine functions whose maximum is the sharp exponent.

    Order: diagonal-decay law, off-diagonal law, lower concentration law,
    upper concentration law. The last two are exchanged by duality and the
    first two are fixed by it.
    """
    pr, qr = x.pr, x.qr
    if x.exact:
        half = Fraction(1, 2)
    else:
        half = 0.5
        pr, qr = float(pr), float(qr)
    return (
        -half * (pr - qr),
        d * (pr - qr) - 1,
        (2 * d - 1) * half - d * (pr + qr),
        d * (pr + qr) - (2 * d + 1) * half,
    )


def rho(x: ExponentPoint, d: int):
    """Sharp growth exponent of the projection operator norm at (1/p, 1/q).

    Returns a Fraction for exact inputs, a float otherwise.
    """
    if d < 1:
        raise ValueError("d must be a positive integer")
    return max(rho_affine_parts(x, d))


def rho_2q(q, d: int):
    """The classical two-exponent law at p = 2, as a function of q >= 2.

    Below the threshold q = 2(2d+1)/(2d-1) the exponent is the diagonal
    law -(1/2)(1/2 - 1/q); above it, (d-1)/2 - d/q.  q = math.inf is
    accepted and treated as 1/q = 0.
    """
    if q == math.inf:
        qr: Union[Fraction, float] = Fraction(0)
    else:
        qv = _coerce(q)
        if float(qv) < 2:
            raise ValueError("q must be >= 2")
        qr = 1 / qv if isinstance(qv, Fraction) else 1.0 / qv
    exact = _is_exact(qr)
    half = Fraction(1, 2) if exact else 0.5
    threshold = Fraction(2 * d - 1, 2 * (2 * d + 1))  # value of 1/q at the break
    cmp = _sign(qr - (threshold if exact else float(threshold)), exact)
    if cmp >= 0:
        return -half * (half - qr)
    return (d - 1) * half - d * qr


# ---------------------------------------------------------------------------
# region classification
# ---------------------------------------------------------------------------

def _linear_forms(x: ExponentPoint, d: int):
    """Signs of the integer-scaled boundary lines through B, C and their duals.

    Returns (l_ab, l_dual_ab, l_bb, l_bc, l_bc_dual):
      l_ab      = (2d+1)x + (2d-1)y - (2d+1)          [B--A line; >0 on the R2 side]
      l_dual_ab = (2d-1)x + (2d+1)y - (2d-1)          [B'--A' line; <0 on the R2' side]
      l_bb      = (2d+1)(x - y) - 2                   [B--B' line; >0 on the R3 side]
      l_bc      = 4dy - (2d-1)                        [horizontal line through B, C]
      l_bc_dual = (2d+1) - 4dx                        [vertical line through B', C']
    """
    pr, qr = x.pr, x.qr
    if x.exact:
        ax, bx = pr.numerator, pr.denominator
        ay, by = qr.numerator, qr.denominator
        l_ab = (2 * d + 1) * ax * by + (2 * d - 1) * ay * bx - (2 * d + 1) * bx * by
        l_dab = (2 * d - 1) * ax * by + (2 * d + 1) * ay * bx - (2 * d - 1) * bx * by
        l_bb = (2 * d + 1) * (ax * by - ay * bx) - 2 * bx * by
        l_bc = 4 * d * ay - (2 * d - 1) * by
        l_bcd = (2 * d + 1) * bx - 4 * d * ax
        # bx, by > 0 so the integer signs match the rational signs
        return tuple(_sign(v, True) for v in (l_ab, l_dab, l_bb, l_bc, l_bcd))
    xf, yf = float(pr), float(qr)
    vals = (
        (2 * d + 1) * xf + (2 * d - 1) * yf - (2 * d + 1),
        (2 * d - 1) * xf + (2 * d + 1) * yf - (2 * d - 1),
        (2 * d + 1) * (xf - yf) - 2,
        4 * d * yf - (2 * d - 1),
        (2 * d + 1) - 4 * d * xf,
    )
    return tuple(_sign(v, False) for v in vals)


def _on_segment_bc(x: ExponentPoint, d: int, signs) -> bool:
    # y = (2d-1)/(4d) and B_x <= x <= 1, i.e. on the R3 side of the B--B' line
    _, _, l_bb, l_bc, _ = signs
    return l_bc == 0 and l_bb >= 0


def _on_segment_bc_dual(x: ExponentPoint, d: int, signs) -> bool:
    _, _, l_bb, _, l_bcd = signs
    return l_bcd == 0 and l_bb >= 0


def classify_region(x: ExponentPoint, d: int) -> str:
    """Region tag per the sharp-exponent geometry.

    The removed critical segments [B, C] and [B', C'] are reported as
    their own tags and take precedence; the four closed regions are then
    tested in the order R1, R2, R2_dual, R3_closed.  Because the exponent
    is continuous across all other shared boundaries, the remaining
    overlaps are benign.
    """
    if d < 1:
        raise ValueError("d must be a positive integer")
    signs = _linear_forms(x, d)
    l_ab, l_dab, l_bb, l_bc, l_bcd = signs
    if _on_segment_bc(x, d, signs):
        return "SegmentBC"
    if _on_segment_bc_dual(x, d, signs):
        return "SegmentBCdual"
    if l_ab <= 0 and l_dab >= 0 and l_bb <= 0:
        return "R1"
    if l_ab >= 0 and l_bc >= 0:
        return "R2"
    if l_dab <= 0 and l_bcd >= 0:
        return "R2_dual"
    if l_bb >= 0 and l_bc <= 0 and l_bcd <= 0:
        return "R3_closed"
    # unreachable for points inside the square
    return "OutsideRieszSquare"


def classify_raw(pr, qr, d: int) -> str:
    """classify_region on unvalidated coordinates; outside points get a tag."""
    try:
        x = ExponentPoint(pr, qr)
    except ValueError:
        return "OutsideRieszSquare"
    return classify_region(x, d)


def rho_piecewise(x: ExponentPoint, d: int):
    """The exponent evaluated through the region classification.

    Agrees exactly with the max-of-four form; kept as an independent route
    for cross-validation.
    """
    tag = classify_region(x, d)
    parts = rho_affine_parts(x, d)
    if tag == "R1":
        return parts[0]
    if tag == "R2":
        return parts[3]
    if tag == "R2_dual":
        return parts[2]
    if tag in ("R3_closed", "SegmentBC", "SegmentBCdual"):
        return parts[1]
    raise ValueError(f"point {x} not classifiable for d={d}")


@dataclass(frozen=True)
class EstimateClass:
    """Which operator-norm estimate holds at a point, with its exponent."""

    tag: str
    exponent: Union[Fraction, float]


def classify_estimate(x: ExponentPoint, d: int) -> EstimateClass:
    """Strong / weak / restricted-weak trichotomy at (1/p, 1/q).

    Strong bounds hold off the two critical segments.  On the half-open
    segment (B, C] the strong bound fails but the weak-type substitute
    holds; at the endpoints B and B' only the restricted weak type
    estimate holds.  On (B', C'] the strong bound fails and no Lorentz
    substitute is asserted.
    """
    signs = _linear_forms(x, d)
    ex = rho(x, d)
    pts = canonical_points(d)
    if _on_segment_bc(x, d, signs):
        if _points_equal(x, pts.B):
            return EstimateClass("RestrictedWeak", ex)
        return EstimateClass("Weak", ex)
    if _on_segment_bc_dual(x, d, signs):
        if _points_equal(x, pts.B_dual):
            return EstimateClass("RestrictedWeak", ex)
        return EstimateClass("StrongFailsNoLorentzClaim", ex)
    return EstimateClass("Strong", ex)


def _points_equal(x: ExponentPoint, y: ExponentPoint) -> bool:
    exact = x.exact and y.exact
    if exact:
        return x.pr == y.pr and x.qr == y.qr
    return (
        abs(float(x.pr) - float(y.pr)) <= FLOAT_TOL
        and abs(float(x.qr) - float(y.qr)) <= FLOAT_TOL
    )


# ---------------------------------------------------------------------------
# resolvent pentagon
# ---------------------------------------------------------------------------

def in_resolvent_pentagon(x: ExponentPoint, d: int) -> str:
    """Membership in the closed pentagon governing uniform resolvent bounds.

    The pentagon has vertices (1/2, 1/2), D, F, F', D'; the two vertices
    F and F' are reported separately since only the restricted weak type
    bound holds there.  Requires d >= 2.
    """
    if d < 2:
        raise ValueError("the uniform resolvent range requires d >= 2")
    pts = canonical_points(d)
    if _points_equal(x, pts.F) or _points_equal(x, pts.F_dual):
        return "restricted-weak-vertex"
    verts = [
        ExponentPoint(Fraction(1, 2), Fraction(1, 2)),
        pts.D,
        pts.F,
        pts.F_dual,
        pts.D_dual,
    ]
    if _convex_contains(verts, x):
        return "interior-or-edge"
    return "outside"


def _convex_contains(verts, x: ExponentPoint) -> bool:
    """Point-in-closed-convex-polygon by uniform cross-product signs."""
    exact = x.exact and all(v.exact for v in verts)
    if exact:
        px, py = x.pr, x.qr
        coords = [(v.pr, v.qr) for v in verts]
    else:
        px, py = float(x.pr), float(x.qr)
        coords = [(float(v.pr), float(v.qr)) for v in verts]
    n = len(coords)
    orient = 0
    for i in range(n):
        x0, y0 = coords[i]
        x1, y1 = coords[(i + 1) % n]
        cross = (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0)
        s = _sign(cross, exact)
        if s == 0:
            continue
        if orient == 0:
            orient = s
        elif s != orient:
            return False
    return True
