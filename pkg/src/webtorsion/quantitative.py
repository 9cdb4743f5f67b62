"""Quantitative stability of the torsion functional for planar convex bodies.

The deficit F_p - c_p is bounded below by K(p) w/diam (any p > 1) and, at
p = 2, by a cubic power of the symmetric-difference distance to an enclosing
rectangle Q with sides P/2 and w. The threshold sigma splits the proof into a
large-deficit branch (where D <= 2 suffices) and a small-deficit branch that
also passes through the inradius-deficit inequality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bounds import c_p, functional_F, q_exponent
from .errors import BadExponent, ContainmentFailure
from .geometry import BodyMetrics, ConvexPolygon, metrics
from .parallel import _clip_halfplane

# constant of the intermediate inradius-deficit inequality, any value < 1/3 works
QUANT_R_CONST = 1.0 / 6.0
# fallback constant of the small-deficit branch; the binding value is sigma/8
K_TILDE_FLOOR = 1.0 / 384.0


def K_of_p(p: float) -> float:
    """Explicit constant (p-1) p / (2^{p/(p-1)} 3 (3p-2) (2p-1)); K(2) = 1/72."""
    if p <= 1.0:
        raise BadExponent(f"p = {p!r} must exceed 1")
    return (p - 1.0) * p / (2.0 ** q_exponent(p) * 3.0 * (3.0 * p - 2.0) * (2.0 * p - 1.0))


def _bisect_root(fn, lo: float, hi: float, tol: float = 1e-14) -> float:
    """Largest x with fn(x) >= 0 for a decreasing fn, by bisection."""
    flo, fhi = fn(lo), fn(hi)
    if flo < 0.0:
        raise ValueError("no admissible value at the lower bracket")
    if fhi >= 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


@lru_cache(maxsize=None)
def sigma_threshold() -> float:
    """Largest sigma > 0 satisfying the three branch-split constraints at K(2).

    Each constraint is monotone in sigma, so the admissible maxima are found
    by bisection to 1e-14 and the minimum is returned. The binding constraint
    is the third one, giving sigma/K(2) = sqrt(3)/2 - 8/(3 pi).
    """
    K2 = K_of_p(2.0)

    def g1(s):
        return 1.0 / (4.0**3 * 6.0) - math.pi**2 / (2.0**3 * 3.0**3) * (s / K2) ** 2

    def g2(s):
        x = s / K2
        return 1.0 / (3.0**3 * 6.0) - math.pi / 48.0 * x - math.pi**2 / (2.0**5 * 3.0) * x * x

    def g3(s):
        return math.pi / 4.0 - math.pi / (2.0 * math.sqrt(3.0)) * (s / K2) - 4.0 / (
            3.0 * math.sqrt(3.0)
        )

    return min(_bisect_root(g, 0.0, 1.0) for g in (g1, g2, g3))


def k_tilde() -> float:
    """Constant of the cubic stability inequality: min(sigma/8, 1/384)."""
    return min(sigma_threshold() / 8.0, K_TILDE_FLOOR)


@dataclass(frozen=True)
class EnclosingRectangle:
    """Rectangle with sides P/2 and w containing the body.

    The short side is parallel to the minimal-width direction; corners are
    listed counter-clockwise in the original frame.
    """

    width_direction: tuple[float, float]
    long_side: float
    short_side: float
    corners: np.ndarray
    symdiff_ratio: float

    def to_json_dict(self) -> dict:
        return {
            "width_direction": list(self.width_direction),
            "long_side": self.long_side,
            "short_side": self.short_side,
            "corners": [list(map(float, c)) for c in self.corners],
            "symdiff_ratio": self.symdiff_ratio,
        }


def enclosing_rectangle(polygon: ConvexPolygon, body: BodyMetrics | None = None) -> EnclosingRectangle:
    """Build Q and the closed-form ratio D = |Q symdiff body| / area = P w / (2 area) - 1."""
    if body is None:
        body = metrics(polygon)
    u = np.asarray(body.width_direction, dtype=float)
    vdir = np.array([-u[1], u[0]])
    proj_u = polygon.vertices @ u
    proj_v = polygon.vertices @ vdir
    long_side = body.perimeter / 2.0
    short_side = body.width
    mid_v = 0.5 * (proj_v.min() + proj_v.max())
    u_lo = proj_u.min()
    v_lo, v_hi = mid_v - long_side / 2.0, mid_v + long_side / 2.0
    u_hi = u_lo + short_side
    pad = 0.0
    scale_len = float(np.max(np.abs(polygon.vertices))) + 1.0
    for _ in range(2):
        ok = (
            (proj_u >= u_lo - pad - 1e-12 * scale_len)
            & (proj_u <= u_hi + pad + 1e-12 * scale_len)
            & (proj_v >= v_lo - pad - 1e-12 * scale_len)
            & (proj_v <= v_hi + pad + 1e-12 * scale_len)
        )
        if ok.all():
            break
        pad = 1e-12 * scale_len
    else:
        raise ContainmentFailure("body vertices escape the enclosing rectangle")
    corners = np.array(
        [
            (u_lo - pad) * u + (v_lo - pad) * vdir,
            (u_hi + pad) * u + (v_lo - pad) * vdir,
            (u_hi + pad) * u + (v_hi + pad) * vdir,
            (u_lo - pad) * u + (v_hi + pad) * vdir,
        ]
    )
    if _shoelace_loop(corners) < 0.0:
        corners = corners[::-1]
    ratio = body.perimeter * body.width / (2.0 * body.area) - 1.0
    return EnclosingRectangle(
        width_direction=(float(u[0]), float(u[1])),
        long_side=long_side,
        short_side=short_side,
        corners=corners,
        symdiff_ratio=ratio,
    )


def _shoelace_loop(c: np.ndarray) -> float:
    x, y = c[:, 0], c[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def symdiff_ratio_geometric(polygon: ConvexPolygon, rect: EnclosingRectangle) -> float:
    """|Q| + |body| - 2 |Q intersect body| over |body|, by actual clipping."""
    pts = [(float(x), float(y)) for x, y in polygon.vertices]
    c = rect.corners
    for i in range(4):
        a, b = c[i], c[(i + 1) % 4]
        e = b - a
        nlen = float(np.hypot(*e))
        nx, ny = -e[1] / nlen, e[0] / nlen
        off = nx * a[0] + ny * a[1]
        pts = _clip_halfplane(pts, nx, ny, off)
        if len(pts) < 3:
            return math.inf
    inter = _shoelace_loop(np.asarray(pts))
    area_q = rect.long_side * rect.short_side
    area_b = _shoelace_loop(np.asarray(polygon.vertices))
    return (area_q + area_b - 2.0 * inter) / area_b


@dataclass(frozen=True)
class DeficitReport:
    """Deficit functionals, geometric ratios and theorem verdicts for one body."""

    p: float
    torsion: float
    F_p: float
    c_p: float
    deficit: float
    width_diam_ratio: float
    K_p: float
    theorem2_rhs: float
    theorem2_ok: bool
    inradius_deficit: float
    # p = 2 only fields; None otherwise
    rectangle: EnclosingRectangle | None = None
    symdiff_ratio: float | None = None
    sigma: float | None = None
    k_tilde: float | None = None
    branch: str | None = None
    theorem3_rhs: float | None = None
    theorem3_ok: bool | None = None
    quantitative_R_rhs: float | None = None
    quantitative_R_ok: bool | None = None

    @property
    def all_ok(self) -> bool:
        verdicts = [self.theorem2_ok]
        if self.theorem3_ok is not None:
            verdicts.append(self.theorem3_ok)
        if self.quantitative_R_ok is not None:
            verdicts.append(self.quantitative_R_ok)
        return all(verdicts)

    def to_json_dict(self) -> dict:
        out = {
            "p": self.p,
            "T": self.torsion,
            "F_p": self.F_p,
            "c_p": self.c_p,
            "deficit": self.deficit,
            "width_diam_ratio": self.width_diam_ratio,
            "K_p": self.K_p,
            "theorem2_rhs": self.theorem2_rhs,
            "theorem2_ok": self.theorem2_ok,
            "inradius_deficit": self.inradius_deficit,
        }
        if self.rectangle is not None:
            out.update(
                {
                    "rectangle": self.rectangle.to_json_dict(),
                    "symdiff_ratio": self.symdiff_ratio,
                    "sigma": self.sigma,
                    "k_tilde": self.k_tilde,
                    "k_tilde_basis": "min(sigma/8, 1/384), reconstructed constant",
                    "branch": self.branch,
                    "theorem3_rhs": self.theorem3_rhs,
                    "theorem3_ok": self.theorem3_ok,
                    "quantitative_R_rhs": self.quantitative_R_rhs,
                    "quantitative_R_ok": self.quantitative_R_ok,
                }
            )
        return out


def theorem2_report(body: BodyMetrics, T: float, p: float) -> DeficitReport:
    """Check F_p - c_p >= K(p) w / diam with a torsion value from any source."""
    F = functional_F(T, body, p)
    deficit = F - c_p(p)
    ratio = body.width / body.diameter
    rhs = K_of_p(p) * ratio
    return DeficitReport(
        p=p,
        torsion=T,
        F_p=F,
        c_p=c_p(p),
        deficit=deficit,
        width_diam_ratio=ratio,
        K_p=K_of_p(p),
        theorem2_rhs=rhs,
        theorem2_ok=bool(deficit >= rhs),
        inradius_deficit=body.perimeter * body.inradius / body.area - 1.0,
    )


def theorem3_report(polygon: ConvexPolygon, T: float, body: BodyMetrics | None = None) -> DeficitReport:
    """Full p = 2 deficit report with the cubic stability verdicts.

    Large-deficit bodies (deficit >= sigma) are checked against (sigma/8) D^3,
    which covers them because D <= 2; small-deficit bodies are checked against
    k_tilde D^3 and the intermediate inradius-deficit inequality
    deficit >= (1/6) (P R / area - 1)^3.
    """
    if body is None:
        body = metrics(polygon)
    base = theorem2_report(body, T, 2.0)
    rect = enclosing_rectangle(polygon, body)
    D = rect.symdiff_ratio
    sigma = sigma_threshold()
    kt = k_tilde()
    if base.deficit >= sigma:
        branch = "large-deficit"
        rhs3 = sigma / 8.0 * D**3
        ok3 = bool(base.deficit >= rhs3)
        rhs_r, ok_r = None, None
    else:
        branch = "small-deficit"
        rhs3 = kt * D**3
        ok3 = bool(base.deficit >= rhs3)
        rhs_r = QUANT_R_CONST * base.inradius_deficit**3
        ok_r = bool(base.deficit >= rhs_r)
    return DeficitReport(
        p=2.0,
        torsion=T,
        F_p=base.F_p,
        c_p=base.c_p,
        deficit=base.deficit,
        width_diam_ratio=base.width_diam_ratio,
        K_p=base.K_p,
        theorem2_rhs=base.theorem2_rhs,
        theorem2_ok=base.theorem2_ok,
        inradius_deficit=base.inradius_deficit,
        rectangle=rect,
        symdiff_ratio=D,
        sigma=sigma,
        k_tilde=kt,
        branch=branch,
        theorem3_rhs=rhs3,
        theorem3_ok=ok3,
        quantitative_R_rhs=rhs_r,
        quantitative_R_ok=ok_r,
    )
