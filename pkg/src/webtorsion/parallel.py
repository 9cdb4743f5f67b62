"""Inner parallel bodies and the profiles that drive every lower bound.

For a convex polygon the body at depth t is the intersection of its edge
half-planes pushed inward by t. The profile samples perimeter P(t), area
mu(t) and the weighted volume mu_f(t) = integral over {d > t} of f(d(x)) on a
uniform grid over [0, R], R the inradius.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, ViolationFound
from .geometry import (
    MERGE_EPS,
    MIN_VERTEX_SEP,
    BodyMetrics,
    ConvexPolygon,
    metrics,
    _shoelace,
)

DEFAULT_GRID = 512
_MIN_GRID = 64


@dataclass(frozen=True)
class WeightProfile:
    """Continuous, non-increasing, non-negative weight of the boundary distance.

    Kinds: "const" f = c, "linear" f(s) = max(c - beta s, 0),
    "exp" f(s) = c exp(-rate s). Always f(0) = c > 0.
    """

    kind: str
    c: float = 1.0
    beta: float = 0.0
    rate: float = 0.0

    def __post_init__(self):
        if self.kind not in ("const", "linear", "exp"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if not (self.c > 0.0):
            raise ValueError("weight must be positive at distance zero")
        if self.beta < 0.0 or self.rate < 0.0:
            raise ValueError("slope and rate must be non-negative")

    @classmethod
    def constant(cls, c: float = 1.0) -> "WeightProfile":
        return cls("const", c=c)

    @classmethod
    def truncated_linear(cls, c: float = 1.0, beta: float = 1.0) -> "WeightProfile":
        return cls("linear", c=c, beta=beta)

    @classmethod
    def exponential(cls, c: float = 1.0, rate: float = 1.0) -> "WeightProfile":
        return cls("exp", c=c, rate=rate)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "const":
            out = np.full_like(s, self.c)
        elif self.kind == "linear":
            out = np.maximum(self.c - self.beta * s, 0.0)
        else:
            out = self.c * np.exp(-self.rate * s)
        return float(out) if out.ndim == 0 else out

    def derivative(self, s):
        """Pointwise slope f'(s); the left value is used at the linear kink."""
        s = np.asarray(s, dtype=float)
        if self.kind == "const":
            out = np.zeros_like(s)
        elif self.kind == "linear":
            out = np.where(self.c - self.beta * s > 0.0, -self.beta, 0.0)
        else:
            out = -self.rate * self.c * np.exp(-self.rate * s)
        return float(out) if out.ndim == 0 else out

    @property
    def is_constant(self) -> bool:
        return self.kind == "const" or (self.kind == "linear" and self.beta == 0.0) or (
            self.kind == "exp" and self.rate == 0.0
        )


# ---------------------------------------------------------------------------
# inner bodies
# ---------------------------------------------------------------------------


def _clip_halfplane(pts, nx, ny, b):
    """Sutherland-Hodgman clip of a convex loop against n . x >= b."""
    out = []
    m = len(pts)
    if m == 0:
        return out
    px, py = pts[-1]
    pd = nx * px + ny * py - b
    for qx, qy in pts:
        qd = nx * qx + ny * qy - b
        if qd >= 0.0:
            if pd < 0.0:
                t = pd / (pd - qd)
                out.append((px + t * (qx - px), py + t * (qy - py)))
            out.append((qx, qy))
        elif pd >= 0.0:
            t = pd / (pd - qd)
            out.append((px + t * (qx - px), py + t * (qy - py)))
        px, py, pd = qx, qy, qd
    return out


def _cleanup_loop(pts, tol):
    """Remove duplicate and collinear points from a convex loop."""
    dedup = []
    for p in pts:
        if not dedup or math.hypot(p[0] - dedup[-1][0], p[1] - dedup[-1][1]) > tol:
            dedup.append(p)
    if len(dedup) >= 2 and math.hypot(
        dedup[0][0] - dedup[-1][0], dedup[0][1] - dedup[-1][1]
    ) <= tol:
        dedup.pop()
    if len(dedup) < 3:
        return []
    out = []
    m = len(dedup)
    for j in range(m):
        a, p, c = dedup[j - 1], dedup[j], dedup[(j + 1) % m]
        ux, uy = p[0] - a[0], p[1] - a[1]
        wx, wy = c[0] - p[0], c[1] - p[1]
        cross = ux * wy - uy * wx
        norm = math.hypot(ux, uy) * math.hypot(wx, wy)
        if norm == 0.0 or abs(cross) / norm < MERGE_EPS:
            continue
        out.append(p)
    return out if len(out) >= 3 else []


def inner_body(polygon: ConvexPolygon, t: float):
    """The body at depth t, or None when it is empty (t >= inradius)."""
    if t < 0.0:
        raise ValueError("depth t must be non-negative")
    if t == 0.0:
        return polygon
    n, b, _ = polygon._edge_data()
    pts = [(float(x), float(y)) for x, y in polygon.vertices]
    for i in range(len(b)):
        pts = _clip_halfplane(pts, float(n[i, 0]), float(n[i, 1]), float(b[i]) + t)
        if len(pts) < 3:
            return None
    scale_len = float(np.max(np.abs(polygon.vertices))) + 1.0
    pts = _cleanup_loop(pts, MIN_VERTEX_SEP * scale_len)
    if len(pts) < 3:
        return None
    arr = np.asarray(pts)
    if _shoelace(arr) <= 0.0:
        return None
    return ConvexPolygon(arr)


def _offset_polygon_deque(nx, ny, c, start):
    """Vertices of the intersection of half-planes n_i . x >= c_i.

    The normals must be angularly sorted counter-clockwise; ``start`` rotates
    the processing order to begin at the smallest angle. Returns a vertex list
    or None when the intersection is empty or degenerate.
    """
    k = len(c)

    def inter(i, j):
        det = nx[i] * ny[j] - ny[i] * nx[j]
        return (
            (c[i] * ny[j] - ny[i] * c[j]) / det,
            (nx[i] * c[j] - c[i] * nx[j]) / det,
        )

    def violates(i, j, l):
        x, y = inter(i, j)
        return nx[l] * x + ny[l] * y < c[l]

    dq = deque()
    for s in range(k):
        i = (start + s) % k
        while len(dq) >= 2 and violates(dq[-2], dq[-1], i):
            dq.pop()
        while len(dq) >= 2 and violates(dq[0], dq[1], i):
            dq.popleft()
        dq.append(i)
    while len(dq) >= 3 and violates(dq[-2], dq[-1], dq[0]):
        dq.pop()
    while len(dq) >= 3 and violates(dq[0], dq[1], dq[-1]):
        dq.popleft()
    if len(dq) < 3:
        return None
    idx = list(dq)
    return [inter(idx[j], idx[(j + 1) % len(idx)]) for j in range(len(idx))]


def _loop_area_perimeter(pts):
    area = 0.0
    per = 0.0
    m = len(pts)
    for j in range(m):
        x0, y0 = pts[j]
        x1, y1 = pts[(j + 1) % m]
        area += x0 * y1 - x1 * y0
        per += math.hypot(x1 - x0, y1 - y0)
    return 0.5 * area, per


@dataclass(frozen=True)
class ParallelProfile:
    """Sampled curves t -> (P(t), mu(t), mu_f(t)) of the inner parallel bodies."""

    t: np.ndarray
    perimeters: np.ndarray
    areas: np.ndarray
    weighted: np.ndarray
    metrics: BodyMetrics
    weight: WeightProfile
    polygon: ConvexPolygon

    def __post_init__(self):
        for name in ("t", "perimeters", "areas", "weighted"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        m = self.metrics
        P, mu = self.perimeters, self.areas
        tol_p = 1e-9 * m.perimeter
        tol_a = 1e-9 * m.area
        if np.any(np.diff(P) > tol_p):
            raise ViolationFound("perimeter-monotone", float(np.diff(P).max()), None)
        pos = mu > 0.0
        if pos.any():
            last = int(np.max(np.nonzero(pos)))
            if np.any(np.diff(mu[: last + 1]) >= 0.0):
                raise ViolationFound("area-strict-decrease", 0.0, None)
            if np.any(mu[last + 1 :] != 0.0) or np.any(P[last + 1 :] != 0.0):
                raise ViolationFound("trailing-zeros", 0.0, None)
        if abs(mu[0] - m.area) > 1e-9 * m.area:
            raise ViolationFound("area-at-zero", float(mu[0] - m.area), 0)
        if mu[-1] > 1e-6 * m.area + tol_a:
            raise ViolationFound("area-at-inradius", float(mu[-1]), len(mu) - 1)
        if self.weighted[-1] != 0.0:
            raise ViolationFound("weighted-at-inradius", float(self.weighted[-1]), None)

    @property
    def mu_f_total(self) -> float:
        return float(self.weighted[0])

    def to_csv(self, stream) -> None:
        """Write rows t,P,mu,mu_f with 17 significant digits."""
        stream.write("t,P,mu,mu_f\n")
        for i in range(len(self.t)):
            stream.write(
                f"{self.t[i]:.17g},{self.perimeters[i]:.17g},"
                f"{self.areas[i]:.17g},{self.weighted[i]:.17g}\n"
            )


def profile(polygon: ConvexPolygon, weight: WeightProfile, m: int = DEFAULT_GRID) -> ParallelProfile:
    """Sample P, mu and mu_f on the uniform grid 0 = t_0 < ... < t_m = R.

    P and mu come from a fresh half-plane intersection at every node. mu_f is
    accumulated from the inradius end, so mu_f(R) = 0 holds exactly: constant
    weights use c times the exact areas, the others sum f(midpoint) times the
    exact area increment of each subinterval.
    """
    if m < _MIN_GRID:
        raise GridTooCoarse(f"grid size {m} below minimum {_MIN_GRID}")
    body = metrics(polygon)
    n, b, _ = polygon._edge_data()
    nx = n[:, 0].tolist()
    ny = n[:, 1].tolist()
    b = b.tolist()
    start = int(np.argmin(np.arctan2(n[:, 1], n[:, 0])))
    ts = np.linspace(0.0, body.inradius, m + 1)
    P = np.zeros(m + 1)
    mu = np.zeros(m + 1)
    empty = False
    for i, t in enumerate(ts[:-1]):
        if empty:
            continue
        shifted = [bj + t for bj in b]
        loop = _offset_polygon_deque(nx, ny, shifted, start)
        if loop is None:
            empty = True
            continue
        a, p = _loop_area_perimeter(loop)
        if a <= 0.0:
            empty = True
            continue
        P[i] = p
        mu[i] = a
    # the body at depth R has measure zero; its node is empty by definition
    if weight.is_constant:
        # exact: the weighted volume of a constant weight is c times the area,
        # which keeps the discrete bound chain one-sided
        mu_f = weight.c * mu
    else:
        # accumulate f(mid) times the exact area increment of each subinterval;
        # since mu carries the integral of P exactly, this is insensitive to
        # the perimeter kinks and to its jump at a needle collapse, and it
        # obeys mu_f(t) <= f(t) mu(t) <= (R - t) f(t) P(t) node by node
        mids = 0.5 * (ts[:-1] + ts[1:])
        seg = np.asarray(weight(mids)) * (mu[:-1] - mu[1:])
        mu_f = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    return ParallelProfile(
        t=ts, perimeters=P, areas=mu, weighted=mu_f,
        metrics=body, weight=weight, polygon=polygon,
    )


@dataclass(frozen=True)
class SteinerReport:
    """Worst slacks of the inner Steiner inequalities over a profile."""

    perimeter_slack: float
    perimeter_node: int
    area_slack: float
    area_node: int
    quotient_slack: float
    quotient_node: int

    def to_json_dict(self) -> dict:
        return {
            "perimeter_slack": self.perimeter_slack,
            "perimeter_node": self.perimeter_node,
            "area_slack": self.area_slack,
            "area_node": self.area_node,
            "quotient_slack": self.quotient_slack,
            "quotient_node": self.quotient_node,
        }


def steiner_check(prof: ParallelProfile, rel_tol: float = 1e-9) -> SteinerReport:
    """Verify P(t) <= P - 2 pi t, mu(t) >= area - P t + pi t^2 and -dP/dt >= 2 pi.

    Returns the minimal slacks; raises ViolationFound when a slack falls below
    -rel_tol times the natural scale of its inequality.
    """
    m = prof.metrics
    t, P, mu = prof.t, prof.perimeters, prof.areas
    s1 = (m.perimeter - 2 * np.pi * t) - P
    s2 = mu - (m.area - m.perimeter * t + np.pi * t * t)
    i1 = int(np.argmin(s1))
    i2 = int(np.argmin(s2))
    quo_slack, quo_node = math.inf, -1
    dt = t[1] - t[0]
    for i in range(len(t) - 1):
        if P[i] == 0.0 and P[i + 1] == 0.0:
            continue
        q = (P[i] - P[i + 1]) / dt - 2 * np.pi
        if q < quo_slack:
            quo_slack, quo_node = q, i
    report = SteinerReport(
        perimeter_slack=float(s1[i1]), perimeter_node=i1,
        area_slack=float(s2[i2]), area_node=i2,
        quotient_slack=float(quo_slack), quotient_node=quo_node,
    )
    if report.perimeter_slack < -rel_tol * m.perimeter:
        raise ViolationFound("steiner-perimeter", report.perimeter_slack, i1)
    if report.area_slack < -rel_tol * m.area:
        raise ViolationFound("steiner-area", report.area_slack, i2)
    if quo_slack < -rel_tol * 2 * np.pi:
        raise ViolationFound("steiner-quotient", float(quo_slack), quo_node)
    return report
