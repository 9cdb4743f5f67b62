"""Analytic shape families with closed-form reference data.

Thinning rectangles and isosceles triangles of unit area, stadii, disks, and
the n-dimensional thinning-cylinder formulas. Curved shapes enter as fine
polygonal approximations with an explicit error budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParameter
from .geometry import ConvexPolygon, polygon_from_vertices


def _q(p: float) -> float:
    return p / (p - 1.0)


def _c_p(p: float) -> float:
    return (p - 1.0) / (2.0 * p - 1.0)


def slab_upper_bound(l: float, p: float, n: int = 2) -> float:
    """Upper bound 2 c_p l^{-1} (l/2)^{(2p-1)/(p-1)} for the thinning cylinder.

    Comes from comparing with the one-dimensional slab solution; at p = 2 it
    reduces to l^2 / 12.
    """
    if l <= 0.0 or p <= 1.0 or n < 2:
        raise BadParameter("need l > 0, p > 1, n >= 2")
    gamma = (2.0 * p - 1.0) / (p - 1.0)
    return 2.0 * _c_p(p) * (l ** -1.0) * (l / 2.0) ** gamma


def cylinder_perimeter(l: float, n: int, boundary_measure_of_c: float | None = None) -> float:
    """Perimeter 2 l^{-1} + l^{1/(n-1)} H^{n-2}(boundary of C) of the cylinder.

    For n = 2 the cross-section C is a unit segment and the boundary measure
    defaults to 2 (its two endpoints).
    """
    if l <= 0.0 or n < 2:
        raise BadParameter("need l > 0 and n >= 2")
    if boundary_measure_of_c is None:
        if n != 2:
            raise BadParameter("boundary measure of C required for n >= 3")
        boundary_measure_of_c = 2.0
    return 2.0 / l + l ** (1.0 / (n - 1.0)) * boundary_measure_of_c


def torsion_p_ball(p: float, radius: float = 1.0, n: int = 2) -> float:
    """Exact T_p of the n-ball from the radial solution.

    u(r) = (p-1)/p n^{-1/(p-1)} (R^{p/(p-1)} - r^{p/(p-1)}), so for n = 2
    T = 2 pi (p-1)/p 2^{-1/(p-1)} R^{q+2} q / (2 (q+2)).
    """
    if p <= 1.0 or radius <= 0.0:
        raise BadParameter("need p > 1 and radius > 0")
    if n != 2:
        raise BadParameter("only the planar ball is supported")
    q = _q(p)
    coef = 2.0 * math.pi * (p - 1.0) / p * n ** (-1.0 / (p - 1.0))
    return coef * radius ** (q + 2.0) * q / (2.0 * (q + 2.0))


@dataclass(frozen=True)
class RectangleRecord:
    """Exact data for the unit-area rectangle (-1/(2l), 1/(2l)) x (-l/2, l/2)."""

    l: float
    area: float
    perimeter: float
    inradius: float
    width: float
    diameter: float

    def slab_upper(self, p: float) -> float:
        return slab_upper_bound(self.l, p)


def rectangle(l: float):
    """Thinning rectangle of unit area, width l; returns (polygon, record)."""
    if not (0.0 < l < 1.0):
        raise BadParameter(f"rectangle parameter l = {l!r} outside (0, 1)")
    a = 1.0 / (2.0 * l)
    b = l / 2.0
    poly = polygon_from_vertices([(-a, -b), (a, -b), (a, b), (-a, b)])
    rec = RectangleRecord(
        l=l,
        area=1.0,
        perimeter=(2.0 / l) * (1.0 + l * l),
        inradius=l / 2.0,
        width=l,
        diameter=math.hypot(2.0 * a, 2.0 * b),
    )
    return poly, rec


@dataclass(frozen=True)
class TriangleRecord:
    """Exact data for the unit-area isosceles triangle of base 2/l, height l."""

    l: float
    base: float
    area: float
    perimeter: float
    inradius: float
    width: float
    diameter: float
    deficit_floor: float  # P R / area = 2 for triangles forces deficit >= 1/6


def isosceles_triangle(l: float):
    """Unit-area isosceles triangle of height l; returns (polygon, record)."""
    if l <= 0.0:
        raise BadParameter(f"triangle parameter l = {l!r} must be positive")
    base = 2.0 / l
    leg = math.hypot(base / 2.0, l)
    perimeter = base + 2.0 * leg
    poly = polygon_from_vertices([(-base / 2.0, 0.0), (base / 2.0, 0.0), (0.0, l)])
    # minimal width of a triangle is its smallest altitude, 2 area / longest side
    width = 2.0 / max(base, leg)
    rec = TriangleRecord(
        l=l,
        base=base,
        area=1.0,
        perimeter=perimeter,
        inradius=2.0 / perimeter,
        width=width,
        diameter=max(base, leg),
        deficit_floor=1.0 / 6.0,
    )
    return poly, rec


@dataclass(frozen=True)
class StadiumRecord:
    """Exact data for the stadium: hull of two radius-r disks at distance a."""

    r: float
    a: float
    area: float
    perimeter: float
    inradius: float
    width: float


def stadium(r: float, a: float, k: int = 256):
    """Polygonal stadium with k arc points per cap; returns (polygon, record)."""
    if r <= 0.0 or a < 0.0:
        raise BadParameter("need r > 0 and a >= 0")
    if k < 64:
        raise BadParameter(f"need at least 64 arc points per cap, got {k}")
    up = np.linspace(-np.pi / 2.0, np.pi / 2.0, k)
    down = up[::-1]
    right = np.column_stack((a / 2.0 + r * np.cos(up), r * np.sin(up)))
    left = np.column_stack((-a / 2.0 - r * np.cos(down), r * np.sin(down)))
    poly = polygon_from_vertices(np.vstack([right, left]))
    rec = StadiumRecord(
        r=r, a=a,
        area=math.pi * r * r + 2.0 * r * a,
        perimeter=2.0 * math.pi * r + 2.0 * a,
        inradius=r,
        width=2.0 * r,
    )
    return poly, rec


@dataclass(frozen=True)
class DiskRecord:
    """Exact disk data plus the closed-form p-torsion table."""

    radius: float
    k: int
    area: float
    perimeter: float
    inradius: float
    width: float

    def torsion(self, p: float) -> float:
        return torsion_p_ball(p, self.radius)


def disk(radius: float = 1.0, k: int = 256):
    """Regular k-gon inscribed in the disk; returns (polygon, record)."""
    if radius <= 0.0:
        raise BadParameter("need radius > 0")
    if k < 64:
        raise BadParameter(f"need at least 64 vertices, got {k}")
    thetas = np.linspace(0.0, 2.0 * np.pi, k, endpoint=False)
    pts = radius * np.column_stack((np.cos(thetas), np.sin(thetas)))
    poly = ConvexPolygon(pts)
    rec = DiskRecord(
        radius=radius, k=k,
        area=math.pi * radius * radius,
        perimeter=2.0 * math.pi * radius,
        inradius=radius,
        width=2.0 * radius,
    )
    return poly, rec


def stadium_of_width(l: float, k: int = 256):
    """Unit-area stadium of width l (thinning analogue of the rectangle)."""
    if not (0.0 < l < 2.0 / math.sqrt(math.pi)):
        raise BadParameter(f"stadium width l = {l!r} outside (0, 2/sqrt(pi))")
    r = l / 2.0
    a = (1.0 - math.pi * r * r) / (2.0 * r)
    return stadium(r, a, k)


def from_descriptor(desc: dict):
    """Resolve a shape descriptor into (polygon, record or None).

    Accepts {"vertices": [[x, y], ...]} or {"shape": name, ...parameters} with
    names rectangle, triangle, stadium, disk.
    """
    if not isinstance(desc, dict):
        raise BadParameter("shape descriptor must be a JSON object")
    if "vertices" in desc:
        return polygon_from_vertices(np.asarray(desc["vertices"], dtype=float)), None
    name = desc.get("shape")
    if name == "rectangle":
        return rectangle(float(desc["l"]))
    if name == "triangle":
        return isosceles_triangle(float(desc["l"]))
    if name == "stadium":
        return stadium(float(desc["r"]), float(desc["a"]), int(desc.get("k", 256)))
    if name == "disk":
        return disk(float(desc.get("R", 1.0)), int(desc.get("k", 256)))
    raise BadParameter(f"unknown shape descriptor {desc!r}")
