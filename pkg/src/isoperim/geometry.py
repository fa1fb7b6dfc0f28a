"""Planar regions and disk-based morphology.

A :class:`Region` is an immutable set of disjoint simple polygons, each
possibly carrying holes.  All heavy polygon arithmetic (booleans, offsets)
is delegated to Shapely/GEOS; this module pins down the conventions the
rest of the package relies on: orientation (CCW shells, CW holes), sliver
pruning, snap rounding during booleans, and controlled linearization of
circular arcs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
import shapely
from shapely.geometry import MultiPolygon, Polygon
from shapely.geometry.polygon import orient


class RegionError(ValueError):
    """Raised when input geometry violates the Region invariants."""


# Relative area below which boolean by-products (components or holes) are
# treated as numerical slivers and dropped.
SLIVER_REL_AREA = 1e-12

# Relative snap grid (fraction of the bounding-box diagonal) used during
# boolean operations.
SNAP_REL = 1e-9


@dataclass(frozen=True)
class LinearizationParams:
    """Controls how circular arcs are flattened to polylines.

    ``d_x`` is the maximum chord length of any generated arc edge; arc
    endpoints are always emitted exactly.
    """

    d_x: float

    def __post_init__(self):
        if not (math.isfinite(self.d_x) and self.d_x > 0):
            raise ValueError(f"d_x must be positive and finite, got {self.d_x}")

    def max_angle(self, radius: float) -> float:
        """Largest arc angle whose chord at ``radius`` stays below d_x."""
        if radius <= 0:
            return math.pi / 2
        return 2.0 * math.asin(min(1.0, self.d_x / (2.0 * radius)))

    def quad_segs(self, radius: float) -> int:
        """Number of segments per quarter circle for Shapely buffers."""
        if radius <= 0:
            return 4
        return max(2, int(math.ceil((0.5 * math.pi) / self.max_angle(radius))))

    def arc_points(self, center, radius: float, start_angle: float, sweep: float) -> np.ndarray:
        """Points along a circular arc, endpoints included exactly.

        ``sweep`` is signed (positive = counterclockwise).
        """
        cx, cy = float(center[0]), float(center[1])
        if radius <= 0 or sweep == 0.0:
            ang = np.array([start_angle, start_angle + sweep])
        else:
            n = max(1, int(math.ceil(abs(sweep) / self.max_angle(radius))))
            ang = start_angle + sweep * np.linspace(0.0, 1.0, n + 1)
        return np.column_stack((cx + radius * np.cos(ang), cy + radius * np.sin(ang)))


class Region:
    """Immutable planar region: disjoint simple polygons with holes.

    Invariants (enforced on construction): shells are CCW and pairwise
    interior-disjoint, holes are CW and strictly inside their shell,
    components/holes smaller than ``SLIVER_REL_AREA`` of the total area
    are pruned.
    """

    __slots__ = ("_geom",)

    def __init__(self, geom, *, validate: bool = True):
        self._geom = _normalize(geom, validate=validate)

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_vertices(cls, outer, holes: Iterable = ()) -> "Region":
        """Build a single-polygon region from vertex arrays."""
        shell = np.asarray(outer, dtype=float)
        if shell.ndim != 2 or shell.shape[1] != 2 or shell.shape[0] < 3:
            raise RegionError("outer ring needs at least 3 (x, y) vertices")
        if not np.all(np.isfinite(shell)):
            raise RegionError("vertex coordinates must be finite")
        poly = Polygon(shell, [np.asarray(h, dtype=float) for h in holes])
        return cls(poly)

    @classmethod
    def empty(cls) -> "Region":
        return cls(MultiPolygon([]))

    # -- basic properties ------------------------------------------------

    @property
    def geom(self) -> MultiPolygon:
        """The underlying Shapely geometry (do not mutate)."""
        return self._geom

    @property
    def is_empty(self) -> bool:
        return self._geom.is_empty

    @property
    def area(self) -> float:
        return self._geom.area

    @property
    def perimeter(self) -> float:
        """Total boundary length, hole boundaries included."""
        return self._geom.length

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return self._geom.bounds

    @property
    def bbox_diagonal(self) -> float:
        if self.is_empty:
            return 0.0
        x0, y0, x1, y1 = self.bounds
        return math.hypot(x1 - x0, y1 - y0)

    def __len__(self) -> int:
        return len(self._geom.geoms)

    def rings(self) -> Iterator[tuple[np.ndarray, list[np.ndarray]]]:
        """Yield ``(outer, holes)`` vertex arrays (closing vertex dropped)."""
        for poly in self._geom.geoms:
            outer = np.asarray(poly.exterior.coords)[:-1]
            holes = [np.asarray(r.coords)[:-1] for r in poly.interiors]
            yield outer, holes

    def __repr__(self) -> str:
        return f"Region(polygons={len(self)}, area={self.area:.6g})"


def _normalize(geom, *, validate: bool) -> MultiPolygon:
    if isinstance(geom, Region):
        return geom.geom
    if geom is None or geom.is_empty:
        return MultiPolygon([])
    geom = _polygonal_part(geom)
    if geom.is_empty:
        return MultiPolygon([])
    if validate and not geom.is_valid:
        raise RegionError(f"invalid polygon geometry: {shapely.is_valid_reason(geom)}")
    polys = [geom] if isinstance(geom, Polygon) else list(geom.geoms)
    total = sum(p.area for p in polys)
    cutoff = SLIVER_REL_AREA * total
    kept = []
    for p in polys:
        if p.area <= cutoff:
            continue
        shell = p.exterior
        holes = [h for h in p.interiors if Polygon(h).area > cutoff]
        kept.append(orient(Polygon(shell, holes), sign=1.0))
    return MultiPolygon(kept)


def _polygonal_part(geom):
    """Strip non-areal pieces that GEOS overlays occasionally emit."""
    if isinstance(geom, (Polygon, MultiPolygon)):
        return geom
    if geom.geom_type == "GeometryCollection":
        polys = [g for g in geom.geoms if isinstance(g, (Polygon, MultiPolygon))]
        return shapely.unary_union(polys) if polys else MultiPolygon([])
    return MultiPolygon([])


# -- measurement --------------------------------------------------------


def area(region: Region) -> float:
    return region.area


def perimeter(region: Region) -> float:
    return region.perimeter


def symmetric_difference_area(a: Region, b: Region) -> float:
    """Area of the symmetric difference, computed without snap rounding."""
    return a.geom.symmetric_difference(b.geom).area


def outside_area(a: Region, b: Region) -> float:
    """Area of ``a`` not covered by ``b`` (containment check helper)."""
    return a.geom.difference(b.geom).area


# -- booleans ------------------------------------------------------------

_BOOL_OPS = ("union", "intersection", "difference")


def _snap_grid(*regions: Region) -> float:
    diag = max((r.bbox_diagonal for r in regions), default=0.0)
    return SNAP_REL * diag


def boolean(op: str, a: Region, b: Region, *, snap: bool = True) -> Region:
    """Boolean combination of two regions.

    Snap rounding at ``SNAP_REL`` of the bounding-box diagonal guards the
    overlay against near-degenerate input; pass ``snap=False`` for exact
    floating-point overlays (used by measurement code).
    """
    if op not in _BOOL_OPS:
        raise ValueError(f"unknown boolean op {op!r}, expected one of {_BOOL_OPS}")
    grid = _snap_grid(a, b) if snap else None
    if grid:
        out = getattr(shapely, op)(a.geom, b.geom, grid_size=grid)
    else:
        out = getattr(shapely, op)(a.geom, b.geom)
    if not out.is_valid:
        out = shapely.make_valid(out)
    return Region(out, validate=False)


def union(a: Region, b: Region, *, snap: bool = True) -> Region:
    return boolean("union", a, b, snap=snap)


def intersection(a: Region, b: Region, *, snap: bool = True) -> Region:
    return boolean("intersection", a, b, snap=snap)


def difference(a: Region, b: Region, *, snap: bool = True) -> Region:
    return boolean("difference", a, b, snap=snap)


def union_all(regions: Iterable[Region]) -> Region:
    """Union of many regions (single GEOS cascade, order independent)."""
    geoms = [r.geom for r in regions if not r.is_empty]
    if not geoms:
        return Region.empty()
    out = shapely.unary_union(geoms)
    if not out.is_valid:
        out = shapely.make_valid(out)
    return Region(out, validate=False)


# -- morphology ----------------------------------------------------------


def _check_radius(rad: float) -> None:
    if not (math.isfinite(rad) and rad >= 0):
        raise ValueError(f"morphology radius must be >= 0, got {rad}")


def dilation(region: Region, rad: float, lin: LinearizationParams) -> Region:
    """Minkowski sum with a disk of radius ``rad`` (arcs linearized)."""
    _check_radius(rad)
    if rad == 0 or region.is_empty:
        return region
    return Region(region.geom.buffer(rad, quad_segs=lin.quad_segs(rad)), validate=False)


def erosion(region: Region, rad: float, lin: LinearizationParams) -> Region:
    """Locus of disk centers whose ``rad``-disk fits inside the region."""
    _check_radius(rad)
    if rad == 0 or region.is_empty:
        return region
    return Region(region.geom.buffer(-rad, quad_segs=lin.quad_segs(rad)), validate=False)


def opening(region: Region, rad: float, lin: LinearizationParams) -> Region:
    """Erosion followed by dilation; removes features thinner than 2*rad."""
    return dilation(erosion(region, rad, lin), rad, lin)


def closing(region: Region, rad: float, lin: LinearizationParams) -> Region:
    """Dilation followed by erosion; fills notches narrower than 2*rad."""
    return erosion(dilation(region, rad, lin), rad, lin)


def connected_components(region: Region) -> list[Region]:
    """Split a region into its connected components (one per shell)."""
    return [Region(poly, validate=False) for poly in region.geom.geoms]


def remove_holes(region: Region) -> Region:
    """Drop every hole ring; area never decreases, perimeter never grows."""
    if region.is_empty:
        return region
    solid = MultiPolygon([Polygon(p.exterior) for p in region.geom.geoms])
    # Filling holes can merge previously separate shells' containment; the
    # shells themselves stay disjoint, so no union pass is needed.
    return Region(solid, validate=False)


def disk_region(center, radius: float, lin: LinearizationParams) -> Region:
    """Polygonal (inscribed) disk with chords at most d_x."""
    _check_radius(radius)
    if radius == 0:
        return Region.empty()
    pts = lin.arc_points(center, radius, 0.0, 2.0 * math.pi)[:-1]
    return Region(Polygon(pts), validate=False)
