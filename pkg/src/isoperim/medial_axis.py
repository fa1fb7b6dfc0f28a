"""Exact medial axis of a simple polygon, and its graph discretization.

The axis is computed directly from first principles: every medial-axis
edge segment is a piece of the bisector of two boundary elements (edges
or reflex vertices), so we enumerate element pairs, build each pair's
bisector curve exactly (a line, or a parabola for edge/vertex pairs),
and keep only the parameter intervals on which both elements are the
*closest* boundary elements.  Interval endpoints are located by adaptive
sampling plus bisection, which pins them down to ~1e-13 of the domain
scale.  A deterministic micro-perturbation of the input vertices makes
degenerate configurations (ties, four-fold junctions) generic first.

The result keeps exact curves and radius functions, so downstream code
(neck detection, limited reconstruction) can evaluate radii, minima and
arc lengths in closed form.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from scipy.spatial import cKDTree
from shapely.geometry import Point

from .geometry import Region, RegionError

# Interval-endpoint location accuracy, relative to the bbox diagonal.
_T_TOL_REL = 1e-13
# Smallest geometric feature the adaptive sampler resolves, relative.
_FEATURE_REL = 5e-9
# Node clustering radius (escalated if the graph comes out disconnected).
_NODE_TOL_REL = 1e-9
# Safety factor over the Lipschitz bound (|h'| <= 2) in gap liveness tests.
_ALIVE_FACTOR = 2.6

_EDGE = "boundary_edge"
_VERT = "boundary_vertex"


class MedialAxisError(RegionError):
    """Raised when the medial axis cannot be computed or validated."""


@dataclass(frozen=True)
class Governor:
    """One of the two boundary elements equidistant from an axis segment."""

    kind: str  # "boundary_edge" | "boundary_vertex"
    index: int


# ---------------------------------------------------------------------------
# bisector curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineArc:
    """Straight bisector with affine radius (edge/edge pairs).

    point(t) = origin + t*direction, radius(t) = r0 + slope*t.
    """

    origin: np.ndarray
    direction: np.ndarray  # unit
    r0: float
    slope: float

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return self.origin + np.multiply.outer(t, self.direction)

    def radius(self, t):
        return self.r0 + self.slope * np.asarray(t, dtype=float)

    def radius_deriv(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.slope)

    def speed(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def arclength(self, a, b):
        return abs(b - a)

    def t_min_radius(self):
        return None  # affine: no interior extremum


@dataclass(frozen=True)
class HyperbolaArc:
    """Straight bisector of two points with radius sqrt(h^2 + t^2)."""

    origin: np.ndarray  # midpoint of the two governing vertices
    direction: np.ndarray
    half_gap: float

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return self.origin + np.multiply.outer(t, self.direction)

    def radius(self, t):
        t = np.asarray(t, dtype=float)
        return np.hypot(self.half_gap, t)

    def radius_deriv(self, t):
        t = np.asarray(t, dtype=float)
        return t / np.hypot(self.half_gap, t)

    def speed(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def arclength(self, a, b):
        return abs(b - a)

    def t_min_radius(self):
        return 0.0


@dataclass(frozen=True)
class ParabolaArc:
    """Parabolic bisector of a line (directrix) and a point (focus).

    point(s) = vertex + s*u + (s^2 / 4a)*n, radius(s) = a + s^2 / 4a,
    where ``a`` is half the focus-directrix distance, ``u`` runs along
    the directrix and ``n`` points from directrix to focus.
    """

    vertex: np.ndarray
    u: np.ndarray
    n: np.ndarray
    a: float

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return (
            self.vertex
            + np.multiply.outer(s, self.u)
            + np.multiply.outer(s * s / (4.0 * self.a), self.n)
        )

    def radius(self, s):
        s = np.asarray(s, dtype=float)
        return self.a + s * s / (4.0 * self.a)

    def radius_deriv(self, s):
        s = np.asarray(s, dtype=float)
        return s / (2.0 * self.a)

    def speed(self, s):
        s = np.asarray(s, dtype=float)
        return np.hypot(1.0, s / (2.0 * self.a))

    def arclength(self, a, b):
        return abs(self._alen(b) - self._alen(a))

    def _alen(self, s):
        # antiderivative of sqrt(1 + (s/2a)^2)
        q = s / (2.0 * self.a)
        return 0.5 * s * math.hypot(1.0, q) + self.a * math.asinh(q)

    def t_min_radius(self):
        return 0.0


# ---------------------------------------------------------------------------
# boundary elements
# ---------------------------------------------------------------------------


class _Boundary:
    """Vertex/edge soup of one simple polygon with distance queries.

    Elements are indexed 0..n-1 for edges (edge i runs v_i -> v_{i+1})
    followed by one element per reflex vertex.
    """

    def __init__(self, verts: np.ndarray):
        self.verts = verts
        n = len(verts)
        self.n_edges = n
        self.P = verts
        self.Q = np.roll(verts, -1, axis=0)
        d = self.Q - self.P
        self.L = np.hypot(d[:, 0], d[:, 1])
        self.U = d / self.L[:, None]
        prev = np.roll(d, 1, axis=0)
        cross = prev[:, 0] * d[:, 1] - prev[:, 1] * d[:, 0]
        self.reflex_ids = np.flatnonzero(cross < 0.0)  # CCW polygon
        self.reflex_pts = verts[self.reflex_ids]
        self.n_elements = self.n_edges + len(self.reflex_ids)

    def element_governor(self, elem: int) -> Governor:
        if elem < self.n_edges:
            return Governor(_EDGE, elem)
        return Governor(_VERT, int(self.reflex_ids[elem - self.n_edges]))

    def distances(self, pts: np.ndarray) -> np.ndarray:
        """Distance from each point to every element, shape (m, n_elements)."""
        pts = np.atleast_2d(pts)
        rel = pts[:, None, :] - self.P[None, :, :]  # (m, n, 2)
        t = np.einsum("mnk,nk->mn", rel, self.U)
        t = np.clip(t, 0.0, self.L[None, :])
        foot = self.P[None, :, :] + t[:, :, None] * self.U[None, :, :]
        d_edge = np.linalg.norm(pts[:, None, :] - foot, axis=2)
        if len(self.reflex_ids):
            d_vert = np.linalg.norm(pts[:, None, :] - self.reflex_pts[None, :, :], axis=2)
            return np.concatenate([d_edge, d_vert], axis=1)
        return d_edge

    def min_dist_excluding(self, pts: np.ndarray, exclude: tuple[int, ...]) -> np.ndarray:
        d = self.distances(pts)
        d[:, list(exclude)] = np.inf
        return d.min(axis=1)


# ---------------------------------------------------------------------------
# interval algebra for window construction
# ---------------------------------------------------------------------------


def _quad_le_zero(c2: float, c1: float, c0: float) -> list[tuple[float, float]]:
    """Solution intervals of c2*t^2 + c1*t + c0 <= 0 over the reals."""
    inf = math.inf
    if c2 == 0.0:
        if c1 == 0.0:
            return [(-inf, inf)] if c0 <= 0.0 else []
        root = -c0 / c1
        return [(-inf, root)] if c1 > 0.0 else [(root, inf)]
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc <= 0.0:
        if c2 > 0.0:
            return [] if disc < 0.0 else [(-c1 / (2.0 * c2),) * 2]
        return [(-inf, inf)]
    sq = math.sqrt(disc)
    # numerically stable quadratic roots
    q = -0.5 * (c1 + math.copysign(sq, c1)) if c1 != 0.0 else 0.5 * sq
    r1 = q / c2
    r2 = c0 / q if q != 0.0 else 0.0
    lo, hi = (r1, r2) if r1 <= r2 else (r2, r1)
    if c2 > 0.0:
        return [(lo, hi)]
    return [(-inf, lo), (hi, inf)]


def _intersect_intervals(a: list[tuple[float, float]], b: list[tuple[float, float]]):
    out = []
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if lo <= hi:
                out.append((lo, hi))
    return out


class _WindowBuilder:
    """Accumulates polynomial constraints on a curve parameter."""

    def __init__(self):
        self.intervals = [(-math.inf, math.inf)]

    def add_quad_le(self, c2, c1, c0):
        self.intervals = _intersect_intervals(self.intervals, _quad_le_zero(c2, c1, c0))
        return self

    def add_range(self, lo, hi):
        self.intervals = _intersect_intervals(self.intervals, [(lo, hi)])
        return self


def _coord_polys(curve):
    """Coefficients (c0, c1, c2) of each coordinate of curve.point(t)."""
    if isinstance(curve, ParabolaArc):
        c0 = curve.vertex
        c1 = curve.u
        c2 = curve.n / (4.0 * curve.a)
    else:
        c0 = curve.origin
        c1 = curve.direction
        c2 = np.zeros(2)
    return c0, c1, c2


def _clip_curve_windows(curve, boundary: _Boundary, pair, bbox) -> list[tuple[float, float]]:
    """Parameter windows where feet stay on governor segments and the
    curve stays inside the (slightly inflated) polygon bounding box."""
    c0, c1, c2 = _coord_polys(curve)
    w = _WindowBuilder()
    (xmin, ymin, xmax, ymax) = bbox
    w.add_quad_le(-c2[0], -c1[0], xmin - c0[0])  # x >= xmin
    w.add_quad_le(c2[0], c1[0], c0[0] - xmax)
    w.add_quad_le(-c2[1], -c1[1], ymin - c0[1])
    w.add_quad_le(c2[1], c1[1], c0[1] - ymax)
    for elem in pair:
        if elem >= boundary.n_edges:
            continue
        p, u, length = boundary.P[elem], boundary.U[elem], boundary.L[elem]
        f0 = float(np.dot(c0 - p, u))
        f1 = float(np.dot(c1, u))
        f2 = float(np.dot(c2, u))
        w.add_quad_le(-f2, -f1, -f0)  # foot >= 0
        w.add_quad_le(f2, f1, f0 - length)  # foot <= length
        if not w.intervals:
            break
    return [iv for iv in w.intervals if iv[1] - iv[0] > 0.0 and math.isfinite(iv[0]) and math.isfinite(iv[1])]


# ---------------------------------------------------------------------------
# bisector construction per element pair
# ---------------------------------------------------------------------------


def _perp(v):
    return np.array([-v[1], v[0]])


def _bisector_curves(boundary: _Boundary, i: int, j: int, diag: float):
    """All candidate bisector curves of elements i < j (unclipped)."""
    ne = boundary.n_edges
    curves = []
    if i < ne and j < ne:  # edge / edge
        p1, u1 = boundary.P[i], boundary.U[i]
        p2, u2 = boundary.P[j], boundary.U[j]
        cross = u1[0] * u2[1] - u1[1] * u2[0]
        if abs(cross) < 1e-12:
            n = _perp(u1)
            gap = float(np.dot(n, p2 - p1))
            origin = p1 + 0.5 * gap * n
            curves.append(LineArc(origin, u1.copy(), abs(gap) * 0.5, 0.0))
        else:
            # intersection of the supporting lines
            rhs = p2 - p1
            t1 = (rhs[0] * (-u2[1]) - rhs[1] * (-u2[0])) / (-cross)
            o = p1 + t1 * u1
            for b in (u1 + u2, u1 - u2):
                norm = np.linalg.norm(b)
                if norm < 1e-15:
                    continue
                b = b / norm
                slope = abs(u1[0] * b[1] - u1[1] * b[0])
                if slope < 1e-15:
                    continue
                # two rays from the line crossing, each with radius slope*t
                curves.append(LineArc(o, b.copy(), 0.0, slope))
                curves.append(LineArc(o, -b, 0.0, slope))
    elif i >= ne and j >= ne:  # vertex / vertex
        v1 = boundary.reflex_pts[i - ne]
        v2 = boundary.reflex_pts[j - ne]
        gap = v2 - v1
        dist = np.linalg.norm(gap)
        if dist < 1e-15 * diag:
            return []
        mid = 0.5 * (v1 + v2)
        curves.append(HyperbolaArc(mid, _perp(gap / dist), 0.5 * dist))
    else:  # edge / vertex
        e, v = (i, j) if i < ne else (j, i)
        vert = boundary.reflex_pts[v - ne]
        p, u = boundary.P[e], boundary.U[e]
        n = _perp(u)
        off = float(np.dot(n, vert - p))
        if abs(off) < 1e-13 * diag:
            return []  # focus on the directrix: degenerate, never closest
        n_hat = n if off > 0 else -n
        a = 0.5 * abs(off)
        foot = vert - abs(off) * n_hat
        vertex = 0.5 * (vert + foot)
        curves.append(ParabolaArc(vertex, u.copy(), n_hat, a))
    return curves


# ---------------------------------------------------------------------------
# valid-interval extraction
# ---------------------------------------------------------------------------


def _h_samples(curve, ts, boundary, exclude):
    pts = curve.point(ts)
    return boundary.min_dist_excluding(pts, exclude) - curve.radius(ts)


def _adaptive_samples(curve, lo, hi, boundary, exclude, diag, budget=24000):
    """Sample h(t) = clearance-minus-radius densely enough to catch every
    sign change wider than the feature tolerance."""
    feature = _FEATURE_REL * diag
    ts = np.linspace(lo, hi, 49)
    hs = _h_samples(curve, ts, boundary, exclude)
    for _ in range(24):
        gap = np.diff(ts)
        sp = np.maximum(curve.speed(ts[:-1]), curve.speed(ts[1:]))
        arc_gap = gap * sp
        absh = np.abs(hs)
        near = np.minimum(absh[:-1], absh[1:]) <= _ALIVE_FACTOR * arc_gap
        flip = np.signbit(hs[:-1]) != np.signbit(hs[1:])
        alive = (near | flip) & (arc_gap > feature)
        if not alive.any() or len(ts) > budget:
            break
        idx = np.flatnonzero(alive)
        frac = np.linspace(0.0, 1.0, 9)[1:-1]
        new_ts = (ts[idx, None] + gap[idx, None] * frac[None, :]).ravel()
        new_hs = _h_samples(curve, new_ts, boundary, exclude)
        ts = np.concatenate([ts, new_ts])
        hs = np.concatenate([hs, new_hs])
        order = np.argsort(ts, kind="stable")
        ts, hs = ts[order], hs[order]
    return ts, hs


def _bisect_root(curve, t_neg, t_pos, boundary, exclude, tol):
    """Refine a sign change of h; t_neg/t_pos carry the signs of h."""
    for _ in range(80):
        if abs(t_pos - t_neg) <= tol:
            break
        mid = 0.5 * (t_neg + t_pos)
        h = _h_samples(curve, np.array([mid]), boundary, exclude)[0]
        if h >= 0.0:
            t_pos = mid
        else:
            t_neg = mid
    return 0.5 * (t_neg + t_pos)


def _valid_intervals(curve, lo, hi, boundary, exclude, diag, inside):
    """Maximal parameter intervals where the pair is jointly closest."""
    ts, hs = _adaptive_samples(curve, lo, hi, boundary, exclude, diag)
    pos = hs >= 0.0
    tol = _T_TOL_REL * diag / max(1.0, float(np.max(curve.speed(np.array([lo, hi])))))
    # breakpoints at refined sign changes
    cuts = [lo]
    for k in np.flatnonzero(pos[:-1] != pos[1:]):
        if pos[k]:
            root = _bisect_root(curve, ts[k + 1], ts[k], boundary, exclude, tol)
        else:
            root = _bisect_root(curve, ts[k], ts[k + 1], boundary, exclude, tol)
        cuts.append(root)
    cuts.append(hi)
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= tol:
            continue
        sel = pos[(ts > a + tol) & (ts < b - tol)]
        if sel.size and not bool(np.all(sel)):
            continue  # mixed signs would mean a missed crossing; be safe
        if not sel.size or not sel[0]:
            mid_h = _h_samples(curve, np.array([0.5 * (a + b)]), boundary, exclude)[0]
            if mid_h < 0.0:
                continue
        mid = curve.point(np.array([0.5 * (a + b)]))[0]
        if not inside(mid):
            continue
        out.append((a, b))
    return out


# ---------------------------------------------------------------------------
# public data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MASegment:
    """One maximal medial-axis edge segment with its exact curve."""

    kind: str  # "edge_edge" | "vert_vert" | "edge_vert"
    governors: tuple[Governor, Governor]
    curve: LineArc | HyperbolaArc | ParabolaArc
    t_lo: float
    t_hi: float
    node_lo: int
    node_hi: int

    def _t(self, tau):
        return self.t_lo + (self.t_hi - self.t_lo) * np.asarray(tau, dtype=float)

    def point(self, tau):
        """Position at normalized parameter tau in [0, 1]."""
        return self.curve.point(self._t(tau))

    def radius(self, tau):
        """Clearance radius at normalized parameter tau in [0, 1]."""
        return self.curve.radius(self._t(tau))

    @property
    def length(self) -> float:
        return self.curve.arclength(self.t_lo, self.t_hi)

    def radius_range(self) -> tuple[float, float]:
        r = [float(self.curve.radius(self.t_lo)), float(self.curve.radius(self.t_hi))]
        tm = self.curve.t_min_radius()
        if tm is not None and self.t_lo < tm < self.t_hi:
            r.append(float(self.curve.radius(tm)))
        return min(r), max(r)


@dataclass
class MedialAxis:
    """Exact medial axis of one simple polygon (a geometric tree)."""

    polygon: Region  # the (perturbed) polygon the axis belongs to
    segments: list[MASegment]
    node_points: np.ndarray  # (k, 2)
    node_radii: np.ndarray  # (k,)
    boundary: _Boundary = field(repr=False)

    @property
    def inr(self) -> float:
        return float(self.node_radii.max())

    @property
    def inx(self) -> np.ndarray:
        return self.node_points[int(self.node_radii.argmax())]

    def node_segments(self) -> list[list[int]]:
        """Incident segment ids per node."""
        inc: list[list[int]] = [[] for _ in range(len(self.node_points))]
        for sid, seg in enumerate(self.segments):
            inc[seg.node_lo].append(sid)
            inc[seg.node_hi].append(sid)
        return inc


def max_inscribed(ma: MedialAxis) -> tuple[np.ndarray, float]:
    """Center and radius of the largest inscribed circle.

    Ties are impossible on the perturbed polygon; the argmax is unique.
    """
    return ma.inx.copy(), ma.inr


# ---------------------------------------------------------------------------
# medial axis computation
# ---------------------------------------------------------------------------


def _clean_vertices(verts: np.ndarray, diag: float) -> np.ndarray:
    """Drop repeated and exactly collinear consecutive vertices."""
    out = []
    n = len(verts)
    for k in range(n):
        a = verts[(k - 1) % n]
        b = verts[k]
        c = verts[(k + 1) % n]
        if np.hypot(*(b - a)) <= 1e-15 * diag:
            continue
        cross = (b - a)[0] * (c - b)[1] - (b - a)[1] * (c - b)[0]
        if cross == 0.0 and np.dot(b - a, c - b) > 0.0:
            continue
        out.append(b)
    return np.asarray(out)


def _perturb(verts: np.ndarray, rel: float, diag: float) -> np.ndarray:
    if rel <= 0:
        return verts
    digest = hashlib.sha256(np.ascontiguousarray(verts).tobytes()).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    return verts + rng.uniform(-1.0, 1.0, verts.shape) * (rel * diag)


def _single_ring(region: Region) -> np.ndarray:
    if region.is_empty or len(region) != 1:
        raise MedialAxisError("medial axis needs exactly one polygon")
    (outer, holes), = region.rings()
    if holes:
        raise MedialAxisError("holes unsupported: medial axis input must be hole-free")
    return outer


def compute_medial_axis(
    region: Region,
    *,
    perturbation_rel: float = 1e-7,
    validate: bool = True,
) -> MedialAxis:
    """Compute the exact medial axis of a hole-free simple polygon.

    The polygon vertices receive a deterministic pseudo-random perturbation
    of ``perturbation_rel`` times the bbox diagonal (seeded from the input
    coordinates) so that the axis is generic: the largest inscribed circle
    is unique and all junctions are trivalent.  The returned axis refers to
    the perturbed polygon, available as ``MedialAxis.polygon``.
    """
    raw = _single_ring(region)
    x0, y0, x1, y1 = region.bounds
    diag = math.hypot(x1 - x0, y1 - y0)
    verts = _clean_vertices(raw, diag)
    if len(verts) < 3:
        raise MedialAxisError("degenerate polygon: fewer than 3 usable vertices")
    for shrink in (1.0, 0.1, 0.01, 0.0):
        cand = _perturb(verts, perturbation_rel * shrink, diag)
        poly = shapely.geometry.Polygon(cand)
        if poly.is_valid and poly.area > 0:
            verts = cand
            break
    else:  # pragma: no cover - unperturbed input is valid by construction
        raise MedialAxisError("could not perturb polygon into a valid shape")

    polygon = Region(shapely.geometry.Polygon(verts))
    (verts,) = [v for v, _ in polygon.rings()]  # normalized CCW copy
    boundary = _Boundary(verts)
    prepared = shapely.prepared.prep(polygon.geom)

    def inside(pt) -> bool:
        return prepared.contains(Point(pt))

    bbox = (x0 - 1e-9 * diag, y0 - 1e-9 * diag, x1 + 1e-9 * diag, y1 + 1e-9 * diag)
    arcs = []  # (elem_i, elem_j, curve, lo, hi)
    ne = boundary.n_edges
    for i in range(boundary.n_elements):
        for j in range(i + 1, boundary.n_elements):
            if j >= ne:
                # skip (edge, its own endpoint): their bisector is 2D
                vid = int(boundary.reflex_ids[j - ne])
                if i < ne and i in ((vid - 1) % ne, vid):
                    continue
            exclude = (i, j)
            for curve in _bisector_curves(boundary, i, j, diag):
                for lo, hi in _clip_curve_windows(curve, boundary, (i, j), bbox):
                    for a, b in _valid_intervals(curve, lo, hi, boundary, exclude, diag, inside):
                        arcs.append((i, j, curve, a, b))

    if not arcs:
        raise MedialAxisError("no medial-axis segments found (degenerate input?)")
    return _assemble(polygon, boundary, arcs, diag, validate)


def _assemble(polygon, boundary, arcs, diag, validate) -> MedialAxis:
    ends = np.array(
        [c.point(np.array([a, b])) for (_, _, c, a, b) in arcs]
    ).reshape(-1, 2)
    end_radii = np.array(
        [c.radius(np.array([a, b])) for (_, _, c, a, b) in arcs]
    ).reshape(-1)

    tol = _NODE_TOL_REL * diag
    for _ in range(6):
        labels = _cluster(ends, tol)
        if _connected(arcs, labels):
            break
        tol *= 10.0
    else:
        raise MedialAxisError("medial axis graph is disconnected")

    n_nodes = labels.max() + 1
    pts = np.zeros((n_nodes, 2))
    rad = np.zeros(n_nodes)
    cnt = np.zeros(n_nodes)
    np.add.at(pts, labels, ends)
    np.add.at(rad, labels, end_radii)
    np.add.at(cnt, labels, 1.0)
    pts /= cnt[:, None]
    rad /= cnt

    segments = []
    for k, (i, j, curve, a, b) in enumerate(arcs):
        lo_id, hi_id = int(labels[2 * k]), int(labels[2 * k + 1])
        if lo_id == hi_id and curve.arclength(a, b) < 4.0 * tol:
            continue  # collapsed micro-arc inside one node cluster
        g = (boundary.element_governor(i), boundary.element_governor(j))
        kind = {
            (True, True): "edge_edge",
            (True, False): "edge_vert",
            (False, False): "vert_vert",
        }[(g[0].kind == _EDGE, g[1].kind == _EDGE)]
        segments.append(MASegment(kind, g, curve, a, b, lo_id, hi_id))
    if not segments:
        raise MedialAxisError("all medial-axis segments collapsed")

    keep = sorted({s.node_lo for s in segments} | {s.node_hi for s in segments})
    remap = {old: new for new, old in enumerate(keep)}
    segments = [
        MASegment(s.kind, s.governors, s.curve, s.t_lo, s.t_hi,
                  remap[s.node_lo], remap[s.node_hi])
        for s in segments
    ]
    ma = MedialAxis(polygon, segments, pts[keep], rad[keep], boundary)
    if validate:
        _validate(ma, diag)
    return ma


def _cluster(pts: np.ndarray, tol: float) -> np.ndarray:
    parent = np.arange(len(pts))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tree = cKDTree(pts)
    for a, b in tree.query_pairs(tol):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    roots = np.array([find(k) for k in range(len(pts))])
    _, labels = np.unique(roots, return_inverse=True)
    return labels


def _connected(arcs, labels) -> bool:
    n = labels.max() + 1
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for k in range(len(arcs)):
        ra, rb = find(labels[2 * k]), find(labels[2 * k + 1])
        if ra != rb:
            parent[rb] = ra
    return len({find(k) for k in range(n)}) == 1


def _validate(ma: MedialAxis, diag: float, n_samples: int = 100) -> None:
    rng = np.random.default_rng(0)
    bnd = ma.polygon.geom.boundary
    for _ in range(n_samples):
        seg = ma.segments[rng.integers(len(ma.segments))]
        tau = rng.uniform()
        pt = seg.point(tau)
        r = float(seg.radius(tau))
        true = bnd.distance(Point(pt))
        if abs(true - r) > 1e-7 * diag:
            raise MedialAxisError(
                f"radius self-check failed: |{r:.12g} - {true:.12g}| at {pt}"
            )


# ---------------------------------------------------------------------------
# graph discretization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscretizationParams:
    """Sampling rule for turning the exact axis into a graph.

    ``d_c`` caps the inverse-radius change per graph edge, ``r_l`` truncates
    the axis below that radius, and ``s_max`` caps the arc-length spacing
    (the inverse-radius rule alone leaves constant-radius stretches
    unsampled).
    """

    d_c: float
    r_l: float
    s_max: float

    def __post_init__(self):
        if not (self.d_c > 0):
            raise ValueError("d_c must be positive")
        if not (self.r_l >= 0):
            raise ValueError("r_l must be non-negative")
        if not (self.s_max > 0):
            raise ValueError("s_max must be positive")


@dataclass(frozen=True)
class GraphEdge:
    a: int
    b: int
    segment: int
    t_a: float
    t_b: float


@dataclass
class MedialAxisGraph:
    """Discretized medial axis: nodes carry (position, radius)."""

    points: np.ndarray  # (m, 2)
    radii: np.ndarray  # (m,)
    edges: list[GraphEdge]
    axis: MedialAxis

    @property
    def inr(self) -> float:
        return float(self.radii.max())

    @property
    def inx_node(self) -> int:
        return int(self.radii.argmax())

    @property
    def inx(self) -> np.ndarray:
        return self.points[self.inx_node]

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per node: list of (edge id, opposite node id)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(len(self.points))]
        for eid, e in enumerate(self.edges):
            adj[e.a].append((eid, e.b))
            adj[e.b].append((eid, e.a))
        return adj


def _t_at_radius(curve, ta, tb, target):
    """Parameter in [ta, tb] (radius monotone there) with given radius."""
    ra = float(curve.radius(ta))
    rb = float(curve.radius(tb))
    lo, hi = (ta, tb) if ra <= rb else (tb, ta)
    rlo = min(ra, rb)
    rhi = max(ra, rb)
    if target <= rlo:
        return lo
    if target >= rhi:
        return hi
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if float(curve.radius(mid)) < target:
            lo = mid
        else:
            hi = mid
        if abs(hi - lo) < 1e-16 * (abs(ta) + abs(tb) + 1.0):
            break
    return 0.5 * (lo + hi)


def _t_at_arclength(curve, ta, tb, target):
    lo, hi = ta, tb
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if curve.arclength(ta, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _monotone_pieces(seg: MASegment):
    tm = seg.curve.t_min_radius()
    if tm is not None and seg.t_lo < tm < seg.t_hi:
        return [(seg.t_lo, tm), (tm, seg.t_hi)]
    return [(seg.t_lo, seg.t_hi)]


def discretize(ma: MedialAxis, params: DiscretizationParams) -> MedialAxisGraph:
    """Sample the exact axis into a graph obeying the spacing rules.

    Every graph edge satisfies |1/r(a) - 1/r(b)| <= d_c and has arc length
    at most s_max; nodes with radius below r_l are cut away, with cut nodes
    landing exactly at radius r_l.  The inverse-radius ladder is floored at
    1e-6 of the maximum radius, so r_l = 0 keeps leaf nodes but relaxes the
    d_c rule on the final step toward zero-radius leaves.
    """
    inr = ma.inr
    if params.r_l > inr:
        raise ValueError(f"r_l={params.r_l} exceeds the maximum inscribed radius {inr}")
    floor = max(params.r_l, 1e-6 * inr)

    points: list[np.ndarray] = [p for p in ma.node_points]
    radii: list[float] = [float(r) for r in ma.node_radii]
    edges: list[GraphEdge] = []

    def new_node(pt, r):
        points.append(np.asarray(pt, dtype=float))
        radii.append(float(r))
        return len(points) - 1

    for sid, seg in enumerate(ma.segments):
        for ta, tb in _monotone_pieces(seg):
            ra, rb = float(seg.curve.radius(ta)), float(seg.curve.radius(tb))
            if max(ra, rb) < params.r_l:
                continue
            # clip the low-radius end to exactly r_l
            cut_a = cut_b = False
            if min(ra, rb) < params.r_l:
                if ra < rb:
                    ta, cut_a = _t_at_radius(seg.curve, ta, tb, params.r_l), True
                    ra = params.r_l
                else:
                    tb, cut_b = _t_at_radius(seg.curve, ta, tb, params.r_l), True
                    rb = params.r_l
            if tb <= ta:
                continue
            knots = _ladder(seg.curve, ta, tb, max(ra, floor * 0.0 + 1e-300), rb, params, floor)
            # resolve endpoint node ids
            ids = []
            for k, t in enumerate(knots):
                if k == 0:
                    if not cut_a and t == seg.t_lo:
                        ids.append(seg.node_lo)
                        continue
                elif k == len(knots) - 1:
                    if not cut_b and t == seg.t_hi:
                        ids.append(seg.node_hi)
                        continue
                ids.append(new_node(seg.curve.point(t), seg.curve.radius(t)))
            for (t0, t1, n0, n1) in zip(knots[:-1], knots[1:], ids[:-1], ids[1:]):
                if n0 != n1:
                    edges.append(GraphEdge(n0, n1, sid, float(t0), float(t1)))

    used = sorted({e.a for e in edges} | {e.b for e in edges})
    if not used:
        # r_l == inr: the graph degenerates to the single deepest node
        top = int(np.argmax(radii))
        return MedialAxisGraph(
            np.asarray([points[top]]), np.asarray([radii[top]]), [], ma
        )
    remap = {old: new for new, old in enumerate(used)}
    pts = np.asarray([points[k] for k in used])
    rad = np.asarray([radii[k] for k in used])
    edges = [GraphEdge(remap[e.a], remap[e.b], e.segment, e.t_a, e.t_b) for e in edges]
    return MedialAxisGraph(pts, rad, edges, ma)


def _ladder(curve, ta, tb, ra, rb, params: DiscretizationParams, floor: float):
    """Knot parameters along one monotone piece: first the inverse-radius
    ladder, then arc-length refinement."""
    ua = 1.0 / max(ra, floor)
    ub = 1.0 / max(rb, floor)
    steps = max(1, int(math.ceil(abs(ub - ua) / params.d_c)))
    knots = [ta]
    for k in range(1, steps):
        u = ua + (ub - ua) * (k / steps)
        knots.append(_t_at_radius(curve, ta, tb, 1.0 / u))
    knots.append(tb)
    knots = sorted(set(knots)) if knots[0] < knots[-1] else sorted(set(knots))
    refined = [knots[0]]
    for t0, t1 in zip(knots[:-1], knots[1:]):
        alen = curve.arclength(t0, t1)
        if alen > params.s_max:
            extra = int(math.ceil(alen / params.s_max))
            for k in range(1, extra):
                refined.append(_t_at_arclength(curve, t0, t1, alen * k / extra))
        refined.append(t1)
    return refined


# ---------------------------------------------------------------------------
# debug export
# ---------------------------------------------------------------------------


def axis_to_csv(ma: MedialAxis, path) -> None:
    """Dump the exact segments as a CSV line/parabola soup for plotting."""
    with open(path, "w") as f:
        f.write("segment,kind,gov0_kind,gov0_index,gov1_kind,gov1_index,"
                "x0,y0,r0,x1,y1,r1\n")
        for sid, seg in enumerate(ma.segments):
            p0 = seg.point(0.0)
            p1 = seg.point(1.0)
            g0, g1 = seg.governors
            f.write(
                f"{sid},{seg.kind},{g0.kind},{g0.index},{g1.kind},{g1.index},"
                f"{p0[0]:.17g},{p0[1]:.17g},{float(seg.radius(0.0)):.17g},"
                f"{p1[0]:.17g},{p1[1]:.17g},{float(seg.radius(1.0)):.17g}\n"
            )
