"""Planar primitives on closed polylines.

Everything here works on the closed polyline through ``loop.points``
(an ``(N, 2)`` array, last vertex joined back to the first).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .curves import SampledLoop

TWO_PI = 2.0 * math.pi

#: relative tolerance for collinearity/tangency and the on-curve guard
REL_GEOM_TOL = 1e-12


class GeometryError(ValueError):
    """Raised when a geometric predicate is undefined for its input."""


def normalize_angle(t):
    """Map an angle (or array of angles) into ``[0, 2*pi)``."""
    t = np.mod(t, TWO_PI)
    # np.mod can round up to exactly 2*pi for tiny negative inputs
    t = np.where(t >= TWO_PI, 0.0, t)
    return float(t) if t.ndim == 0 else t


def angular_distance(a, b):
    """Intrinsic distance on the unit circle, in ``[0, pi]``."""
    d = np.abs(np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI))
    d = np.minimum(d, TWO_PI - d)
    return float(d) if d.ndim == 0 else d


def bbox_diagonal(points: np.ndarray) -> float:
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    return float(np.hypot(*(hi - lo)))


def geom_tol(points: np.ndarray) -> float:
    return REL_GEOM_TOL * max(bbox_diagonal(points), 1e-300)


def _edges(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return points, np.roll(points, -1, axis=0)


@dataclass(frozen=True)
class Segment:
    p: tuple[float, float]
    q: tuple[float, float]

    def __post_init__(self):
        if not (np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.q))):
            raise GeometryError("segment endpoints must be finite")

    @property
    def degenerate(self) -> bool:
        return self.p[0] == self.q[0] and self.p[1] == self.q[1]

    @property
    def length(self) -> float:
        return math.hypot(self.q[0] - self.p[0], self.q[1] - self.p[1])


def segment_curve_hits(s: Segment, loop: SampledLoop, exclusion: float = 0.0) -> list[np.ndarray]:
    """Intersection points of segment ``s`` with the closed polyline of ``loop``.

    Transversal crossings, tangential touches and collinear overlaps all count
    (an overlap contributes its two extreme points).  Hits closer than
    ``exclusion`` to either endpoint of ``s`` are dropped.  Points are returned
    in order of increasing position along ``s``.
    """
    if s.degenerate:
        raise GeometryError("degenerate segment")
    if exclusion < 0:
        raise ValueError("exclusion must be >= 0")
    pts = loop.points
    tol = geom_tol(pts)
    p = np.asarray(s.p, dtype=float)
    d = np.asarray(s.q, dtype=float) - p
    a, b = _edges(pts)
    e = b - a
    w = a - p
    denom = d[0] * e[:, 1] - d[1] * e[:, 0]
    # signed distances of edge endpoints from the supporting line of s
    dlen = math.hypot(*d)
    da = (d[0] * w[:, 1] - d[1] * w[:, 0]) / dlen
    db = (d[0] * (b - p)[:, 1] - d[1] * (b - p)[:, 0]) / dlen

    params: list[float] = []
    # proper and touching crossings
    cross = (np.minimum(da, db) <= tol) & (np.maximum(da, db) >= -tol) & (np.abs(denom) > 0)
    colin = (np.abs(da) <= tol) & (np.abs(db) <= tol)
    cross &= ~colin
    idx = np.nonzero(cross)[0]
    if idx.size:
        # parameter along s of the crossing point
        # near-parallel edges overflow to inf and fail the range test below
        with np.errstate(over="ignore"):
            lam = (w[idx, 0] * e[idx, 1] - w[idx, 1] * e[idx, 0]) / denom[idx]
            mu = (w[idx, 0] * d[1] - w[idx, 1] * d[0]) / denom[idx]
        ttol = tol / dlen
        etol = tol / np.maximum(np.hypot(e[idx, 0], e[idx, 1]), 1e-300)
        ok = (lam >= -ttol) & (lam <= 1 + ttol) & (mu >= -etol) & (mu <= 1 + etol)
        params.extend(np.clip(lam[ok], 0.0, 1.0).tolist())
    idx = np.nonzero(colin)[0]
    if idx.size:
        ta = (w[idx] @ d) / (dlen * dlen)
        tb = ((b[idx] - p) @ d) / (dlen * dlen)
        lo = np.maximum(np.minimum(ta, tb), 0.0)
        hi = np.minimum(np.maximum(ta, tb), 1.0)
        ok = lo <= hi
        params.extend(lo[ok].tolist())
        params.extend(hi[ok].tolist())
    if not params:
        return []
    lam = np.unique(np.asarray(params))
    along = lam * dlen
    keep = (along > exclusion) & (dlen - along > exclusion) if exclusion > 0 else np.ones_like(lam, bool)
    lam = lam[keep]
    return [p + t * d for t in lam]


def distance_to_polyline(z: np.ndarray, points: np.ndarray) -> float:
    a, b = _edges(points)
    e = b - a
    ee = np.einsum("ij,ij->i", e, e)
    t = np.clip(np.einsum("ij,ij->i", z - a, e) / np.where(ee > 0, ee, 1.0), 0.0, 1.0)
    proj = a + t[:, None] * e
    return float(np.min(np.hypot(*(proj - z).T)))


def winding_number(loop: SampledLoop, z) -> int:
    """Winding index of the loop around ``z`` by angle summation."""
    pts = loop.points
    z = np.asarray(z, dtype=float)
    if distance_to_polyline(z, pts) <= geom_tol(pts):
        raise GeometryError("point on curve")
    return winding_of_points(pts, z)


def winding_of_points(pts: np.ndarray, z: np.ndarray) -> int:
    v = pts - z
    w = np.roll(v, -1, axis=0)
    cross = v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]
    dot = np.einsum("ij,ij->i", v, w)
    total = np.arctan2(cross, dot).sum() / TWO_PI
    k = round(total)
    if abs(total - k) >= 0.25:
        raise GeometryError("ill-conditioned winding")
    return int(k)


@dataclass
class NearestSet:
    distance: float
    points: list[np.ndarray] = field(default_factory=list)
    bearings: list[float] = field(default_factory=list)
    #: fractional parameter positions ``edge_index + s`` of each point
    positions: list[float] = field(default_factory=list)


def nearest_on_curve(z, loop: SampledLoop, slack: float = 0.02) -> NearestSet:
    """All local nearest points of the polyline to ``z`` within ``d*(1+slack)``.

    A candidate is a local minimum of the distance along the polyline: the
    interior foot point of an edge, or a vertex where both incident edges clamp
    to it.  Candidates closer than ``d*slack`` or one edge length to each
    other are merged.
    """
    if slack < 0:
        raise ValueError("slack must be >= 0")
    pts = loop.points
    z = np.asarray(z, dtype=float)
    n = len(pts)
    a, b = _edges(pts)
    e = b - a
    ee = np.einsum("ij,ij->i", e, e)
    s = np.einsum("ij,ij->i", z - a, e) / np.where(ee > 0, ee, 1.0)
    s = np.clip(s, 0.0, 1.0)
    foot = a + s[:, None] * e
    dist = np.hypot(*(foot - z).T)
    dmin = float(dist.min())

    at_start = s <= 0.0
    at_end = s >= 1.0
    interior = ~(at_start | at_end)
    # vertex i is a local minimum when edge i-1 clamps at its end and edge i at its start
    vertex_min = at_start & np.roll(at_end, 1)
    cand = np.nonzero((interior | vertex_min) & (dist <= dmin * (1.0 + slack)))[0]
    if dmin == 0.0:
        cand = np.nonzero(dist == 0.0)[0]

    order = np.argsort(dist[cand], kind="stable")
    # feet on the two edges beside one vertex are a single tangency
    merge_r = max(dmin * slack, 1.000001 * float(np.hypot(*e.T).max()))
    chosen: list[int] = []
    for k in cand[order]:
        if any(np.hypot(*(foot[k] - foot[j])) < merge_r for j in chosen):
            continue
        chosen.append(int(k))
    chosen.sort(key=lambda k: (k + s[k]) % n)
    out = NearestSet(distance=dmin)
    for k in chosen:
        out.points.append(foot[k].copy())
        dv = foot[k] - z
        out.bearings.append(float(normalize_angle(math.atan2(dv[1], dv[0]))))
        out.positions.append(float(k + s[k]))
    return out
