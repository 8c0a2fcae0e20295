"""Complement of a curve image: raster components, winding indices, good disks,
good chords, ruled sequences, positivity and the local wind relation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from . import _kernels

from .curves import SampledLoop
from .geometry import (
    TWO_PI,
    GeometryError,
    angular_distance,
    distance_to_polyline,
    nearest_on_curve,
    normalize_angle,
    winding_of_points,
)

log = logging.getLogger(__name__)

MIN_RESOLUTION = 64
BAND = 0
#: ray directions cast from a curve point when collecting adjacent components
RAYS = 256


class ComplementError(ValueError):
    pass


def densify_polyline(points: np.ndarray, spacing: float) -> np.ndarray:
    """Points along the closed polyline with consecutive gaps at most ``spacing``."""
    a = points
    b = np.roll(points, -1, axis=0)
    seg = np.hypot(*(b - a).T)
    m = np.maximum(1, np.ceil(seg / spacing).astype(int))
    idx = np.repeat(np.arange(len(a)), m)
    start = np.cumsum(m) - m
    fr = (np.arange(m.sum()) - np.repeat(start, m)) / np.repeat(m, m)
    return a[idx] + fr[:, None] * (b - a)[idx]


@dataclass(eq=False)
class ComponentMap:
    """Labelled raster of the plane minus a thickened curve image.

    ``grid[i, j]`` is the label of the cell whose centre is
    ``origin + ((j + 0.5) * cell, (i + 0.5) * cell)``; label 0 is the band
    around the curve.
    """

    grid: np.ndarray
    origin: np.ndarray
    cell: float
    index: dict[int, int]
    unbounded_id: int
    sizes: dict[int, int]
    seeds: dict[int, np.ndarray]
    band_radius: float
    depth: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False, default=None)

    @property
    def resolution(self) -> int:
        return self.grid.shape[0]

    @property
    def ids(self) -> list[int]:
        return sorted(self.index)

    @property
    def bounded_ids(self) -> list[int]:
        return [c for c in self.ids if c != self.unbounded_id]

    def cell_centers(self, rows, cols) -> np.ndarray:
        rows = np.asarray(rows)
        cols = np.asarray(cols)
        return np.stack(
            [self.origin[0] + (cols + 0.5) * self.cell, self.origin[1] + (rows + 0.5) * self.cell], axis=-1
        )

    def cell_of(self, z) -> tuple[int, int]:
        z = np.asarray(z, float)
        j = int(np.floor((z[0] - self.origin[0]) / self.cell))
        i = int(np.floor((z[1] - self.origin[1]) / self.cell))
        r = self.resolution
        return min(max(i, 0), r - 1), min(max(j, 0), r - 1)

    def component_at(self, z) -> int:
        return int(self.grid[self.cell_of(z)])

    def mask(self, comp: int) -> np.ndarray:
        return self.grid == comp

    def adjacency_matrix(self, pts, excl: float | None = None, rays: int = RAYS) -> np.ndarray:
        """Boolean (P, max_id + 1) incidence of curve points and components.

        Component c is adjacent to z when a ray from z reaches a cell of c
        before crossing the curve farther than ``excl`` from z.
        """
        pts = np.atleast_2d(np.asarray(pts, float))
        excl = self.band_radius if excl is None else excl
        a = self.points
        b = np.roll(a, -1, axis=0)
        return _kernels.ray_adjacency(
            pts[:, 0].copy(), pts[:, 1].copy(),
            a[:, 0].copy(), a[:, 1].copy(), b[:, 0].copy(), b[:, 1].copy(),
            float(excl), self.grid, float(self.origin[0]), float(self.origin[1]),
            float(self.cell), int(rays), int(self.grid.max()) + 1,
        )

    def adjacent_components(self, z, excl: float | None = None, rays: int = RAYS) -> set[int]:
        """Component ids whose closure contains the curve point ``z``."""
        row = self.adjacency_matrix(z, excl, rays)[0]
        return {int(c) for c in np.nonzero(row)[0]}


def build_component_map(loop: SampledLoop, resolution: int = 512, margin: float = 0.2) -> ComponentMap:
    """Label the complement of the curve on a square ``resolution``-raster.

    Cells within one cell diagonal of the polyline form the band; the rest is
    split into 4-connected components.  Each component's winding index is
    evaluated at its cell farthest from the band.
    """
    if resolution < MIN_RESOLUTION:
        raise ComplementError(f"resolution must be >= {MIN_RESOLUTION}")
    pts = loop.points
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    side = float((hi - lo).max()) * (1.0 + 2.0 * margin)
    origin = 0.5 * (lo + hi) - 0.5 * side
    cell = side / resolution
    band_r = cell * math.sqrt(2.0)

    dense = densify_polyline(pts, cell / 4)
    centers = origin + (np.arange(resolution) + 0.5)[:, None] * cell
    gx, gy = np.meshgrid(centers[:, 0], centers[:, 1])
    dist, _ = cKDTree(dense).query(np.column_stack([gx.ravel(), gy.ravel()]), distance_upper_bound=2 * band_r)
    band = (dist <= band_r).reshape(resolution, resolution)

    grid, n = ndimage.label(~band)
    grid = grid.astype(np.int32)
    ids = np.arange(1, n + 1)
    depth = ndimage.distance_transform_edt(~band)
    seeds_rc = ndimage.maximum_position(depth, grid, ids)
    sizes = ndimage.sum_labels(np.ones_like(grid), grid, ids)

    index: dict[int, int] = {}
    seeds: dict[int, np.ndarray] = {}
    for c, (i, j) in zip(ids, seeds_rc):
        z = np.array([origin[0] + (j + 0.5) * cell, origin[1] + (i + 0.5) * cell])
        seeds[int(c)] = z
        try:
            index[int(c)] = winding_of_points(pts, z)
        except GeometryError:
            # deepest cell still badly conditioned: fall back to its neighbours
            index[int(c)] = _robust_winding(pts, z, cell)
    unbounded = int(grid[0, 0])
    if unbounded == BAND:
        raise ComplementError("raster border touches the curve band")
    if index[unbounded] != 0:
        raise ComplementError("unbounded component has nonzero index")
    return ComponentMap(
        grid=grid,
        origin=np.asarray(origin, float),
        cell=cell,
        index=index,
        unbounded_id=unbounded,
        sizes={int(c): int(s) for c, s in zip(ids, sizes)},
        seeds=seeds,
        band_radius=band_r,
        depth=depth * cell,
        points=np.ascontiguousarray(pts),
    )


def _robust_winding(pts, z, cell) -> int:
    votes = []
    for dx, dy in ((0.25, 0), (-0.25, 0), (0, 0.25), (0, -0.25)):
        try:
            votes.append(winding_of_points(pts, z + cell * np.array([dx, dy])))
        except GeometryError:
            pass
    if not votes:
        raise ComplementError("winding index undefined for a component")
    return max(set(votes), key=votes.count)


def max_index_component(cmap: ComponentMap) -> int:
    """Bounded component of largest index (ties: larger area, then smaller id)."""
    bounded = cmap.bounded_ids
    if not bounded:
        raise ComplementError("no bounded component")
    return min(bounded, key=lambda c: (-cmap.index[c], -cmap.sizes[c], c))


def export_pgm(cmap: ComponentMap, path) -> None:
    """Binary PGM of component ids modulo 251 (row 0 at the top = largest y)."""
    img = (cmap.grid[::-1] % 251).astype(np.uint8)
    r = cmap.resolution
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (r, r) + img.tobytes())


# ------------------------------------------------------------------ good disks

THETA_MIN = math.pi / 6
SLACK = 0.02
#: disks smaller than this fraction of the component's largest inscribed
#: radius are treated as raster-scale and never reported
MIN_RADIUS_REL = 0.1
#: relative contact window of a refined disk
CONTACT_REL = 1e-4


@dataclass
class GoodDisk:
    center: np.ndarray
    radius: float
    tangents: list[np.ndarray]
    component: int

    def bearings(self) -> np.ndarray:
        d = np.asarray(self.tangents) - self.center
        return np.arctan2(d[:, 1], d[:, 0]) % TWO_PI


@dataclass
class GoodChord:
    endpoints: tuple[np.ndarray, np.ndarray]
    witness: GoodDisk
    preimages: tuple[list[float], list[float]]

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.endpoints[0] + self.endpoints[1])

    @property
    def length(self) -> float:
        return float(np.hypot(*(self.endpoints[1] - self.endpoints[0])))


@dataclass
class PositivityReport:
    endpoint: np.ndarray
    preimage: float
    positive: bool
    local_tangent: float


def _ridge_cells(cmap: ComponentMap, comp: int, theta_min: float) -> tuple[np.ndarray, np.ndarray]:
    """Cells of ``comp`` on the raster medial axis.

    A cell qualifies when the nearest band cells of it and of a 4-neighbour
    are far apart, i.e. seen at an angle of about ``theta_min`` or more.
    """
    inside = cmap.grid == comp
    _, (fi, fj) = ndimage.distance_transform_edt(cmap.grid != BAND, return_indices=True)
    depth = cmap.depth / cmap.cell
    need = np.maximum(3.0, 2.0 * depth * math.sin(0.5 * theta_min))
    ridge = np.zeros_like(inside)
    for di, dj in ((1, 0), (0, 1)):
        a = (slice(0, -di or None), slice(0, -dj or None))
        b = (slice(di, None), slice(dj, None))
        sep = np.hypot(fi[a] - fi[b], fj[a] - fj[b])
        hit = (sep >= np.minimum(need[a], need[b])) & inside[a] & inside[b]
        # keep the deeper cell of each straddling pair
        deeper = depth[a] >= depth[b]
        ridge[a] |= hit & deeper
        ridge[b] |= hit & ~deeper
    return np.nonzero(ridge)


def _max_disk_along(z0, pts, foot, tol: float):
    """Largest disk tangent at ``foot`` with centre on the ray foot -> z0 whose
    interior keeps the curve out up to ``tol``.  Returns (centre, radius)."""
    u = np.asarray(z0) - foot
    s0 = float(np.hypot(*u))
    u = u / s0
    lo, hi = s0, 2.0 * s0
    while distance_to_polyline(foot + hi * u, pts) >= hi - tol:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6 * s0:
            break
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if distance_to_polyline(foot + mid * u, pts) >= mid - tol:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-3 * tol:
            break
    c = foot + lo * u
    return c, float(distance_to_polyline(c, pts))


def _spread(points, center, theta_min: float) -> bool:
    """True when two of the points are ``>= theta_min`` apart in bearing."""
    b = np.sort(np.arctan2(*(np.asarray(points) - center).T[::-1]) % TWO_PI)
    if len(b) < 2:
        return False
    # the widest pairwise separation is pi minus the smallest distance to an antipode
    anti = (b + math.pi) % TWO_PI
    j = np.searchsorted(b, anti) % len(b)
    best = np.max([angular_distance(b[i], b[k]) for i in range(len(b)) for k in (j[i], j[i] - 1)])
    return bool(best >= theta_min)


def find_good_disks(
    cmap: ComponentMap,
    loop: SampledLoop,
    comp: int,
    candidates: int = 400,
    theta_min: float = THETA_MIN,
    slack: float = SLACK,
    min_radius: float | None = None,
) -> list[GoodDisk]:
    """Good disks of a bounded component.

    Candidate centres are ridge cells of the distance map, deepest first.
    Each is pushed along the normal at its nearest curve point until the disk
    touches the curve again, then the touching set is read off with
    ``nearest_on_curve``.  Only contacts within ``1.5 h^2 / diag`` (the
    polyline sagitta scale) or ``CONTACT_REL * r`` of the clearance radius count, which keeps near-osculating disks
    from reporting a whole flat stretch as contact.
    """
    if comp not in cmap.index or comp == cmap.unbounded_id:
        raise ComplementError("comp must be a bounded component")
    if min_radius is None:
        min_radius = MIN_RADIUS_REL * float(cmap.depth[cmap.grid == comp].max())
    rows, cols = _ridge_cells(cmap, comp, theta_min)
    depth = cmap.depth[rows, cols]
    order = np.argsort(-depth, kind="stable")
    if len(order) > candidates:
        order = order[np.linspace(0, len(order) - 1, candidates).astype(int)]
    centers = cmap.cell_centers(rows[order], cols[order])
    pts = loop.points
    # contacts may sit up to `window` outside the clearance radius
    sag = 1.5 * loop.h**2 / loop.diag
    tol = sag / 6.0

    disks: list[GoodDisk] = []
    for z in centers:
        near = nearest_on_curve(z, loop, 0.0)
        if near.distance <= 0.0:
            continue
        c, r = _max_disk_along(z, pts, near.points[0], tol)
        if r < min_radius or cmap.component_at(c) != comp:
            continue
        if any(np.hypot(*(c - d.center)) < cmap.cell for d in disks):
            continue
        ns = nearest_on_curve(c, loop, slack)
        tangents = [t for t in ns.points if np.hypot(*(t - c)) <= r + max(sag, CONTACT_REL * r)]
        if _spread(tangents, c, theta_min):
            disks.append(GoodDisk(center=c, radius=r, tangents=tangents, component=comp))
    return disks


def good_points(disks: list[GoodDisk]) -> np.ndarray:
    pts = [t for d in disks for t in d.tangents]
    return np.asarray(pts).reshape(-1, 2)


def boundary_samples(cmap: ComponentMap, loop: SampledLoop, comp: int) -> np.ndarray:
    """Curve samples on the boundary of ``comp``."""
    adj = cmap.adjacency_matrix(loop.points, 1.5 * loop.h)
    return loop.points[adj[:, comp]]


def good_point_coverage(cmap: ComponentMap, loop: SampledLoop, comp: int, disks: list[GoodDisk], rho: float) -> float:
    """Fraction of boundary samples of ``comp`` within ``rho`` of a good point."""
    b = boundary_samples(cmap, loop, comp)
    g = good_points(disks)
    if len(b) == 0:
        return 1.0
    if len(g) == 0:
        return 0.0
    d, _ = cKDTree(g).query(b)
    return float(np.mean(d <= rho))


# ------------------------------------------------------------------ chords

def preimages(loop: SampledLoop, z, radius: float) -> list[float]:
    """Parameters whose image passes within ``radius`` of ``z``.

    Each maximal run of consecutive edges within ``radius`` contributes the
    parameter of its closest foot point.
    """
    z = np.asarray(z, float)
    a = loop.points
    b = np.roll(a, -1, axis=0)
    e = b - a
    ee = np.einsum("ij,ij->i", e, e)
    s = np.clip(np.einsum("ij,ij->i", z - a, e) / np.where(ee > 0, ee, 1.0), 0.0, 1.0)
    dist = np.hypot(*(a + s[:, None] * e - z).T)
    near = dist <= radius
    n = len(a)
    if not near.any():
        return []
    if near.all():
        runs = [np.arange(n)]
    else:
        # rotate so that index 0 is outside every run
        start = int(np.argmin(near))
        idx = (np.arange(n) + start) % n
        flags = near[idx]
        cut = np.flatnonzero(np.diff(flags.astype(int)) != 0) + 1
        runs = [r for r in np.split(idx, cut) if near[r[0]]]
    t = loop.params
    t_next = np.roll(t, -1)
    t_next[-1] += TWO_PI
    out = []
    for r in runs:
        k = int(r[np.argmin(dist[r])])
        out.append(float(normalize_angle(t[k] + s[k] * (t_next[k] - t[k]))))
    return out


def good_chords(
    disks: list[GoodDisk],
    loop: SampledLoop,
    excl: float | None = None,
    per_disk: int = 3,
    theta_min: float = THETA_MIN,
) -> list[GoodChord]:
    """Chords between tangent pairs of each disk, widest bearing separations first.

    Pairs closer than ``theta_min`` in bearing are one tangency, not a chord.
    """
    if excl is None:
        excl = 1.5 * loop.h
    out: list[GoodChord] = []
    for d in disks:
        if len(d.tangents) < 2:
            raise ComplementError("good disk with fewer than two tangents")
        b = d.bearings()
        pairs = [(angular_distance(b[i], b[j]), i, j) for i in range(len(b)) for j in range(i + 1, len(b))]
        pairs = [x for x in pairs if x[0] >= theta_min]
        pairs.sort(key=lambda x: -x[0])
        for _, i, j in pairs[:per_disk]:
            p, q = d.tangents[i], d.tangents[j]
            pre = (preimages(loop, p, excl), preimages(loop, q, excl))
            if not pre[0] or not pre[1]:
                log.warning("tangent without a preimage within %.3g; chord dropped", excl)
                continue
            out.append(GoodChord(endpoints=(p.copy(), q.copy()), witness=d, preimages=pre))
    return out


def positivity(loop: SampledLoop, chord: GoodChord, endpoint_index: int) -> list[PositivityReport]:
    """Is the chord locally on the left of the curve at each preimage of an endpoint?"""
    if endpoint_index not in (0, 1):
        raise ComplementError("endpoint_index must be 0 or 1")
    xi = chord.endpoints[endpoint_index]
    inward = chord.endpoints[1 - endpoint_index] - xi
    inward = inward / np.hypot(*inward)
    pres = chord.preimages[endpoint_index]
    if not pres:
        raise ComplementError("endpoint has no preimage")
    dt = TWO_PI / len(loop)
    out = []
    for x in pres:
        tan = loop.eval(x + dt) - loop.eval(x - dt)
        if np.hypot(*tan) == 0.0:
            log.warning("tangent undefined at t=%.6f; skipped", x)
            continue
        cross = tan[0] * inward[1] - tan[1] * inward[0]
        out.append(PositivityReport(xi.copy(), x, bool(cross > 0), float(normalize_angle(math.atan2(tan[1], tan[0])))))
    return out


# ------------------------------------------------------------ ruled sequences

def _chord_cells(cmap: ComponentMap, p, q) -> tuple[np.ndarray, np.ndarray]:
    """Raster cells met by the segment pq (sampled at a quarter cell)."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    m = max(2, int(math.ceil(4.0 * np.hypot(*(q - p)) / cmap.cell)) + 1)
    s = np.linspace(0.0, 1.0, m)[:, None]
    z = p + s * (q - p)
    r = cmap.resolution
    j = np.clip(np.floor((z[:, 0] - cmap.origin[0]) / cmap.cell).astype(int), 0, r - 1)
    i = np.clip(np.floor((z[:, 1] - cmap.origin[1]) / cmap.cell).astype(int), 0, r - 1)
    return i, j


def _cut(mask: np.ndarray, cells) -> tuple[np.ndarray, list[int]]:
    """Label ``mask`` minus ``cells``; returns labels and the non-fragment part ids."""
    m = mask.copy()
    m[cells] = False
    lab, n = ndimage.label(m)
    if n == 0:
        return lab, []
    sizes = ndimage.sum_labels(np.ones_like(lab), lab, np.arange(1, n + 1))
    floor = max(8.0, 1e-3 * mask.sum())
    return lab, [k + 1 for k in range(n) if sizes[k] >= floor]


def _chord_component(cmap: ComponentMap, chord: GoodChord) -> int:
    return cmap.component_at(chord.midpoint)


def _touches(cmap: ComponentMap, z, comp: int) -> bool:
    i, j = cmap.cell_of(z)
    k = int(math.ceil((cmap.band_radius + cmap.cell) / cmap.cell)) + 1
    win = cmap.grid[max(i - k, 0) : i + k + 1, max(j - k, 0) : j + k + 1]
    return bool((win == comp).any())


def verify_ruled(chords: list[GoodChord], cmap: ComponentMap) -> bool:
    """Check that each interior chord separates its two neighbours in the raster."""
    if len(chords) < 3:
        raise ComplementError("need at least 3 chords")
    comps = {_chord_component(cmap, c) for c in chords}
    if len(comps) != 1:
        raise ComplementError("chords lie in different components")
    comp = comps.pop()
    if comp in (BAND, cmap.unbounded_id):
        raise ComplementError("chords must lie in one bounded component")
    for c in chords:
        for e in c.endpoints:
            if not _touches(cmap, e, comp):
                raise ComplementError("chord endpoint not on the component boundary")
    mask = cmap.grid == comp
    for k in range(1, len(chords) - 1):
        lab, big = _cut(mask, _chord_cells(cmap, *chords[k].endpoints))
        if len(big) != 2:
            return False
        a = int(lab[cmap.cell_of(chords[k - 1].midpoint)])
        b = int(lab[cmap.cell_of(chords[k + 1].midpoint)])
        if a not in big or b not in big or a == b:
            return False
    return True


def _seg_distance(z: np.ndarray, p, q) -> np.ndarray:
    v = q - p
    s = np.clip(((z - p) @ v) / float(v @ v), 0.0, 1.0)
    return np.hypot(*(p + s[:, None] * v - z).T)


class _Pool:
    """Candidate good chords: tangent pairs of every disk that are far enough apart."""

    def __init__(self, cmap, disks, comp, theta_min, max_tangents=24):
        P, Q, W = [], [], []
        for w, d in enumerate(disks):
            t = np.asarray(d.tangents)
            b = d.bearings()
            order = np.argsort(b)
            if len(order) > max_tangents:
                order = order[np.linspace(0, len(order) - 1, max_tangents).astype(int)]
            for x in range(len(order)):
                for y in range(x + 1, len(order)):
                    i, j = order[x], order[y]
                    if angular_distance(b[i], b[j]) >= theta_min:
                        P.append(t[i])
                        Q.append(t[j])
                        W.append(w)
        self.P = np.asarray(P).reshape(-1, 2)
        self.Q = np.asarray(Q).reshape(-1, 2)
        self.W = np.asarray(W, dtype=int)
        self.mid = 0.5 * (self.P + self.Q)
        self.mid_cell = np.array([cmap.cell_of(m) for m in self.mid]).reshape(-1, 2)
        inside = cmap.grid[self.mid_cell[:, 0], self.mid_cell[:, 1]] == comp if len(self.mid) else np.zeros(0, bool)
        self.ok = inside
        self._cells: dict[int, tuple] = {}
        self.cmap = cmap

    def __len__(self):
        return len(self.P)

    def cells(self, k):
        c = self._cells.get(k)
        if c is None:
            c = self._cells[k] = _chord_cells(self.cmap, self.P[k], self.Q[k])
        return c


def _extend(pool: _Pool, mask, cur: int, forward: np.ndarray, steps: int, spacing: float) -> list[int]:
    """Greedily walk into ``forward`` (a part of the cut component) chord by chord."""
    cmap = pool.cmap
    seq: list[int] = []
    while len(seq) < steps:
        d = _seg_distance(pool.mid, pool.P[cur], pool.Q[cur])
        in_fwd = pool.ok & forward[pool.mid_cell[:, 0], pool.mid_cell[:, 1]] & (d >= spacing)
        nxt = None
        for k in np.flatnonzero(in_fwd)[np.argsort(d[in_fwd], kind="stable")]:
            cells = pool.cells(k)
            inside = mask[cells]
            if not forward[cells][inside].all():
                continue
            lab, big = _cut(mask, cells)
            back = int(lab[tuple(pool.mid_cell[cur])])
            if len(big) != 2 or back not in big:
                continue
            ahead = big[0] if big[1] == back else big[1]
            nxt, forward = int(k), lab == ahead
            break
        if nxt is None:
            break
        seq.append(nxt)
        cur = nxt
    return seq


def build_ruled_sequence(
    cmap: ComponentMap,
    loop: SampledLoop,
    comp: int,
    length: int = 5,
    theta_min: float = THETA_MIN,
    disks: list[GoodDisk] | None = None,
) -> list[GoodChord]:
    """A ruled sequence of up to ``length`` good chords in ``comp``.

    Starts from a chord of the deepest good disk and walks outwards on both
    sides, each new chord lying in the part cut off by the previous one.
    """
    if length < 3:
        raise ComplementError("length must be >= 3")
    if disks is None:
        disks = find_good_disks(cmap, loop, comp, theta_min=theta_min)
    if not disks:
        raise ComplementError("ruled sequence too short")
    pool = _Pool(cmap, disks, comp, theta_min)
    mask = cmap.grid == comp
    spacing = max(4.0 * cmap.cell, 0.1 * float(cmap.depth[mask].max()) * 5.0 / length)

    radius = np.array([disks[w].radius for w in pool.W]) if len(pool) else np.zeros(0)
    best: list[int] = []
    for start in np.flatnonzero(pool.ok)[np.argsort(-radius[pool.ok], kind="stable")][:20]:
        lab, big = _cut(mask, pool.cells(start))
        if len(big) != 2:
            continue
        left = _extend(pool, mask, start, lab == big[0], length - 1, spacing)
        right = _extend(pool, mask, start, lab == big[1], length - 1 - len(left), spacing)
        seq = left[::-1] + [int(start)] + right
        if len(seq) > len(best):
            best = seq
        if len(best) >= length:
            break
    if len(best) < 3:
        raise ComplementError("ruled sequence too short")

    excl = 1.5 * loop.h
    chords = []
    for k in best[:length]:
        p, q = pool.P[k].copy(), pool.Q[k].copy()
        chords.append(GoodChord((p, q), disks[pool.W[k]], (preimages(loop, p, excl), preimages(loop, q, excl))))
    if not verify_ruled(chords, cmap):
        raise ComplementError("constructed sequence failed verification")
    return chords


# ------------------------------------------------------------- wind relation

@dataclass
class WindReport:
    """Outcome of the local wind relation check around a curve point."""

    xi: np.ndarray
    preimages: list[float]
    deltas: list[int]
    base_index: int
    probes: int
    max_discrepancy: int
    notes: list[str] = field(default_factory=list)


def _arc_runs(loop: SampledLoop, xi, eps: float) -> list[np.ndarray]:
    """Maximal runs of vertex indices whose images lie within ``eps`` of xi."""
    inside = np.hypot(*(loop.points - xi).T) < eps
    n = len(inside)
    if inside.all():
        raise ComplementError("eps too large")
    start = int(np.argmin(inside))
    idx = (np.arange(n) + start) % n
    cut = np.flatnonzero(np.diff(inside[idx].astype(int)) != 0) + 1
    return [r for r in np.split(idx, cut) if inside[r[0]]]


def check_wind_relation(
    loop: SampledLoop,
    xi,
    eps: float = 0.05,
    probes: int = 32,
    seed: int = 0,
) -> WindReport:
    """Verify ``wind(q) = wind(p) + sum over {i : q in D_i} of delta_i`` near xi.

    ``p`` sits on a short segment H leaving xi between the local arcs; each
    arc through a preimage of xi gets ``delta_i = -1`` when H lies on its left
    (a positive point) and ``+1`` otherwise, and ``D_i`` is its side away from H.
    """
    xi = np.asarray(xi, float)
    excl = 1.5 * loop.h
    if distance_to_polyline(xi, loop.points) > excl:
        raise ComplementError("xi is not on the curve")
    if eps <= excl:
        raise ComplementError("eps must exceed the sampling scale")
    pre = preimages(loop, xi, excl)
    runs = _arc_runs(loop, xi, eps)
    pts = loop.points
    n = len(pts)

    # every arc entering the eps-disk must pass through xi exactly once
    arcs = []
    for r in runs:
        hits = [t for t in pre if _param_in_run(loop, t, r)]
        if len(hits) != 1:
            raise ComplementError("eps too large")
        # extend one vertex each way so the polyline reaches the disk boundary
        r = np.concatenate([[(r[0] - 1) % n], r, [(r[-1] + 1) % n]])
        arcs.append((hits[0], pts[r]))
    if len(arcs) != len(pre):
        raise ComplementError("eps too large")

    tangents = []
    for t, _ in arcs:
        d = loop.eval(t + TWO_PI / n) - loop.eval(t - TWO_PI / n)
        tangents.append(math.atan2(d[1], d[0]))
    # H leaves xi along the direction farthest from every arc's tangent line
    cand = np.linspace(0.0, TWO_PI, 720, endpoint=False)
    gap = np.min([np.abs(np.sin(cand - a)) for a in tangents], axis=0)
    h_dir = float(cand[np.argmax(gap)])
    u = np.array([math.cos(h_dir), math.sin(h_dir)])
    p = xi + 0.5 * eps * u

    deltas, sides = [], []
    for (t, arc), a in zip(arcs, tangents):
        left_h = _side(arc, p)
        deltas.append(-1 if left_h > 0 else 1)
        sides.append((arc, left_h))
    base = winding_of_points(pts, p)

    rng = np.random.default_rng(seed)
    worst, used = 0, 0
    notes = []
    tries = 0
    while used < probes and tries < 50 * probes:
        tries += 1
        ang = rng.uniform(0.0, TWO_PI)
        rad = rng.uniform(0.2, 0.7) * eps
        q = xi + rad * np.array([math.cos(ang), math.sin(ang)])
        if distance_to_polyline(q, pts) < 0.1 * eps:
            continue
        pred = base + sum(dl for dl, (arc, lh) in zip(deltas, sides) if _side(arc, q) * lh < 0)
        try:
            actual = winding_of_points(pts, q)
        except GeometryError:
            continue
        worst = max(worst, abs(actual - pred))
        used += 1
    if used < probes:
        notes.append(f"only {used} probes placed")
    return WindReport(xi, [t for t, _ in arcs], deltas, base, used, worst, notes)


def _param_in_run(loop: SampledLoop, t: float, run: np.ndarray) -> bool:
    n = len(loop)
    k = int(np.searchsorted(loop.params, normalize_angle(t), side="right") - 1) % n
    return bool(np.isin([k, (k + 1) % n], run).any())


def _side(arc: np.ndarray, z) -> float:
    """Sign of z relative to the oriented polyline ``arc`` (+1 left, -1 right)."""
    a = arc[:-1]
    e = arc[1:] - a
    ee = np.einsum("ij,ij->i", e, e)
    s = np.clip(np.einsum("ij,ij->i", z - a, e) / np.where(ee > 0, ee, 1.0), 0.0, 1.0)
    foot = a + s[:, None] * e
    k = int(np.argmin(np.hypot(*(foot - z).T)))
    w = z - foot[k]
    return float(np.sign(e[k, 0] * w[1] - e[k, 1] * w[0]))
