"""Classification of parameter pairs into the four neighbor types.

A pair ``(a, b)`` of distinct parameters is

* *plain* when ``f(a) == f(b)`` (up to ``eps_img``),
* *spherical* when some disk has ``f(a), f(b)`` on its boundary and no curve
  point in its interior,
* *visual* when the segment ``f(a) f(b)`` meets the curve only at its ends,
* *topological* when ``f(a), f(b)`` lie on the boundary of one complementary
  component.

Every test short-circuits to true on the plain branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any

import numpy as np

from . import _kernels
from .curves import SampledLoop
from .geometry import Segment, normalize_angle, segment_curve_hits

if TYPE_CHECKING:
    from .complement import ComponentMap

class NeighborError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    """Discretisation tolerances for one loop.

    ``depth`` is how far an obstacle may sit inside a candidate disk before it
    counts as an interior point; it absorbs the sagitta of polyline edges.
    """

    eps_img: float
    excl: float
    densify: int = 4
    depth: float = 0.0

    def __post_init__(self):
        if not self.eps_img > 0:
            raise ValueError("eps_img must be > 0")
        if self.excl < self.eps_img:
            raise ValueError("excl must be >= eps_img")
        if self.densify < 1:
            raise ValueError("densify must be >= 1")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")

    @classmethod
    def for_loop(cls, loop: SampledLoop, densify: int = 4) -> Tolerances:
        h = loop.h
        return cls(eps_img=1.5 * h, excl=1.5 * h, densify=densify, depth=2.0 * h * h / loop.diag)

    def scaled(self, s: float) -> Tolerances:
        return replace(self, eps_img=self.eps_img * s, excl=self.excl * s, depth=self.depth * s)


@dataclass
class NeighborVerdict:
    plain: bool
    spherical: bool
    visual: bool
    topological: bool
    witness: dict[str, Any] = field(default_factory=dict)
    #: flags as the individual tests reported them, before chain promotion
    raw: tuple[bool, bool, bool, bool] = (False, False, False, False)
    notes: list[str] = field(default_factory=list)

    @property
    def flags(self) -> tuple[bool, bool, bool, bool]:
        return (self.plain, self.spherical, self.visual, self.topological)

    @property
    def chain_violations(self) -> int:
        """Number of links ``plain => sph => vis => top`` broken by the raw flags."""
        r = self.raw
        return sum(1 for k in range(3) if r[k] and not r[k + 1])


def obstacles(loop: SampledLoop, densify: int) -> np.ndarray:
    """Curve samples plus ``densify`` evenly spaced interior points per edge."""
    a = loop.points
    b = np.roll(a, -1, axis=0)
    fr = np.arange(1, densify + 1) / (densify + 1)
    extra = a[:, None, :] + fr[None, :, None] * (b - a)[:, None, :]
    return np.concatenate([a, extra.reshape(-1, 2)])


# entries hold the points array itself, so its id cannot be recycled while cached
_obstacle_cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def _cached_obstacles(loop: SampledLoop, densify: int) -> np.ndarray:
    key = (id(loop.points), densify)
    hit = _obstacle_cache.get(key)
    if hit is not None and hit[0] is loop.points:
        return hit[1]
    if len(_obstacle_cache) > 32:
        _obstacle_cache.clear()
    obs = obstacles(loop, densify)
    _obstacle_cache[key] = (loop.points, obs)
    return obs


def _images(loop: SampledLoop, a: float, b: float):
    a = normalize_angle(a)
    b = normalize_angle(b)
    if a == b:
        raise NeighborError("identical parameters")
    return loop.eval(a), loop.eval(b)


def spherical_gap(loop: SampledLoop, a: float, b: float, tol: Tolerances):
    """Feasible interval ``(t_lo, t_hi)`` of empty-disk centres on the bisector.

    Centres are ``m + t*u`` with ``m`` the midpoint of ``f(a) f(b)`` and ``u``
    the left unit normal of ``f(b) - f(a)``.  Returns ``None`` when no disk
    through both image points has an empty interior.
    """
    p, q = _images(loop, a, b)
    if np.hypot(*(p - q)) <= tol.eps_img:
        raise NeighborError("plain pair, gap undefined")
    return _gap_points(loop, p, q, tol)


def _gap_points(loop: SampledLoop, p, q, tol: Tolerances):
    # a curve point on the open chord is interior to every disk through p, q
    if segment_curve_hits(Segment(tuple(p), tuple(q)), loop, tol.excl):
        return None
    ok, lo, hi = _kernels.bisector_interval(p[0], p[1], q[0], q[1], *_obstacle_xy(loop, tol), tol.excl, tol.depth)
    return (float(lo), float(hi)) if ok else None


def _obstacle_xy(loop: SampledLoop, tol: Tolerances):
    obs = _cached_obstacles(loop, tol.densify)
    return np.ascontiguousarray(obs[:, 0]), np.ascontiguousarray(obs[:, 1])


def disk_from_gap(p, q, interval) -> tuple[np.ndarray, float]:
    """A witness disk (centre, radius) for a feasible interval."""
    lo, hi = interval
    if np.isfinite(lo) and np.isfinite(hi):
        t = 0.5 * (lo + hi)
    elif np.isfinite(lo):
        t = lo + max(1.0, abs(lo))
    elif np.isfinite(hi):
        t = hi - max(1.0, abs(hi))
    else:
        t = 0.0
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    v = q - p
    u = np.array([-v[1], v[0]]) / np.hypot(*v)
    c = 0.5 * (p + q) + t * u
    return c, float(np.hypot(*(p - c)))


def spherical_oracle(
    loop: SampledLoop,
    a: float,
    b: float,
    tol: Tolerances,
    centers: int = 2000,
    radius_cap: float | None = None,
) -> bool:
    """Brute-force check of the spherical predicate over sampled disk centres."""
    p, q = _images(loop, a, b)
    if np.hypot(*(p - q)) <= tol.eps_img:
        raise NeighborError("plain pair, gap undefined")
    if radius_cap is None:
        radius_cap = 10.0 * loop.diag
    return bool(
        _kernels.oracle_any_empty(
            p[0], p[1], q[0], q[1], *_obstacle_xy(loop, tol), tol.excl, tol.depth, int(centers), float(radius_cap)
        )
    )


def is_visual(loop: SampledLoop, a: float, b: float, tol: Tolerances) -> bool:
    p, q = _images(loop, a, b)
    if np.hypot(*(p - q)) <= tol.eps_img:
        return True
    return not segment_curve_hits(Segment(tuple(p), tuple(q)), loop, tol.excl)


def classify_pair(
    loop: SampledLoop,
    a: float,
    b: float,
    tol: Tolerances | None = None,
    cmap: ComponentMap | None = None,
) -> NeighborVerdict:
    tol = tol or Tolerances.for_loop(loop)
    p, q = _images(loop, a, b)
    if np.hypot(*(p - q)) <= tol.eps_img:
        return NeighborVerdict(True, True, True, True, witness={"image": p.tolist()}, raw=(True,) * 4)

    witness: dict[str, Any] = {}
    notes: list[str] = []
    vis = not segment_curve_hits(Segment(tuple(p), tuple(q)), loop, tol.excl)
    gap = None
    if vis:
        witness["segment"] = [p.tolist(), q.tolist()]
        ok, lo, hi = _kernels.bisector_interval(p[0], p[1], q[0], q[1], *_obstacle_xy(loop, tol), tol.excl, tol.depth)
        gap = (float(lo), float(hi)) if ok else None
    sph = gap is not None
    if sph:
        c, r = disk_from_gap(p, q, gap)
        witness["disk"] = {"center": c.tolist(), "radius": r, "interval": list(gap)}
    if cmap is None:
        top = False
        notes.append("component map absent")
    else:
        shared = cmap.adjacent_components(p, tol.excl) & cmap.adjacent_components(q, tol.excl)
        top = bool(shared)
        if top:
            witness["component"] = min(shared)
    raw = (False, sph, vis, top)
    # the per-pair chain: each type implies the next one
    vis_e = vis or sph
    top_e = top or vis_e
    for k, name in ((1, "visual"), (2, "topological")):
        if raw[k] and not raw[k + 1]:
            notes.append(f"promoted {name}")
    return NeighborVerdict(False, sph, vis_e, top_e, witness, raw, notes)
