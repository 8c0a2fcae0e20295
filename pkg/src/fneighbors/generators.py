"""Constructors for the example curves.

Every generator samples its image by arc length while keeping the
parametrization uniform on each named arc, so short red arcs in parameter
space still get enough image samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .curves import SampledLoop, make_loop
from .geometry import TWO_PI


class GeneratorError(ValueError):
    pass


@dataclass
class Piece:
    """A parameter interval ``[t0, t1)`` mapped onto a polyline or a callable."""

    t0: float
    t1: float
    path: np.ndarray  # (M, 2) polyline traversed at uniform speed
    color: str = "blue"

    @property
    def length(self) -> float:
        return float(np.hypot(*np.diff(self.path, axis=0).T).sum())

    def at(self, u: np.ndarray) -> np.ndarray:
        """Point at fraction ``u`` of the polyline length."""
        seg = np.hypot(*np.diff(self.path, axis=0).T)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        s = np.asarray(u) * cum[-1]
        x = np.interp(s, cum, self.path[:, 0])
        y = np.interp(s, cum, self.path[:, 1])
        return np.column_stack([x, y])


def _assemble(pieces: list[Piece], n: int, meta: dict) -> SampledLoop:
    lengths = np.array([p.length for p in pieces])
    counts = np.maximum(2, np.floor(n * lengths / lengths.sum()).astype(int))
    # hand leftover samples to the longest pieces
    short = n - counts.sum()
    for i in np.argsort(-lengths)[: max(short, 0)]:
        counts[i] += 1
    ts, pts = [], []
    for p, m in zip(pieces, counts):
        u = np.arange(m) / m
        ts.append(p.t0 + (p.t1 - p.t0) * u)
        pts.append(p.at(u))
    t = np.concatenate(ts)
    meta = dict(meta, red=[[p.t0, p.t1] for p in pieces if p.color == "red"], breaks=[p.t0 for p in pieces])
    return make_loop(zip(t, np.concatenate(pts)), meta)


def arc(center, radius, a0, a1, m: int = 256) -> np.ndarray:
    th = np.linspace(a0, a1, m)
    return np.column_stack([center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)])


def _bulge_circle(p, q, sagitta: float):
    """Centre, radius, start angle and signed sweep of a bulging arc p -> q."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    c = np.hypot(*(q - p))
    n = np.sign(sagitta) * np.array([(q - p)[1], -(q - p)[0]]) / c
    sagitta = abs(sagitta)
    r = (sagitta**2 + (c / 2) ** 2) / (2 * sagitta)
    center = 0.5 * (p + q) + n * (sagitta - r)
    a0 = math.atan2(*(p - center)[::-1])
    a1 = math.atan2(*(q - center)[::-1])
    # go the long or short way so that the apex lies on the bulge side
    apex = 0.5 * (p + q) + n * sagitta
    am = math.atan2(*(apex - center)[::-1])
    sweep = (a1 - a0) % TWO_PI
    if ((am - a0) % TWO_PI) > sweep:
        sweep -= TWO_PI
    return center, r, a0, sweep


def bulge_arc(p, q, sagitta: float, m: int = 256) -> np.ndarray:
    """Circular arc from p to q bulging by ``|sagitta|`` to the right of p->q
    (to the left for negative ``sagitta``)."""
    center, r, a0, sweep = _bulge_circle(p, q, sagitta)
    return arc(center, r, a0, a0 + sweep, m)


def inner_parallel(p, q, sagitta: float, gap: float, m: int = 256) -> np.ndarray:
    """Path p -> q running at distance ``gap`` inside ``bulge_arc(p, q, sagitta)``.

    It leaves p and reaches q along straight legs meeting the outer arc at
    roughly 45 degrees, so the region between the two paths is a lens of
    width ``gap`` that tapers only over a length comparable to ``gap``.
    """
    center, r, a0, sweep = _bulge_circle(p, q, sagitta)
    d = math.copysign(gap / r, sweep)
    mid = arc(center, r - gap, a0 + d, a0 + sweep - d, m)
    return np.vstack([np.asarray(p, float), mid, np.asarray(q, float)])


# ------------------------------------------------------------------ families

def gen_circle(n: int = 1024, k: int = 1, phase: float = 0.0) -> SampledLoop:
    if k == 0:
        raise GeneratorError("winding k must be nonzero")
    if n < 8 * abs(k):
        raise GeneratorError("need n >= 8*|k|")
    t = np.arange(n) * (TWO_PI / n)
    pts = np.column_stack([np.cos(k * t + phase), np.sin(k * t + phase)])
    return make_loop(zip(t, pts), {"family": "circle", "k": k, "phase": phase, "n": n})


EX1_PINCH_RADIUS = 1.0
EX1_BULGE_RADIUS = 1.8


def gen_example1(n: int = 2048, eps: float = 0.35, closeness: float = 0.05) -> SampledLoop:
    """Three pinch points, three blue bulges and three red inner arcs.

    Blue arcs are arcs of radius ``EX1_BULGE_RADIUS`` through consecutive
    pinch points on the circle of radius ``EX1_PINCH_RADIUS``.

    Red arcs of parameter length ``eps`` are centred at 30, 150 and 270
    degrees.  Every arc joins two consecutive pinch points, so each red arc
    shares its endpoints with one blue arc and runs parallel to it on the
    inside, leaving a lens of width ``closeness * sagitta``.
    """
    if not 0 < eps < math.pi / 3:
        raise GeneratorError("eps must lie in (0, pi/3)")
    if not 0 < closeness < 1:
        raise GeneratorError("closeness must lie in (0, 1)")
    ang = np.deg2rad([30.0, 150.0, 270.0])
    P = EX1_PINCH_RADIUS * np.column_stack([np.cos(ang), np.sin(ang)])
    half_chord = EX1_PINCH_RADIUS * math.sin(math.pi / 3)
    s_blue = EX1_BULGE_RADIUS - math.sqrt(EX1_BULGE_RADIUS**2 - half_chord**2)
    gap = closeness * s_blue
    pieces = []
    # the image walks P0 P1 P2 P0 P1 P2 P0, alternating red and blue
    for j in range(3):
        r0, r1 = ang[j] - eps / 2, ang[j] + eps / 2
        a, b, c = (2 * j) % 3, (2 * j + 1) % 3, (2 * j + 2) % 3
        # right of each counterclockwise chord is away from the origin
        pieces.append(Piece(r0, r1, inner_parallel(P[a], P[b], s_blue, gap), "red"))
        b1 = ang[(j + 1) % 3] - eps / 2 + (TWO_PI if j == 2 else 0.0)
        pieces.append(Piece(r1, b1, bulge_arc(P[b], P[c], s_blue), "blue"))
    meta = {"family": "example1", "eps": eps, "closeness": closeness, "n": n}
    return _assemble(pieces, n, meta)


def gen_torusknot(n: int = 2048, q: int = 5, red_total: float | None = None,
                  r_in: float = 0.5, r_out: float = 2.0) -> SampledLoop:
    """Planar diagram of the (3, q) torus knot.

    The red arcs map onto the edges of an inner regular q-gon.  After red edge
    ``v_i -> v_{i+1}`` the blue detour leaves ``v_{i+1}``, runs out to the outer
    polygon half a step further on, follows one of its sides and comes back in
    to ``v_{i+3}``.  Every outer side is used exactly once and every outer
    corner is visited by two detours.
    """
    if q < 4 or math.gcd(3, q) != 1:
        raise GeneratorError("q must be >= 4 and coprime to 3")
    if red_total is None:
        red_total = (TWO_PI / 8) / q**3
    if not 0 < red_total < TWO_PI:
        raise GeneratorError("red_total must lie in (0, 2*pi)")
    step = TWO_PI / q
    w = red_total / q

    def vertex(k):
        return r_in * np.array([math.cos(k * step), math.sin(k * step)])

    def corner(angle, radius):
        return radius * np.array([math.cos(angle), math.sin(angle)])

    pieces = []
    i = 0
    for j in range(q):
        tc = j * step
        pieces.append(Piece(tc - w / 2, tc + w / 2, np.array([vertex(i), vertex(i + 1)]), "red"))
        th = (i + 1) * step
        path = [vertex(i + 1), corner(th + step / 2, r_out), corner(th + 1.5 * step, r_out), vertex(i + 3)]
        pieces.append(Piece(tc + w / 2, tc + step - w / 2, np.array(path), "blue"))
        i = (i + 3) % q
    meta = {"family": "torusknot", "q": q, "red_total": red_total, "n": n}
    return _assemble(pieces, n, meta)


def _polar(r, th):
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def _shield_path(xi, eps, half, margin, r_in, r_out, fill_res, m_arc=64) -> np.ndarray:
    """Zigzag over the annular sector ``[xi-half+margin, xi+half-margin]``.

    Starts on the unit circle at ``xi - eps`` and ends at ``xi + eps``; caps
    may be traversed more than once.
    """
    lo, hi = xi - half + margin, xi + half - margin

    def cap(r, a, b):
        return _polar(r, np.linspace(a, b, max(2, int(m_arc * abs(b - a) / half) + 2)))

    parts = [_polar(np.array([1.0, r_out]), np.full(2, xi - eps))]
    parts.append(cap(r_out, xi - eps, hi))
    parts.append(_polar(np.array([r_out, r_in]), np.full(2, hi)))
    parts.append(cap(r_in, hi, lo))
    parts.append(_polar(np.array([r_in, r_out]), np.full(2, lo)))
    # the zigzag below only covers every other gap of the outer cap
    parts.append(cap(r_out, lo, xi - eps))
    parts.append(cap(r_out, xi - eps, lo))
    strokes = lo + (hi - lo) * np.arange(1, fill_res + 1) / (fill_res + 1)
    r, a = r_out, lo
    for phi in strokes:
        parts.append(cap(r, a, phi))
        r = r_in if r == r_out else r_out
        parts.append(_polar(np.array([r_in + r_out - r, r]), np.full(2, phi)))
        a = phi
    parts.append(cap(r, a, xi + eps))
    parts.append(_polar(np.array([r, 1.0]), np.full(2, xi + eps)))
    path = np.concatenate(parts)
    keep = np.concatenate([[True], np.hypot(*np.diff(path, axis=0).T) > 0])
    return path[keep]


def gen_shielded(n: int = 4096, k: int = 4, eps: float = 0.05, fill_res: int = 16,
                 r_in: float = 0.7, r_out: float = 1.3, margin: float | None = None) -> SampledLoop:
    """Unit circle with k shields hiding its arcs from each other.

    Outside the eps-neighbourhoods of ``xi_l = 2*pi*l/k`` the map is the
    identity.  Each neighbourhood is spread over an annular sector
    ``r_in <= r <= r_out`` covering almost all of the l-th share of the
    circle, cut by ``fill_res`` radial strokes that cross the unit circle.
    """
    if k < 2:
        raise GeneratorError("k must be >= 2")
    if fill_res < 4:
        raise GeneratorError("fill_res must be >= 4")
    if not 0 < eps < math.pi / k**2:
        raise GeneratorError("eps must lie in (0, pi/k^2)")
    half = math.pi / k
    if margin is None:
        margin = 0.2 * (2 * half) / (fill_res + 1)
    if eps >= half - margin:
        raise GeneratorError("eps-neighbourhoods overlap")
    pieces = []
    for l in range(k):
        xi = l * 2 * half
        pieces.append(Piece(xi - eps, xi + eps, _shield_path(xi, eps, half, margin, r_in, r_out, fill_res), "red"))
        th = np.linspace(xi + eps, xi + 2 * half - eps, 128)
        pieces.append(Piece(xi + eps, xi + 2 * half - eps, _polar(1.0, th), "blue"))
    meta = {"family": "shielded", "k": k, "eps": eps, "fill_res": fill_res, "n": n}
    return _assemble(pieces, n, meta)


def shielded_eps(k: int) -> float:
    """Default neighbourhood size for the shielded family, shrinking like 1/k^3."""
    return 0.05 * (4.0 / k) ** 3


def fold_map(t, depth: float):
    """Piecewise-linear angle ``s(t)`` with one fold: 0->0, pi->pi, pi+D->pi-D, 2pi->2pi."""
    D = depth
    return np.interp(np.asarray(t, float), [0.0, math.pi, math.pi + D, TWO_PI], [0.0, math.pi, math.pi - D, TWO_PI])


def gen_folded(n: int = 1024, fold_depth: float = 0.3) -> SampledLoop:
    """Unit circle traversed with one back-and-forth fold at angle pi."""
    if not 0 < fold_depth < 1:
        raise GeneratorError("fold_depth must lie in (0, 1)")
    if n < 8:
        raise GeneratorError("need n >= 8")
    t = np.arange(n) * (TWO_PI / n)
    s = fold_map(t, fold_depth)
    return make_loop(zip(t, _polar(1.0, s)), {"family": "folded", "fold_depth": fold_depth, "n": n})


# ------------------------------------------------------------ auxiliary curves

def gen_figure_eight(n: int = 1024) -> SampledLoop:
    t = np.arange(n) * (TWO_PI / n)
    return make_loop(zip(t, np.column_stack([np.sin(t), np.sin(t) * np.cos(t)])), {"family": "figure8", "n": n})


def gen_ellipse(n: int = 1024, a: float = 2.0, b: float = 1.0) -> SampledLoop:
    t = np.arange(n) * (TWO_PI / n)
    return make_loop(zip(t, np.column_stack([a * np.cos(t), b * np.sin(t)])), {"family": "ellipse", "a": a, "b": b, "n": n})


def gen_square(n: int = 1024, side: float = 2.0) -> SampledLoop:
    """Axis-aligned square centred at the origin, counterclockwise, uniform speed."""
    h = side / 2
    corners = np.array([[h, -h], [h, h], [-h, h], [-h, -h], [h, -h]])
    path = Piece(0.0, TWO_PI, np.vstack([[h, 0.0], corners[1:], [h, 0.0]]))
    t = np.arange(n) * (TWO_PI / n)
    return make_loop(zip(t, path.at(t / TWO_PI)), {"family": "square", "side": side, "n": n})


# --------------------------------------------------------------------- specs

FAMILIES: dict[str, Callable[..., SampledLoop]] = {
    "circle": gen_circle,
    "example1": gen_example1,
    "torusknot": gen_torusknot,
    "shielded": gen_shielded,
    "folded": gen_folded,
    "figure8": gen_figure_eight,
    "ellipse": gen_ellipse,
    "square": gen_square,
}

#: defaults used by the acceptance runs
DEFAULTS: dict[str, dict[str, Any]] = {
    "circle": {"n": 1024, "k": 1},
    "example1": {"n": 2048, "eps": 0.35, "closeness": 0.05},
    "torusknot": {"n": 2048, "q": 5},
    "shielded": {"n": 4096, "k": 4, "eps": 0.05, "fill_res": 16},
    "folded": {"n": 1024, "fold_depth": 0.3},
}


@dataclass
class GenSpec:
    family: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise GeneratorError(f"unknown family {self.family!r}")

    def build(self) -> SampledLoop:
        kw = dict(DEFAULTS.get(self.family, {}))
        kw.update(self.params)
        return FAMILIES[self.family](**kw)


def generate(family: str, **params) -> SampledLoop:
    return GenSpec(family, params).build()
