"""Colored torus: classify every grid pair, then read off the distance spectra."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np
from scipy.signal import find_peaks

from . import _kernels
from .complement import ComponentMap, build_component_map
from .curves import SampledLoop
from .geometry import TWO_PI, geom_tol
from .neighbors import Tolerances, obstacles

KINDS = ("plain", "sph", "vis", "top")
_BIT = {"plain": _kernels.FLAG_PLAIN, "sph": _kernels.FLAG_SPH, "vis": _kernels.FLAG_VIS, "top": _kernels.FLAG_TOP}


class Cell(IntEnum):
    """Strongest neighbor type of a grid pair (larger = stronger)."""

    NONE = 0
    TOP = 1
    VIS = 2
    SPH = 3
    PLAIN = 4
    DIAGONAL = 255


_LEVEL = {"top": Cell.TOP, "vis": Cell.VIS, "sph": Cell.SPH, "plain": Cell.PLAIN}


class SpectrumError(ValueError):
    pass


def _check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise SpectrumError(f"unknown kind {kind!r}; expected one of {KINDS}")
    return kind


@dataclass(eq=False)
class TorusGrid:
    """Classification of all pairs ``(params[i], params[j])``.

    ``raw`` holds the flag bits reported by the individual tests; ``cells``
    holds the strongest type after each type is promoted to the weaker ones.
    """

    n: int
    params: np.ndarray
    raw: np.ndarray
    cells: np.ndarray
    has_top: bool

    def member(self, kind: str) -> np.ndarray:
        c = self.cells
        return (c >= _LEVEL[_check_kind(kind)]) & (c != Cell.DIAGONAL)

    def offsets(self) -> np.ndarray:
        i = np.arange(self.n)
        k = np.abs(i[:, None] - i[None, :])
        return np.minimum(k, self.n - k)

    def distances(self) -> np.ndarray:
        return self.offsets() * (TWO_PI / self.n)

    def chain_violations(self) -> dict[str, int]:
        """Unordered pairs whose raw flags break a link of the chain."""
        iu = np.triu_indices(self.n, 1)
        r = self.raw[iu]
        out = {}
        links = [("plain", "sph"), ("sph", "vis")]
        if self.has_top:
            links.append(("vis", "top"))
        for a, b in links:
            out[f"{a}=>{b}"] = int(np.count_nonzero(((r & _BIT[a]) != 0) & ((r & _BIT[b]) == 0)))
        return out


def _strongest(raw: np.ndarray) -> np.ndarray:
    cells = np.zeros(raw.shape, dtype=np.uint8)
    for kind in ("top", "vis", "sph", "plain"):
        cells[(raw & _BIT[kind]) != 0] = _LEVEL[kind]
    np.fill_diagonal(cells, Cell.DIAGONAL)
    return cells


def classify_torus(
    loop: SampledLoop,
    n: int = 512,
    tol: Tolerances | None = None,
    resolution: int | None = 1024,
    cmap: ComponentMap | None = None,
) -> TorusGrid:
    """Classify the ``n x n`` parameter grid ``t_i = 2*pi*i/n``.

    The topological test runs when ``cmap`` is given or ``resolution`` is not
    None (a component map is then built once).
    """
    if n < 64:
        raise SpectrumError("grid must be >= 64")
    tol = tol or Tolerances.for_loop(loop)
    params = np.arange(n) * (TWO_PI / n)
    g = loop.eval(params)
    a = np.ascontiguousarray(loop.points)
    b = np.roll(a, -1, axis=0)
    obs = obstacles(loop, tol.densify)
    raw = _kernels.classify_grid(
        g[:, 0].copy(), g[:, 1].copy(),
        a[:, 0].copy(), a[:, 1].copy(), b[:, 0].copy(), b[:, 1].copy(),
        obs[:, 0].copy(), obs[:, 1].copy(),
        tol.eps_img, tol.excl, tol.depth, geom_tol(loop.points),
    )
    plain = raw == _kernels.FLAG_PLAIN
    raw[plain] = 0xF
    if cmap is None and resolution is not None:
        if resolution < 256:
            raise SpectrumError("raster resolution must be >= 256 for the topological test")
        cmap = build_component_map(loop, resolution)
    has_top = cmap is not None
    raw = raw | raw.T
    if has_top:
        adj = cmap.adjacency_matrix(g, tol.excl).astype(np.float32)
        top = (adj @ adj.T) > 0
        raw[top] |= _kernels.FLAG_TOP
    np.fill_diagonal(raw, 0)
    return TorusGrid(n=n, params=params, raw=raw, cells=_strongest(raw), has_top=has_top)


@dataclass
class DistanceSpectrum:
    """Finite union of closed intervals approximating an Omega set."""

    kind: str
    n: int
    gap: float
    intervals: list[tuple[float, float]]
    distances: np.ndarray  # distinct red distances, ascending
    counts: np.ndarray  # unordered red pairs per distance
    measure: float = field(init=False)

    def __post_init__(self):
        self.measure = float(sum(hi - lo for lo, hi in self.intervals))

    @property
    def empty(self) -> bool:
        return len(self.distances) == 0

    def holes(self, lo: float = 0.0, hi: float = np.pi) -> list[tuple[float, float]]:
        """Maximal uncovered open intervals inside ``(lo, hi)``."""
        out, cur = [], lo
        for a, b in self.intervals:
            if a > cur:
                out.append((cur, min(a, hi)))
            cur = max(cur, b)
        if cur < hi:
            out.append((cur, hi))
        return [(a, b) for a, b in out if b > a]

    def bins(self) -> dict[str, int]:
        return {f"{d:.6f}": int(c) for d, c in zip(self.distances, self.counts)}

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "grid": self.n,
            "gap": self.gap,
            "intervals": [[float(a), float(b)] for a, b in self.intervals],
            "measure": self.measure,
            "bins": self.bins(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def merge_intervals(values: np.ndarray, gap: float) -> list[tuple[float, float]]:
    """Group sorted values into intervals wherever consecutive gaps are <= gap."""
    v = np.unique(np.asarray(values, float))
    if v.size == 0:
        return []
    cut = np.nonzero(np.diff(v) > gap)[0]
    starts = np.concatenate([[0], cut + 1])
    ends = np.concatenate([cut, [v.size - 1]])
    return [(float(v[s]), float(v[e])) for s, e in zip(starts, ends)]


def spectrum_from_grid(grid: TorusGrid, kind: str) -> DistanceSpectrum:
    _check_kind(kind)
    if kind == "top" and not grid.has_top:
        raise SpectrumError("grid was classified without a component map")
    iu = np.triu_indices(grid.n, 1)
    red = grid.member(kind)[iu]
    off = grid.offsets()[iu][red]
    counts = np.bincount(off, minlength=grid.n // 2 + 1)
    ks = np.nonzero(counts)[0]
    d = ks * (TWO_PI / grid.n)
    gap = 8 * np.pi / grid.n
    return DistanceSpectrum(kind, grid.n, gap, merge_intervals(d, gap), d, counts[ks])


def compute_spectrum(
    loop: SampledLoop,
    kind: str = "vis",
    n: int = 512,
    tol: Tolerances | None = None,
    resolution: int = 1024,
) -> tuple[DistanceSpectrum, TorusGrid]:
    _check_kind(kind)
    grid = classify_torus(loop, n, tol, resolution if kind == "top" else None)
    return spectrum_from_grid(grid, kind), grid


def distinct_distances(spec: DistanceSpectrum, bin: float) -> int:
    if not bin > 0:
        raise SpectrumError("bin must be > 0")
    if spec.empty:
        return 0
    return int(np.unique(np.floor(spec.distances / bin)).size)


RED = (255, 0, 0)
GREEN = (0, 160, 0)
WHITE = (255, 255, 255)


def torus_image(grid: TorusGrid, kind: str = "vis") -> np.ndarray:
    img = np.empty((grid.n, grid.n, 3), dtype=np.uint8)
    img[:] = GREEN
    img[grid.member(kind)] = RED
    img[grid.cells == Cell.DIAGONAL] = WHITE
    return img


def export_torus_ppm(grid: TorusGrid, path, kind: str = "vis") -> None:
    """Binary PPM (P6); row i is the first parameter, column j the second."""
    img = torus_image(grid, kind)
    Path(path).write_bytes(b"P6\n%d %d\n255\n" % (grid.n, grid.n) + img.tobytes())


def diagonal_profile(grid: TorusGrid, kind: str = "vis") -> np.ndarray:
    """Red cells on each diagonal ``j - i = s (mod n)``, for s = 0 .. n-1."""
    return mask_profile(grid.member(kind))


def mask_profile(mask: np.ndarray) -> np.ndarray:
    n = mask.shape[0]
    i = np.arange(n)
    return np.array([np.count_nonzero(mask[i, (i + s) % n]) for s in range(n)])


def count_bands(mask: np.ndarray, rel_prominence: float = 0.5) -> int:
    """Number of red stripes parallel to the diagonal of a square mask.

    A stripe is a peak of the diagonal profile whose prominence is at least
    ``rel_prominence`` times its height, so two stripes are told apart when
    the profile between them drops below half of the lower one.
    """
    prof = mask_profile(mask).astype(float)
    # the excluded diagonal separates offsets 1 .. n-1 from each other
    padded = np.concatenate([[0.0], prof[1:], [0.0]])
    peaks, props = find_peaks(padded, prominence=0)
    keep = props["prominences"] >= rel_prominence * padded[peaks]
    return int(np.count_nonzero(keep))


def diagonal_bands(grid: TorusGrid, kind: str = "vis", rel_prominence: float = 0.5) -> int:
    return count_bands(grid.member(kind), rel_prominence)


def read_ppm(path) -> np.ndarray:
    """Pixels of a binary PPM written by :func:`export_torus_ppm`."""
    data = Path(path).read_bytes()
    m = re.match(rb"P6\s+(\d+)\s+(\d+)\s+255\s", data)
    if m is None:
        raise SpectrumError("not an 8-bit P6 file")
    w, h = int(m.group(1)), int(m.group(2))
    return np.frombuffer(data[m.end():], np.uint8).reshape(h, w, 3)
