"""Sampled closed curves ``f: S^1 -> R^2`` and their JSON file format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .geometry import TWO_PI, bbox_diagonal, normalize_angle

MIN_SAMPLES = 8
FORMAT_VERSION = 1
#: adjacent image points may be at most diag / MAX_STEP_DIV apart; a regular
#: 8-gon in any rotation passes
MAX_STEP_DIV = 3.0


class CurveError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SampledLoop:
    """A closed curve given by ``N`` samples ``points[i] = f(params[i])``.

    Between samples the curve is linear in the parameter, including across the
    seam from ``params[-1]`` to ``params[0] + 2*pi``.  Build instances through
    :func:`make_loop`, which sorts and validates.
    """

    params: np.ndarray
    points: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    closed = True

    def __len__(self) -> int:
        return len(self.params)

    @property
    def diag(self) -> float:
        return bbox_diagonal(self.points)

    @property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(*(np.roll(self.points, -1, axis=0) - self.points).T)

    @property
    def h(self) -> float:
        """Longest image edge; the discretisation scale used by tolerances."""
        return float(self.edge_lengths.max())

    def eval(self, t) -> np.ndarray:
        return evaluate(self, t)

    def reversed(self) -> SampledLoop:
        """Same image traversed backwards (``t -> -t``)."""
        t = normalize_angle(-self.params)
        return make_loop(zip(t, self.points), meta=dict(self.meta, reversed=True))

    def transformed(self, matrix=None, shift=(0.0, 0.0)) -> SampledLoop:
        m = np.eye(2) if matrix is None else np.asarray(matrix, dtype=float)
        pts = self.points @ m.T + np.asarray(shift, dtype=float)
        return _build(self.params.copy(), pts, dict(self.meta))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _build(params: np.ndarray, points: np.ndarray, meta: dict) -> SampledLoop:
    n = len(params)
    if n < MIN_SAMPLES:
        raise CurveError("too few samples")
    if not np.all(np.isfinite(points)):
        raise CurveError("non-finite image point")
    if np.any(np.diff(params) <= 0):
        raise CurveError("duplicate parameter")
    steps = np.hypot(*(np.roll(points, -1, axis=0) - points).T)
    if steps.max() > bbox_diagonal(points) / MAX_STEP_DIV:
        raise CurveError("under-sampled curve")
    return SampledLoop(_readonly(params), _readonly(points), meta)


def make_loop(samples: Iterable, meta: dict | None = None) -> SampledLoop:
    """Build a loop from ``(t, (x, y))`` or ``(t, x, y)`` samples."""
    ts, pts = [], []
    for s in samples:
        if len(s) == 3:
            t, x, y = s
        else:
            t, (x, y) = s
        ts.append(t)
        pts.append((x, y))
    if len(ts) < MIN_SAMPLES:
        raise CurveError("too few samples")
    t = normalize_angle(np.asarray(ts, dtype=float))
    order = np.argsort(t, kind="stable")
    t = t[order]
    if np.any(np.diff(t) == 0):
        raise CurveError("duplicate parameter")
    return _build(t, np.asarray(pts, dtype=float)[order], dict(meta or {}))


def loop_from_arrays(params, points, meta: dict | None = None) -> SampledLoop:
    params = np.asarray(params, dtype=float)
    points = np.asarray(points, dtype=float)
    return make_loop(((t, p) for t, p in zip(params, points)), meta)


def evaluate(loop: SampledLoop, t) -> np.ndarray:
    """Piecewise-linear interpolation with wraparound.

    Exact (bit-for-bit) at stored parameters.  Accepts scalars or arrays; the
    result has shape ``(..., 2)``.
    """
    tp, pts = loop.params, loop.points
    t = np.asarray(normalize_angle(np.asarray(t, dtype=float)), dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    n = len(tp)
    i = np.searchsorted(tp, t, side="right") - 1  # -1 means before params[0]
    i0 = np.where(i < 0, n - 1, i)
    i1 = (i0 + 1) % n
    t0 = tp[i0] - np.where(i < 0, TWO_PI, 0.0)
    t1 = tp[i1] + np.where(i1 == 0, TWO_PI, 0.0) - np.where(i < 0, TWO_PI, 0.0)
    w = (t - t0) / (t1 - t0)
    out = pts[i0] + w[:, None] * (pts[i1] - pts[i0])
    exact = w == 0.0
    out[exact] = pts[i0[exact]]
    return out[0] if scalar else out


def resample(loop: SampledLoop, n: int) -> SampledLoop:
    """``n`` samples uniform in parameter, starting at 0."""
    if n < MIN_SAMPLES:
        raise CurveError("too few samples")
    t = np.arange(n) * (TWO_PI / n)
    return _build(t, evaluate(loop, t), dict(loop.meta))


def lipschitz_bound(loop: SampledLoop) -> float:
    gaps = np.diff(np.append(loop.params, loop.params[0] + TWO_PI))
    return float(loop.edge_lengths.max() / gaps.min())


# ---------------------------------------------------------------- file format

def to_json(loop: SampledLoop) -> str:
    doc = {
        "version": FORMAT_VERSION,
        "closed": True,
        "samples": [[float(t), float(x), float(y)] for t, (x, y) in zip(loop.params, loop.points)],
        "meta": loop.meta,
    }
    return json.dumps(doc)


def from_json(text: str) -> SampledLoop:
    doc = json.loads(text)
    if doc.get("version") != FORMAT_VERSION:
        raise CurveError(f"unsupported curve file version {doc.get('version')!r}")
    if doc.get("closed") is not True:
        raise CurveError("curve file must describe a closed curve")
    return make_loop(doc["samples"], doc.get("meta") or {})


def save(loop: SampledLoop, path) -> None:
    Path(path).write_text(to_json(loop))


def load(path) -> SampledLoop:
    return from_json(Path(path).read_text())

