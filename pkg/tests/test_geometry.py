import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fneighbors.curves import make_loop
from fneighbors.generators import gen_circle, gen_square
from fneighbors.geometry import (
    GeometryError,
    Segment,
    angular_distance,
    nearest_on_curve,
    segment_curve_hits,
    winding_number,
)

angles = st.floats(-20.0, 20.0, allow_nan=False)


def brute_hits(p, q, pts, excl):
    """Pairwise segment intersection by solving each 2x2 system directly."""
    p, q = np.asarray(p), np.asarray(q)
    out = []
    for a, b in zip(pts, np.roll(pts, -1, axis=0)):
        m = np.column_stack([q - p, a - b])
        if abs(np.linalg.det(m)) < 1e-15:
            continue
        lam, mu = np.linalg.solve(m, a - p)
        if 0 <= lam <= 1 and 0 <= mu <= 1:
            x = p + lam * (q - p)
            if np.hypot(*(x - p)) > excl and np.hypot(*(x - q)) > excl:
                out.append(x)
    return out


class TestAngularDistance:
    def test_antipodal(self):
        assert angular_distance(0.0, math.pi) == pytest.approx(math.pi)

    def test_identity(self):
        assert angular_distance(1.3, 1.3) == 0.0

    def test_wraparound(self):
        assert angular_distance(0.1, 2 * math.pi - 0.1) == pytest.approx(0.2)

    @given(angles, angles, angles)
    def test_metric(self, a, b, c):
        dab = angular_distance(a, b)
        assert 0.0 <= dab <= math.pi + 1e-12
        assert dab == pytest.approx(angular_distance(b, a), abs=1e-12)
        assert dab <= angular_distance(a, c) + angular_distance(c, b) + 1e-9


class TestSegmentHits:
    def test_square_side_crossing(self):
        sq = gen_square(256)
        hits = segment_curve_hits(Segment((0.5, 0.3), (1.5, 0.3)), sq)
        assert len(hits) == 1
        assert hits[0] == pytest.approx([1.0, 0.3])

    def test_inside_circle(self, circle256):
        assert segment_curve_hits(Segment((-0.2, 0.1), (0.3, -0.1)), circle256) == []

    def test_diameter_excludes_endpoints(self, circle256):
        s = Segment((1.0, 0.0), (-1.0, 0.0))
        assert segment_curve_hits(s, circle256, 0.01) == []
        assert brute_hits(s.p, s.q, circle256.points, 0.01) == []

    def test_against_bruteforce(self, rng):
        loop = gen_circle(128, 3)
        for _ in range(30):
            p, q = rng.uniform(-1.5, 1.5, (2, 2))
            ours = segment_curve_hits(Segment(tuple(p), tuple(q)), loop, 0.05)
            ref = brute_hits(p, q, loop.points, 0.05)
            assert len(ours) == len(ref)

    def test_degenerate(self, circle256):
        with pytest.raises(GeometryError):
            segment_curve_hits(Segment((0.0, 0.0), (0.0, 0.0)), circle256)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(0.0, 0.5))
    def test_exclusion_monotone(self, x0, y0, x1, y1, e):
        if x0 == x1 and y0 == y1:
            return
        loop = gen_circle(64, 1)
        s = Segment((x0, y0), (x1, y1))
        full = segment_curve_hits(s, loop, 0.0)
        some = segment_curve_hits(s, loop, e)
        for h in some:
            assert min(np.hypot(*(h - f)) for f in full) < 1e-9


class TestWinding:
    def test_ccw_circle(self):
        assert winding_number(gen_circle(256, 1), (0.0, 0.0)) == 1

    def test_exterior(self):
        assert winding_number(gen_circle(256, 1), (5.0, 0.0)) == 0

    def test_triple(self):
        # oracle: total turning of z -> f(t) summed at a much finer sampling
        t = np.linspace(0, 2 * np.pi, 20001)
        ang = np.unwrap(np.arctan2(np.sin(3 * t), np.cos(3 * t)))
        assert round((ang[-1] - ang[0]) / (2 * np.pi)) == 3
        assert winding_number(gen_circle(384, 3), (0.0, 0.0)) == 3

    def test_on_curve(self):
        with pytest.raises(GeometryError):
            winding_number(gen_circle(256, 1), (1.0, 0.0))

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9), st.floats(-5, 5), st.floats(-5, 5))
    def test_reverse_and_translate(self, zx, zy, sx, sy):
        loop = gen_circle(64, 2)
        z = np.array([zx, zy])
        w = winding_number(loop, z)
        assert winding_number(loop.reversed(), z) == -w
        assert winding_number(loop.transformed(shift=(sx, sy)), z + (sx, sy)) == w


class TestNearest:
    def test_circle_centre(self, circle256):
        ns = nearest_on_curve((0.0, 0.0), circle256, 0.01)
        # inscribed polygon: short of 1 by at most the chord sagitta
        assert ns.distance == pytest.approx(1.0, abs=(2 * np.pi / 256) ** 2 / 8)
        b = np.sort(np.asarray(ns.bearings))
        assert np.max(np.diff(np.concatenate([b, [b[0] + 2 * np.pi]]))) < 0.1

    def test_circle_offcentre(self, circle256):
        ns = nearest_on_curve((0.5, 0.0), circle256, 0.01)
        assert ns.distance == pytest.approx(0.5, abs=(2 * np.pi / 256) ** 2 / 8)
        assert len(ns.points) == 1
        assert ns.points[0] == pytest.approx([1.0, 0.0], abs=2 * np.pi / 256)

    def test_square_centre(self):
        ns = nearest_on_curve((0.0, 0.0), gen_square(256), 0.01)
        # oracle: projection onto each side of the square separately
        assert ns.distance == pytest.approx(1.0)
        mids = {(1, 0), (0, 1), (-1, 0), (0, -1)}
        got = {tuple(int(round(c)) for c in p) for p in ns.points}
        assert got == mids

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-2, 2), st.floats(-2, 2))
    def test_distance_bruteforce(self, zx, zy):
        loop = gen_circle(64, 1)
        z = np.array([zx, zy])
        a = loop.points
        b = np.roll(a, -1, axis=0)
        s = np.linspace(0, 1, 2001)[:, None, None]
        dense = (a + s * (b - a)).reshape(-1, 2)
        ref = np.min(np.hypot(*(dense - z).T))
        d = nearest_on_curve(z, loop).distance
        assert d <= ref + 1e-12
        assert abs(d - ref) <= 1e-9 * max(ref, 1.0) + 1e-6 * loop.h
