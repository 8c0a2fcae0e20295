import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fneighbors import classify_torus, compute_spectrum, distinct_distances, generate
from fneighbors.curves import make_loop
from fneighbors.generators import gen_circle
from fneighbors.spectrum import (
    KINDS,
    Cell,
    DistanceSpectrum,
    SpectrumError,
    diagonal_bands,
    export_torus_ppm,
    merge_intervals,
    spectrum_from_grid,
)

PI = math.pi


@pytest.fixture(scope="module")
def circle_grid(circle):
    return classify_torus(circle, 512, resolution=512)


@pytest.fixture(scope="module")
def ex1_grids(example1):
    return {n: classify_torus(example1, n) for n in (256, 512)}


def covered(x, intervals, pad):
    return any(a - pad <= x <= b + pad for a, b in intervals)


class TestIntervals:
    def test_merge(self):
        assert merge_intervals(np.array([0.1, 0.2, 0.3, 1.0, 1.05]), 0.11) == [(0.1, 0.3), (1.0, 1.05)]

    def test_merge_empty(self):
        assert merge_intervals(np.array([]), 0.1) == []

    def test_holes(self):
        s = DistanceSpectrum("vis", 512, 0.05, [(0.1, 0.5), (1.0, PI)], np.array([0.1]), np.array([1]))
        assert s.holes() == [(0.0, 0.1), (0.5, 1.0)]
        assert s.measure == pytest.approx(0.4 + PI - 1.0)

    def test_distinct_empty(self):
        s = DistanceSpectrum("plain", 512, 0.05, [], np.array([]), np.array([], int))
        assert distinct_distances(s, 0.01) == 0

    def test_bad_kind(self, circle_grid):
        with pytest.raises(SpectrumError):
            spectrum_from_grid(circle_grid, "near")


class TestCircle:
    def test_vis_full(self, circle_grid):
        s = spectrum_from_grid(circle_grid, "vis")
        assert len(s.intervals) == 1
        lo, hi = s.intervals[0]
        assert lo <= 8 * PI / 512 and hi == pytest.approx(PI)
        assert s.measure == pytest.approx(PI, abs=8 * PI / 512)

    def test_plain_empty(self, circle_grid):
        assert spectrum_from_grid(circle_grid, "plain").empty

    def test_no_chain_violations(self, circle_grid):
        assert sum(circle_grid.chain_violations().values()) == 0

    def test_bins_fill(self):
        # at N = 1024 every bin of width 0.01 in (0, pi] receives a grid distance
        s, _ = compute_spectrum(gen_circle(256), "vis", 1024)
        assert distinct_distances(s, 0.01) >= 300

    def test_ppm(self, circle_grid, tmp_path):
        path = tmp_path / "c.ppm"
        export_torus_ppm(circle_grid, path, "vis")
        data = path.read_bytes()
        header = b"P6\n512 512\n255\n"
        assert data.startswith(header) and len(header) <= 15
        assert len(data) == len(header) + 3 * 512 * 512
        img = np.frombuffer(data[len(header):], np.uint8).reshape(512, 512, 3)
        off = ~np.eye(512, dtype=bool)
        assert np.all(img[off] == (255, 0, 0))


class TestExample1:
    def test_two_intervals(self, ex1_grids):
        s = spectrum_from_grid(ex1_grids[512], "vis")
        assert len(s.intervals) == 2
        ends = [s.intervals[0][0], s.intervals[0][1], s.intervals[1][0], s.intervals[1][1]]
        for got, want in zip(ends, [0.0, 0.35, 2 * PI / 3 - 0.35, PI]):
            assert abs(got - want) <= 0.1

    def test_kind_monotone(self, ex1_grids):
        m = [spectrum_from_grid(ex1_grids[512], k).measure for k in KINDS]
        assert m == sorted(m)

    def test_refinement(self, ex1_grids):
        g = 8 * PI / 256
        for kind in ("sph", "vis", "top"):
            fine = spectrum_from_grid(ex1_grids[512], kind).intervals
            for a, b in spectrum_from_grid(ex1_grids[256], kind).intervals:
                assert covered(a, fine, g) and covered(b, fine, g)

    def test_parameter_shift(self, example1, ex1_grids):
        moved = make_loop(zip(np.mod(example1.params + 0.37, 2 * PI), example1.points))
        grid = classify_torus(moved, 512)
        for kind in ("vis", "top"):
            a = spectrum_from_grid(ex1_grids[512], kind).intervals
            b = spectrum_from_grid(grid, kind).intervals
            assert len(a) == len(b)
            assert np.allclose(a, b, atol=8 * PI / 512)


def test_torusknot_bands():
    _, grid = compute_spectrum(generate("torusknot", q=4), "vis", 512)
    assert diagonal_bands(grid, "vis") >= 4


def test_torusknot_sph_refines():
    loop = generate("torusknot", q=5)
    counts = [distinct_distances(compute_spectrum(loop, "sph", n)[0], 0.01) for n in (256, 512)]
    assert counts[1] > counts[0]


def test_grid_structure(circle_grid):
    d = circle_grid.distances()
    assert np.all(np.diag(circle_grid.cells) == Cell.DIAGONAL)
    # equal angular distance along every wrap-around diagonal
    i = np.arange(512)
    for s in (1, 100, 256):
        assert np.ptp(d[i, (i + s) % 512]) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0, PI), min_size=1, max_size=60), st.floats(1e-3, 0.5))
def test_merge_covers_values(values, gap):
    iv = merge_intervals(np.asarray(values), gap)
    assert all(covered(v, iv, 0.0) for v in values)
    for (_, hi), (lo, _) in zip(iv, iv[1:]):
        assert lo - hi > gap
