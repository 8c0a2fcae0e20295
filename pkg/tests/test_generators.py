import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fneighbors import compute_spectrum, generate
from fneighbors.generators import (
    DEFAULTS,
    GeneratorError,
    fold_map,
    gen_circle,
    gen_example1,
    gen_folded,
    gen_shielded,
    gen_torusknot,
    shielded_eps,
)
from fneighbors.geometry import winding_number


class TestCircle:
    @pytest.mark.parametrize("k", [1, -1, 3])
    def test_winding(self, k):
        assert winding_number(gen_circle(256, k), (0.0, 0.0)) == k

    def test_double_cover_plain(self):
        # cos 2a = cos 2b and sin 2a = sin 2b exactly when b = a + pi
        s, _ = compute_spectrum(gen_circle(1024, 2), "plain", 512)
        assert s.intervals == [(pytest.approx(math.pi), pytest.approx(math.pi))]

    def test_zero_winding_rejected(self):
        with pytest.raises(GeneratorError):
            gen_circle(256, 0)


class TestExample1:
    def test_pinch_points_meet(self):
        # A and D of the construction coincide up to closeness * diag
        eps = math.radians(20)
        loop = gen_example1(2048, eps, 0.05)
        a, d = loop.eval(math.radians(20)), loop.eval(math.radians(160))
        assert np.hypot(*(a - d)) <= 0.05 * loop.diag

    def test_red_measure(self):
        loop = gen_example1(2048, 0.35, 0.05)
        red = np.asarray(loop.meta["red"])
        assert len(red) == 3
        assert np.sum(red[:, 1] - red[:, 0]) == pytest.approx(3 * 0.35)

    def test_bad_eps(self):
        with pytest.raises(GeneratorError):
            gen_example1(2048, 1.2, 0.05)


class TestTorusKnot:
    def test_q4_boundaries(self):
        loop = gen_torusknot(2048, 4)
        assert len(loop.meta["breaks"]) == 8
        red = np.asarray(loop.meta["red"])
        assert np.sum(red[:, 1] - red[:, 0]) == pytest.approx(loop.meta["red_total"])

    def test_red_schedule(self):
        r4 = gen_torusknot(1024, 4).meta["red_total"]
        r8 = gen_torusknot(1024, 8).meta["red_total"]
        assert r8 / r4 == pytest.approx((4 / 8) ** 3)

    @pytest.mark.parametrize("q", [4, 5, 7])
    def test_red_arcs_on_polygon(self, q):
        loop = gen_torusknot(2048, q)
        step = 2 * math.pi / q
        w = loop.meta["red_total"] / q
        t = (np.arange(q)[:, None] * step + np.linspace(-0.45, 0.45, 7) * w).ravel()
        z = loop.eval(t)
        # distance from each point to the regular q-gon of circumradius 0.5
        v = 0.5 * np.column_stack([np.cos(np.arange(q) * step), np.sin(np.arange(q) * step)])
        e = np.roll(v, -1, axis=0) - v
        s = np.clip(np.einsum("pkj,kj->pk", z[:, None] - v, e) / np.einsum("kj,kj->k", e, e), 0, 1)
        d = np.hypot(*(v + s[..., None] * e - z[:, None]).transpose(2, 0, 1)).min(axis=1)
        assert d.max() < 1e-9

    def test_q_multiple_of_three(self):
        with pytest.raises(GeneratorError):
            gen_torusknot(1024, 6)


class TestShielded:
    def test_hole_near_target(self):
        s, _ = compute_spectrum(gen_shielded(), "top", 512)
        target = math.pi / 2 - 0.3
        assert any(a < target < b for a, b in s.holes())

    def test_eps_schedule(self):
        assert shielded_eps(4) == pytest.approx(0.05)
        for k in (3, 4, 6):
            assert shielded_eps(k) < math.pi / k**2


class TestFolded:
    def test_plain_small_distances(self):
        s, _ = compute_spectrum(gen_folded(), "plain", 512)
        assert s.distances.min() < 4 * 2 * math.pi / 512

    def test_plain_at_fold_width(self):
        # partner of a across the fold, from bisection on s(b) = s(a)
        D = 0.3
        a = 2.9
        f = lambda b: fold_map(b, D) - fold_map(a, D)  # noqa: E731
        lo, hi = math.pi + 1e-9, math.pi + D
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if f(lo) * f(mid) > 0 else (lo, mid)
        s, _ = compute_spectrum(gen_folded(fold_depth=D), "plain", 512)
        assert np.min(np.abs(s.distances - (lo - a))) < 2 * 2 * math.pi / 512

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.05, 0.95))
    def test_image_is_circle(self, depth):
        loop = gen_folded(256, depth)
        assert np.allclose(np.hypot(*loop.points.T), 1.0)


@pytest.mark.parametrize("family", sorted(DEFAULTS))
def test_defaults_validate(family):
    loop = generate(family)
    assert len(loop) == DEFAULTS[family]["n"]


def test_minimum_n():
    assert len(gen_circle(8, 1)) == 8
    assert len(gen_folded(8)) == 8
