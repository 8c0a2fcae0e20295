import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fneighbors.hopf import (
    ALL_X,
    CircleFunction,
    CoincidenceFound,
    HopfError,
    TorusMap,
    delta_conjugacy_probe,
    direction_map,
    direction_map_degree,
    direction_vectors,
    family_neighbors,
    find_coincidence_family,
    grid_maximizer,
    hopf_pairs_circle,
    refine_coincidences,
)

TAU = 2 * math.pi
SIN_SIN = TorusMap.sin_sin()


def units(m):
    th = np.arange(m) * (TAU / m)
    return np.column_stack([np.cos(th), np.sin(th)])


def angle_sum_degree(f, p, s, delta, m=4000):
    """Oracle: winding of V(u) from a much finer direction sampling."""
    v = direction_vectors(f, p, s, delta, units(m))
    ang = np.unwrap(np.arctan2(v[:, 1], v[:, 0]))
    return round((ang[-1] - ang[0] + np.angle(np.exp(1j * (ang[0] - ang[-1])))) / TAU)


class TestCircle:
    @pytest.mark.parametrize("delta", [0.5, 1.0, 2.0, 3.0])
    def test_cos(self, delta):
        roots = hopf_pairs_circle(CircleFunction.from_callable(np.cos), delta)
        want = sorted([(-delta / 2) % TAU, math.pi - delta / 2])
        assert np.allclose(roots, want, atol=1e-9)

    def test_constant(self):
        g = CircleFunction.from_callable(lambda x: np.full_like(x, 2.0))
        assert hopf_pairs_circle(g, 1.0) is ALL_X

    def test_sin_half_turn(self):
        roots = hopf_pairs_circle(CircleFunction.from_callable(np.sin), math.pi)
        assert np.allclose(roots, [0.0, math.pi], atol=1e-9)

    def test_sampled(self):
        t = np.arange(512) * (TAU / 512)
        roots = hopf_pairs_circle(CircleFunction(t, np.cos(t)), 1.0)
        assert np.allclose(roots, [math.pi - 0.5, TAU - 0.5], atol=1e-4)

    def test_delta_range(self):
        with pytest.raises(HopfError):
            hopf_pairs_circle(CircleFunction.from_callable(np.cos), TAU)

    def test_too_few_samples(self):
        with pytest.raises(HopfError):
            CircleFunction(np.arange(4.0), np.zeros(4))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=3, max_size=3), st.floats(0.05, TAU - 0.05))
    def test_at_least_two_roots(self, coef, delta):
        def g(x):
            return coef[0] * np.cos(x) + coef[1] * np.sin(2 * x) + coef[2] * np.cos(3 * x + 1.0)

        roots = hopf_pairs_circle(CircleFunction.from_callable(g), delta)
        if roots is ALL_X:
            return
        assert len(roots) >= 2
        r = np.asarray(roots)
        assert np.all(np.abs(g(r + delta) - g(r)) < 1e-8)


class TestDirectionMap:
    def test_antipodal(self):
        p, d = (0.13, 0.41), 0.3
        u = units(256)
        v = np.array([direction_map(SIN_SIN, p, -d / 2, d, x) for x in u])
        w = np.array([direction_map(SIN_SIN, p, -d / 2, d, -x) for x in u])
        assert np.max(np.abs(v + w)) < 1e-12

    def test_constant_map(self):
        for x in units(8):
            with pytest.raises(CoincidenceFound, match="coincidence encountered"):
                direction_map(TorusMap.constant((1.0, 2.0)), (0.2, 0.3), 0.0, 0.3, x)

    def test_small_delta_limit(self):
        p, u, d = np.array([0.21, 0.67]), np.array([0.6, 0.8]), 1e-6
        v = direction_map(SIN_SIN, p, 0.0, d, u)
        g = SIN_SIN.jacobian(p) @ u
        assert np.allclose(v, g / np.hypot(*g), atol=1e-5)

    def test_jacobian_finite_difference(self):
        f = TorusMap.random(seed=3)
        p = np.array([0.3, 0.8])
        h = 1e-6
        fd = np.column_stack([(f(p + h * e) - f(p - h * e)) / (2 * h) for e in np.eye(2)])
        assert np.allclose(f.jacobian(p), fd, atol=1e-6)

    def test_integer_frequencies(self):
        with pytest.raises(HopfError):
            TorusMap(([1.0, 0.5, 0, 0], [1.0, 0, 1, 0]))


class TestDegree:
    @settings(max_examples=20, deadline=None)
    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0.05, 0.45))
    def test_odd_at_half_offset(self, x, y, d):
        try:
            deg = direction_map_degree(SIN_SIN, (x, y), -d / 2, d)
        except CoincidenceFound:
            return
        assert deg % 2 == 1
        assert deg == angle_sum_degree(SIN_SIN, (x, y), -d / 2, d)

    def test_zero_at_maximizer(self):
        p = grid_maximizer(SIN_SIN)
        assert SIN_SIN(p)[1] == pytest.approx(1.0)
        v = direction_vectors(SIN_SIN, p, 0.0, 0.3, units(720))
        assert np.all(v[:, 1] <= 1e-12)
        assert direction_map_degree(SIN_SIN, p, 0.0, 0.3) == 0

    def test_homotopy_invariance(self):
        f = TorusMap(([0.05, 1, 0, 0.3], [0.05, 0, 1, 1.1]))
        p, d = (0.37, 0.12), 0.2
        ss = np.linspace(-0.13, -0.07, 61)
        # certify the interval: |V| stays away from 0 on a dense (s, u) grid
        floor = min(np.hypot(*direction_vectors(f, p, s, d, units(2000)).T).min() for s in ss)
        assert floor > 1e-3
        degs = {direction_map_degree(f, p, s, d) for s in ss[::5]}
        assert len(degs) == 1

    def test_coincidence_reported(self):
        with pytest.raises(CoincidenceFound) as e:
            direction_map_degree(TorusMap.constant(), (0.1, 0.1), 0.0, 0.3)
        assert e.value.pair.residual == 0.0


class TestFamily:
    def test_residuals(self):
        pairs = find_coincidence_family(SIN_SIN, 0.3, coarse=(16, 16, 32))
        assert pairs
        for c in pairs:
            assert np.hypot(*(SIN_SIN(c.endpoint) - SIN_SIN(c.p))) <= 1e-10
            assert np.hypot(*c.u) == pytest.approx(1.0)

    def test_vertical_branch(self):
        # u = (0, 1), delta = 1/2: the first coordinate is unchanged and
        # sin 2*pi*(y + 1/2) = sin 2*pi*y forces y in {0, 1/2}; x is free
        seeds = np.array([[x, y, math.pi / 2] for x in (0.25, 0.75) for y in (0.02, 0.47)])
        x, res = refine_coincidences(SIN_SIN, 0.5, seeds)
        assert np.all(res <= 1e-10)
        assert np.allclose(x[:, 0], [0.25, 0.25, 0.75, 0.75], atol=1e-6)
        assert np.allclose(np.minimum(x[:, 1] % 0.5, 0.5 - x[:, 1] % 0.5), 0.0, atol=1e-6)
        pairs = find_coincidence_family(SIN_SIN, 0.5, coarse=(16, 16, 32))
        vert = [c for c in pairs if abs(c.u[0]) < 1e-6]
        assert vert
        for c in vert:
            assert min(c.p[1] % 0.5, 0.5 - c.p[1] % 0.5) < 1e-6

    def test_constant_cap(self):
        pairs = find_coincidence_family(TorusMap.constant(), 0.3, coarse=(8, 8, 8), cap=50)
        assert len(pairs) == 50

    def test_generic_family(self):
        pairs = find_coincidence_family(TorusMap.random(seed=0), 0.3)
        assert len(pairs) >= 100
        assert np.all(family_neighbors(pairs) <= 0.05)

    def test_deterministic(self):
        a = find_coincidence_family(SIN_SIN, 0.3, coarse=(8, 8, 16))
        b = find_coincidence_family(SIN_SIN, 0.3, coarse=(8, 8, 16))
        assert [c.to_dict() for c in a] == [c.to_dict() for c in b]


class TestConjugacy:
    def test_unit_loops(self):
        assert delta_conjugacy_probe((0.2, 0.2), (0.2, 0.2), 1.0) == 4

    def test_none(self):
        assert delta_conjugacy_probe((0.2, 0.2), (0.2, 0.2), 0.3) == 0

    def test_offset(self):
        assert delta_conjugacy_probe((0.1, 0.5), (0.4, 0.5), 0.3) >= 2

    def test_pythagorean(self):
        # lattice vectors of length 5: (+-5, 0), (0, +-5), (+-3, +-4), (+-4, +-3)
        assert delta_conjugacy_probe((0, 0), (0, 0), 5.0) == 12
