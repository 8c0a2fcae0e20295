"""
Horizontal chords on the circle and the torus
=============================================

On the circle, g(x + delta) = g(x) always has a root. On the flat torus a
map f : T^2 -> R^2 has coincidences f(p + s u) = f(p + (s + delta) u) for
some point p and direction u, and the direction map around a base point has
odd degree away from them.
"""

import time
import warnings

import numpy as np

warnings.filterwarnings("ignore")

from fneighbors.hopf import (CircleFunction, TorusMap, direction_map_degree, family_neighbors,
                             find_coincidence_family, grid_maximizer, hopf_pairs_circle)

g = CircleFunction.from_callable(np.cos)
for delta in (0.5, 1.0, 2.0):
    print(f"cos, delta {delta}: roots {np.round(hopf_pairs_circle(g, delta), 6)}")

f = TorusMap.sin_sin()
delta = 0.3
rng = np.random.default_rng(0)
degs = [direction_map_degree(f, p, -delta / 2, delta) for p in rng.random((5, 2))]
print("\ndirection-map degrees at random points:", degs)
print("degree at the maximizer of f_2:", direction_map_degree(f, grid_maximizer(f), 0.0, delta))

for label, fm in (("sin-sin", f), ("random", TorusMap.random(seed=3))):
    t = time.perf_counter()
    pairs = find_coincidence_family(fm, delta)
    gaps = family_neighbors(pairs)
    print(f"{label}: {len(pairs)} coincidence pairs, largest neighbour gap {gaps.max():.4f}, "
          f"{time.perf_counter() - t:.1f}s")
