"""
Good disks, good chords and ruled sequences
===========================================

A disk inside a complementary component that touches the curve in two or
more places spans a chord whose endpoints are spherical neighbors.
We find such disks in the component of largest index and chain the chords
into a nested (ruled) sequence.
"""

import warnings

import numpy as np

warnings.filterwarnings("ignore")

from fneighbors import (build_component_map, build_ruled_sequence, find_good_disks, good_chords,
                        max_index_component, verify_ruled)
from fneighbors.generators import gen_circle, gen_ellipse, gen_figure_eight

curves = {"circle": gen_circle(1024, 1), "ellipse": gen_ellipse(1024), "figure eight": gen_figure_eight(1024)}

for name, loop in curves.items():
    cmap = build_component_map(loop, 512)
    comp = max_index_component(cmap)
    print(f"\n{name}: components with index {sorted(cmap.index.values())}")
    disks = find_good_disks(cmap, loop, comp)
    chords = good_chords(disks, loop)
    print(f"  {len(disks)} good disks, {len(chords)} good chords in component {comp}")
    if chords:
        lengths = np.array([np.hypot(*(c.endpoints[0] - c.endpoints[1])) for c in chords])
        print(f"  chord length from {lengths.min():.3f} to {lengths.max():.3f}")
    try:
        seq = build_ruled_sequence(cmap, loop, comp, 5, disks=disks)
        print(f"  ruled sequence of {len(seq)} chords, verified {verify_ruled(seq, cmap)}")
    except ValueError as e:
        print("  no ruled sequence:", e)
