"""
Neighbor spectra of the standard curve families
===============================================

For each family we classify a 256 x 256 grid of parameter pairs and print
the distance spectrum of every neighbor type as a union of intervals.
A PPM picture of the visual torus is written next to this script.
"""

import warnings
from pathlib import Path

import numpy as np

warnings.filterwarnings("ignore")

from fneighbors import classify_torus, generate
from fneighbors.spectrum import export_torus_ppm, spectrum_from_grid

N = 256
out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

# the circle is the baseline: every pair is a visual and a spherical neighbor
for name in ("circle", "example1", "torusknot", "shielded", "folded"):
    loop = generate(name)
    grid = classify_torus(loop, N)
    print(f"\n{name}: {len(loop.points)} samples, diagonal {loop.diag:.3f}")
    for kind in ("plain", "sph", "vis", "top"):
        s = spectrum_from_grid(grid, kind)
        ivs = ", ".join(f"[{a:.3f}, {b:.3f}]" for a, b in s.intervals[:4])
        more = " ..." if len(s.intervals) > 4 else ""
        print(f"  {kind:5s} measure {s.measure:5.3f}  {ivs}{more}")
    export_torus_ppm(grid, out / f"{name}_vis.ppm", "vis")

# the torus knot loses visual distances as q grows; the trend needs the finer grid
qs = (4, 5, 7, 8)
q_meas = [spectrum_from_grid(classify_torus(generate("torusknot", q=q), 2 * N, resolution=None), "vis").measure
          for q in qs]
print(f"\ntorus knot visual measure for q = {qs}:", np.round(q_meas, 3))
print("pictures in", out)
