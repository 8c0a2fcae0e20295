"""Neighbor spectra of closed planar curves.

A sampled loop ``f: S^1 -> R^2`` is classified pair by pair into plain,
spherical, visual and topological neighbors; the distances ``|a - b|`` of
each type form the spectra studied here.  Companion modules cover the
complementary components of the image and Hopf-type coincidence problems.
"""

from .complement import (
    ComponentMap,
    build_component_map,
    build_ruled_sequence,
    check_wind_relation,
    find_good_disks,
    good_chords,
    max_index_component,
    verify_ruled,
)
from .curves import SampledLoop, load, make_loop, resample, save
from .generators import DEFAULTS, FAMILIES, generate
from .hopf import (
    ALL_X,
    CircleFunction,
    CoincidencePair,
    TorusMap,
    delta_conjugacy_probe,
    direction_map,
    direction_map_degree,
    find_coincidence_family,
    hopf_pairs_circle,
)
from .neighbors import NeighborVerdict, Tolerances, classify_pair, spherical_gap, spherical_oracle
from .spectrum import DistanceSpectrum, TorusGrid, classify_torus, compute_spectrum, distinct_distances

__version__ = "0.1.0"
