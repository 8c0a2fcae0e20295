"""Command-line front end: ``fneighbors <subcommand> ...``.

Results go to files or standard output, diagnostics to standard error.
Exit status is 0 on success, 1 on invalid input and 2 on I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import complement, curves, generators, hopf, neighbors, spectrum

log = logging.getLogger("fneighbors")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _apply_threads() -> None:
    n = os.environ.get("OMEGA_THREADS")
    if not n:
        return
    import numba

    try:
        k = int(n)
    except ValueError as e:
        raise UsageError("OMEGA_THREADS must be a positive integer") from e
    if k < 1:
        raise UsageError("OMEGA_THREADS must be a positive integer")
    numba.set_num_threads(min(k, numba.config.NUMBA_NUM_THREADS))


def _distinct_paths(*paths) -> None:
    given = [Path(p).resolve() for p in paths if p]
    if len(set(given)) != len(given):
        raise UsageError("input and output paths must be distinct")


def _emit(text: str, path) -> None:
    if path:
        Path(path).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


# ------------------------------------------------------------------ commands


def cmd_gen(args) -> None:
    params = {}
    for key in ("n", "k", "q", "eps", "closeness", "fold_depth", "a", "b", "side"):
        v = getattr(args, key, None)
        if v is not None:
            params[key] = v
    for item in args.set or []:
        key, _, val = item.partition("=")
        if not key or not val:
            raise UsageError(f"bad --set item {item!r}, expected key=value")
        params[key] = json.loads(val)
    try:
        loop = generators.generate(args.family, **params)
    except TypeError as e:
        raise UsageError(str(e)) from e
    curves.save(loop, args.output)
    log.info("wrote %d samples to %s", len(loop.points), args.output)


def cmd_spectrum(args) -> None:
    _distinct_paths(args.input, args.output, args.ppm)
    loop = curves.load(args.input)
    spec, grid = spectrum.compute_spectrum(loop, args.kind, args.grid, resolution=args.resolution)
    _emit(_dump(spec.to_dict()), args.output)
    if args.ppm:
        spectrum.export_torus_ppm(grid, args.ppm, args.kind)


def cmd_classify(args) -> None:
    _distinct_paths(args.input, args.output)
    loop = curves.load(args.input)
    cmap = complement.build_component_map(loop, args.resolution) if args.resolution else None
    v = neighbors.classify_pair(loop, args.a, args.b, cmap=cmap)
    out = {
        "a": args.a,
        "b": args.b,
        "plain": v.plain,
        "spherical": v.spherical,
        "visual": v.visual,
        "topological": v.topological,
        "raw": list(v.raw),
        "witness": v.witness,
        "notes": v.notes,
    }
    _emit(_dump(out), args.output)


def cmd_components(args) -> None:
    _distinct_paths(args.input, args.output, args.pgm)
    loop = curves.load(args.input)
    cmap = complement.build_component_map(loop, args.resolution)
    rows = [
        {"id": c, "index": cmap.index[c], "cells": cmap.sizes[c], "bounded": c != cmap.unbounded_id}
        for c in cmap.ids
    ]
    _emit(_dump({"resolution": cmap.resolution, "components": rows}), args.output)
    if args.pgm:
        complement.export_pgm(cmap, args.pgm)


def _chord_dict(c: complement.GoodChord) -> dict:
    return {
        "endpoints": [e.tolist() for e in c.endpoints],
        "preimages": [list(map(float, p)) for p in c.preimages],
        "disk": {"center": c.witness.center.tolist(), "radius": c.witness.radius},
    }


def cmd_chords(args) -> None:
    _distinct_paths(args.input, args.output)
    loop = curves.load(args.input)
    cmap = complement.build_component_map(loop, args.resolution)
    comp = args.component if args.component is not None else complement.max_index_component(cmap)
    disks = complement.find_good_disks(cmap, loop, comp)
    chords = complement.good_chords(disks, loop)
    out = {"component": comp, "index": cmap.index.get(comp), "chords": [_chord_dict(c) for c in chords]}
    try:
        seq = complement.build_ruled_sequence(cmap, loop, comp, args.length, disks=disks)
        out["ruled"] = {"chords": [_chord_dict(c) for c in seq], "verified": complement.verify_ruled(seq, cmap)}
    except complement.ComplementError as e:
        out["ruled"] = {"chords": [], "verified": False, "error": str(e)}
    _emit(_dump(out), args.output)


def _circle_function(args) -> hopf.CircleFunction:
    if args.samples:
        data = json.loads(Path(args.samples).read_text())
        return hopf.CircleFunction(np.asarray(data["params"]), np.asarray(data["values"]))
    if args.func not in hopf.NAMED_FUNCTIONS:
        raise UsageError(f"unknown function {args.func!r}; choose from {sorted(hopf.NAMED_FUNCTIONS)}")
    return hopf.CircleFunction.from_callable(hopf.NAMED_FUNCTIONS[args.func])


def cmd_hopf_circle(args) -> None:
    roots = hopf.hopf_pairs_circle(_circle_function(args), args.delta)
    if roots is hopf.ALL_X:
        _emit("all x", args.output)
    else:
        _emit("\n".join(repr(r) for r in roots), args.output)


def _torus_map(args) -> hopf.TorusMap:
    if args.map == "sinsin":
        return hopf.TorusMap.sin_sin()
    if args.map == "random":
        return hopf.TorusMap.random(seed=args.seed)
    if args.map == "const":
        return hopf.TorusMap.constant()
    return hopf.TorusMap.from_dict(json.loads(Path(args.map).read_text()))


def cmd_hopf_torus(args) -> None:
    f = _torus_map(args)
    if args.mode == "degree":
        # default pairs: the maximizer of f_2 at s = 0, a given point at s = -delta/2
        if args.p is None:
            p, s0 = hopf.grid_maximizer(f), 0.0
        else:
            p, s0 = np.asarray(args.p), -0.5 * args.delta
        s = s0 if args.s is None else args.s
        _emit(str(hopf.direction_map_degree(f, p, s, args.delta, args.M)), args.output)
        return
    pairs = hopf.find_coincidence_family(f, args.delta, args.coarse, args.tol, args.cap)
    lines = [_dump(c.to_dict()) for c in pairs]
    _emit("\n".join(lines), args.output)
    log.info("%d coincidence pairs", len(pairs))


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fneighbors", description="Neighbor spectra of closed planar curves.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a curve file")
    g.add_argument("--family", required=True, choices=sorted(generators.FAMILIES))
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--q", type=int)
    g.add_argument("--eps", type=float)
    g.add_argument("--closeness", type=float)
    g.add_argument("--fold-depth", dest="fold_depth", type=float)
    g.add_argument("--set", action="append", metavar="KEY=VALUE", help="any other generator parameter")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(run=cmd_gen)

    s = sub.add_parser("spectrum", help="distance spectrum of one neighbor type")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--kind", default="vis", choices=spectrum.KINDS)
    s.add_argument("--grid", type=int, default=512)
    s.add_argument("--resolution", type=int, default=1024, help="raster for the topological test")
    s.add_argument("--ppm", help="also write the colored torus as PPM")
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_spectrum)

    c = sub.add_parser("classify", help="classify one parameter pair")
    c.add_argument("-i", "--input", required=True)
    c.add_argument("--a", type=float, required=True)
    c.add_argument("--b", type=float, required=True)
    c.add_argument("--resolution", type=int, default=1024, help="raster for the topological test (0 skips it)")
    c.add_argument("-o", "--output")
    c.set_defaults(run=cmd_classify)

    m = sub.add_parser("components", help="complementary components and their indices")
    m.add_argument("-i", "--input", required=True)
    m.add_argument("--resolution", type=int, default=512)
    m.add_argument("--pgm", help="also write the label raster as PGM")
    m.add_argument("-o", "--output")
    m.set_defaults(run=cmd_components)

    h = sub.add_parser("chords", help="good chords and a ruled sequence in one component")
    h.add_argument("-i", "--input", required=True)
    h.add_argument("--resolution", type=int, default=512)
    h.add_argument("--component", type=int, help="component id (default: largest index)")
    h.add_argument("--length", type=int, default=5)
    h.add_argument("-o", "--output")
    h.set_defaults(run=cmd_chords)

    hc = sub.add_parser("hopf-circle", help="roots of g(x + delta) = g(x)")
    src = hc.add_mutually_exclusive_group(required=True)
    src.add_argument("--func", help=f"one of {sorted(hopf.NAMED_FUNCTIONS)}")
    src.add_argument("--samples", help="JSON file with 'params' and 'values'")
    hc.add_argument("--delta", type=float, required=True)
    hc.add_argument("-o", "--output")
    hc.set_defaults(run=cmd_hopf_circle)

    ht = sub.add_parser("hopf-torus", help="coincidence pairs or direction-map degree on the flat torus")
    ht.add_argument("--map", default="sinsin", help="sinsin, random, const or a JSON map file")
    ht.add_argument("--delta", type=float, required=True)
    ht.add_argument("--mode", choices=("pairs", "degree"), default="pairs")
    ht.add_argument("--p", type=float, nargs=2, help="base point for --mode degree (default: grid maximizer of f_2)")
    ht.add_argument("--s", type=float, help="geodesic offset for --mode degree (default: 0 at the maximizer, else -delta/2)")
    ht.add_argument("--M", type=int, default=720)
    ht.add_argument("--coarse", type=int, nargs=3, default=list(hopf.COARSE))
    ht.add_argument("--tol", type=float, default=1e-10)
    ht.add_argument("--cap", type=int, default=5000)
    ht.add_argument("--seed", type=int, default=0)
    ht.add_argument("-o", "--output")
    ht.set_defaults(run=cmd_hopf_torus)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                            format="%(levelname)s: %(message)s")
        if args.command is None:
            ap.print_usage(sys.stderr)
            return 1
        _apply_threads()
        args.run(args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
