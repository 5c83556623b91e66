"""Command-line surface: analyze, lift, verify, birkhoff.

Exit codes: 0 success, 2 parse error (message includes the position),
3 enumeration bound overflow, 4 lift obstruction, 5 not a sublattice.
Errors are emitted as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dynsys_lift, formats, verify
from .expr import ParseError
from .grid import (
    NotASublattice,
    comb_att_lattice,
    grid_attractor_lift,
    grid_lift_problem,
)
from .lattice import SetLattice, booleanize, join_irreducibles
from .lifting import ObstructionFound, lift
from .order import TooLarge
from .formats import InputError, RunConfig

EXIT_PARSE = 2
EXIT_BOUND = 3
EXIT_OBSTRUCTION = 4
EXIT_SUBLATTICE = 5


def _fail(code: int, kind: str, message: str, **extra) -> int:
    payload = {"error": kind, "message": message}
    payload.update(extra)
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def _read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    config = RunConfig("analyze", [args.input], args.output, args.format, seed=args.seed)
    try:
        doc = _read_json(args.input)
    except json.JSONDecodeError as exc:
        return _fail(EXIT_PARSE, "parse", f"invalid JSON at position {exc.pos}: {exc.msg}")
    try:
        if doc.get("type") == "interval_map":
            cmap = formats.load_gridmap(doc)
            config.grid = {
                "domain": doc["domain"],
                "cells": doc["cells"],
                "expr": doc["expr"],
                "samples_per_cell": doc.get("samples_per_cell", 32),
                "padding": doc.get("padding", 1e-9),
            }
            lat = comb_att_lattice(cmap)
            if args.format == "dot":
                _emit(formats.hasse_dot(lat), args.output)
                return 0
            payload = formats.lattice_payload(lat, config)
            payload["attractors"] = [formats.cellset_payload(e, cmap.grid) for e in lat.elements]
            _emit(formats.dumps(payload), args.output)
            return 0
        system = formats.load_system(doc)
        att = system.att_lattice()
        rep = system.rep_lattice()
        if args.format == "dot":
            _emit(formats.hasse_dot(att), args.output)
            return 0
        payload = formats.lattice_payload(att, config)
        payload["attractors"] = [formats.sorted_labels(e, att.universe) for e in att.elements]
        payload["repellers"] = [formats.sorted_labels(e, rep.universe) for e in rep.elements]
        payload["anbhd_count"] = len(system.attracting_neighborhoods())
        payload["rnbhd_count"] = len(system.repelling_neighborhoods())
        payload["dual_pairs"] = [
            {
                "attractor": formats.sorted_labels(e, att.universe),
                "repeller": formats.sorted_labels(system.dual_repeller(e), att.universe),
            }
            for e in att.elements
        ]
        square = system.commuting_square_check()
        payload["diagram_commutes"] = bool(square)
        _emit(formats.dumps(payload), args.output)
        return 0
    except ParseError as exc:
        return _fail(EXIT_PARSE, "parse", str(exc), position=exc.position)
    except InputError as exc:
        return _fail(EXIT_PARSE, "parse", str(exc))
    except TooLarge as exc:
        return _fail(EXIT_BOUND, "bound", str(exc))


def cmd_lift(args) -> int:
    config = RunConfig("lift", [args.input, args.sublattice], args.output, seed=args.seed)
    try:
        doc = _read_json(args.input)
        subdoc = _read_json(args.sublattice)
    except json.JSONDecodeError as exc:
        return _fail(EXIT_PARSE, "parse", f"invalid JSON at position {exc.pos}: {exc.msg}")
    try:
        elements = formats.load_sublattice(subdoc)
        if doc.get("type") in ("interval_map", "cell_map"):
            cmap = formats.load_gridmap(doc)
            cells = [frozenset(int(c) for c in e) for e in elements]
            side = subdoc.get("side", "attractor")
            pins = {
                frozenset(map(int, image)): frozenset(map(int, block))
                for image, block in subdoc.get("pins", [])
            }
            if side == "repeller":
                cert = lift(grid_lift_problem(cmap, cells))
            else:
                cert = grid_attractor_lift(cmap, cells, direct=args.direct, pinned=pins)
        else:
            system = formats.load_system(doc)
            side = subdoc.get("side", "repeller")
            if side == "attractor":
                cert = dynsys_lift.attractor_lift(system, elements)
            else:
                cert = dynsys_lift.repeller_lift(system, elements)
        _emit(formats.dumps(formats.certificate_payload(cert, config)), args.output)
        return 0
    except ParseError as exc:
        return _fail(EXIT_PARSE, "parse", str(exc), position=exc.position)
    except InputError as exc:
        return _fail(EXIT_PARSE, "parse", str(exc))
    except TooLarge as exc:
        return _fail(EXIT_BOUND, "bound", str(exc))
    except ObstructionFound as exc:
        return _fail(
            EXIT_OBSTRUCTION,
            "obstruction",
            str(exc),
            step=exc.step,
            q=str(exc.q),
            alpha=[str(x) for x in sorted(exc.alpha, key=str)],
        )
    except NotASublattice as exc:
        return _fail(EXIT_SUBLATTICE, "not_a_sublattice", str(exc))


def cmd_verify(args) -> int:
    config = RunConfig(
        "verify",
        [],
        args.output,
        bounds={"exhaustive": args.exhaustive, "max_states": args.max_states},
        seed=args.seed,
    )
    systems = []
    if args.exhaustive:
        systems.extend(verify.all_systems(args.exhaustive))
    if args.random:
        systems.extend(verify.random_systems(args.random, args.max_states, args.seed))
    if not systems:
        systems.extend(verify.all_systems(3))
        systems.extend(verify.random_systems(100, 6, args.seed))
    results = verify.run_verification(systems)
    lines = []
    all_ok = True
    for res in results:
        status = "pass" if res.passed else "FAIL"
        lines.append(f"{res.tag:<12} {status}  ({res.systems} systems)")
        if not res.passed:
            all_ok = False
            lines.append(f"    counterexample: {res.counterexample!r}")
    report = "\n".join(lines) + "\n"
    _emit(report, args.output)
    return 0 if all_ok else 1


def cmd_birkhoff(args) -> int:
    config = RunConfig("birkhoff", [args.input], args.output, args.format, seed=args.seed)
    try:
        doc = _read_json(args.input)
    except json.JSONDecodeError as exc:
        return _fail(EXIT_PARSE, "parse", f"invalid JSON at position {exc.pos}: {exc.msg}")
    try:
        if "covers" in doc or "leq" in doc:
            poset = formats.load_poset(doc)
            lat = SetLattice.from_poset(poset)
        else:
            elements = [frozenset(e) for e in doc.get("elements", [])]
            universe = doc.get("universe")
            if universe is None:
                raise InputError("lattice file needs a 'universe' array")
            lat = SetLattice(universe, elements)
        jl = join_irreducibles(lat)
        rep = booleanize(lat)
        if args.format == "dot":
            _emit(formats.hasse_dot(lat), args.output)
            return 0
        payload = formats.lattice_payload(lat, config)
        payload["booleanization_ground"] = [
            formats.sorted_labels(e, lat.universe) for e in jl.carrier
        ]
        # round trip: joining the Birkhoff image of each element recovers it
        payload["round_trip_ok"] = all(
            frozenset().union(*rep.j[a]) == a if rep.j[a] else a == frozenset()
            for a in lat.elements
        )
        _emit(formats.dumps(payload), args.output)
        return 0
    except InputError as exc:
        return _fail(EXIT_PARSE, "parse", str(exc))
    except TooLarge as exc:
        return _fail(EXIT_BOUND, "bound", str(exc))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="morselat",
        description="attractor/repeller lattices and constructive lattice lifting",
    )
    parser.add_argument("--version", action="version", version=formats.VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="attractor/repeller lattices of a system or grid map")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("lift", help="lift a sublattice to neighborhoods")
    p.add_argument("input")
    p.add_argument("sublattice")
    p.add_argument("-o", "--output")
    p.add_argument("--direct", action="store_true", help="attractor-side route without duality")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_lift)

    p = sub.add_parser("verify", help="run the proposition suites over a corpus")
    p.add_argument("--exhaustive", type=int, default=0, metavar="N", help="all maps on N states")
    p.add_argument("--random", type=int, default=0, metavar="COUNT")
    p.add_argument("--max-states", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("birkhoff", help="down-set lattice, irreducibles, Booleanization")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_birkhoff)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
