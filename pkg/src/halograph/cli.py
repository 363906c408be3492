"""Command-line front end: ``halograph <command> ...``.

Every command also accepts ``--config FILE``: a JSON object whose keys
fill in any option not given on the command line (dashes become
underscores).  Exit status is 0 on success, 1 for usage or input errors
and 2 when the science fails (no solution found, verification FAIL).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from halograph import constructions
from halograph.errors import HaloGraphError, NoSolution, NotAHalo
from halograph.export import to_dot, to_svg
from halograph.graph import Graph, MatchingTable
from halograph.halo import HaloTemplate, Hypergraph, expand, extract_halo, validate_template
from halograph.optimize import OptimizerConfig, discover, fidelity
from halograph.states import TargetSpec, bell, ghz, ket_to_string
from halograph.verify import GateSpec, verify_gate, verify_state

log = logging.getLogger("halograph")

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def load_graph(source: Any) -> Graph:
    data = read_json(source) if isinstance(source, (str, Path)) else source
    if not isinstance(data, dict):
        raise UsageError("a graph must be a JSON object")
    return Graph.from_dict(data)


def load_graph_or_hypergraph(path: str) -> Graph | Hypergraph:
    data = read_json(path)
    if isinstance(data, dict) and data.get("hyperedges"):
        return Hypergraph.from_dict(data)
    return load_graph(data)


def load_target(source: Any) -> TargetSpec:
    """A target file, an inline target object or a named family.

    Named families: ``{"family": "ghz", "n": 4, "d": 3}`` or
    ``{"family": "bell", "d": 2}``.
    """
    data = read_json(source) if isinstance(source, (str, Path)) else source
    if not isinstance(data, dict):
        raise UsageError("a target must be a JSON object")
    family = data.get("family")
    if family == "ghz":
        return ghz(int(data["n"]), int(data["d"]))
    if family == "bell":
        return bell(int(data.get("d", 2)))
    if family is not None:
        raise UsageError(f"unknown target family {family!r}")
    return TargetSpec.from_dict(data)


def state_json(g: Graph) -> dict[str, Any]:
    state = MatchingTable(g).state()
    return {
        "pm_count": MatchingTable(g).pm_count,
        "kets": [ket_to_string(k) for k, _ in state.items()],
        "amplitudes": [a.real if isinstance(a, complex) and a.imag == 0 else a
                       for _, a in state.items()],
        "norm": state.norm,
    }


def cmd_discover(args: argparse.Namespace) -> int:
    if args.target is None:
        raise UsageError("discover needs a target (file or config key 'target')")
    target = load_target(args.target)
    opts = dict(args.optimizer or {})
    if args.seed is not None:
        opts["seed"] = args.seed
    cfg = OptimizerConfig.from_dict(opts)
    try:
        result = discover(target, cfg)
    except NoSolution as exc:
        log.error("%s", exc)
        return EXIT_FAIL
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    (out / "graph.json").write_text(dump_json(result.graph.to_dict()))
    (out / "result.json").write_text(dump_json(result.to_dict()))
    ok = result.fidelity >= cfg.prune_threshold_fidelity
    print(f"fidelity {result.fidelity:.12f}, {result.pm_count} perfect matchings, "
          f"{len(result.graph.edges)} edges")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_state(args: argparse.Namespace) -> int:
    emit(dump_json(state_json(load_graph(args.graph))), args.out)
    return EXIT_OK


def cmd_fidelity(args: argparse.Namespace) -> int:
    if args.target is None:
        raise UsageError("fidelity needs --target")
    f = fidelity(load_graph(args.graph), load_target(args.target))
    emit(dump_json({"fidelity": f}), args.out)
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    if args.main is None or args.ancillas is None:
        raise UsageError("extract-halo needs main and ancillas")
    g = load_graph(args.graph)
    base = load_graph(args.base) if args.base else None
    tpl = extract_halo(g, args.main, args.ancillas, base=base,
                       close_vacuum=bool(args.close_vacuum), name=args.name or "")
    emit(dump_json(tpl.to_dict()), args.out)
    return EXIT_OK


def cmd_expand(args: argparse.Namespace) -> int:
    if args.template is None:
        raise UsageError("expand needs --template")
    h = Hypergraph.from_dict(read_json(args.hypergraph))
    tpl = constructions.checked_template(read_json(args.template), args.template)
    emit(dump_json(expand(h, tpl).to_dict()), args.out)
    return EXIT_OK


def construct_family(family: str, param: int, tpl: HaloTemplate | None):
    """Build one family member and the report that checks it."""
    builders = {"ghz": constructions.construct_ghz,
                "ghz63": constructions.construct_ghz_family_63,
                "swap": constructions.construct_swapping}
    if family in builders:
        g = builders[family](param, tpl)
        return g, verify_state(g, constructions.expected_target(family, param, g, tpl))
    if family == "cnot":
        g = constructions.construct_cnot(param, tpl)
        return g, verify_gate(g, GateSpec.for_graph(g, 2, 2 * param))
    raise UsageError(f"unknown family {family!r}")


def cmd_construct(args: argparse.Namespace) -> int:
    if args.family is None or args.param is None:
        raise UsageError("construct needs a family and a parameter")
    tpl = None
    if args.template is not None:
        tpl = constructions.checked_template(read_json(args.template), args.template)
    g, report = construct_family(args.family, int(args.param), tpl)
    emit(dump_json({**g.to_dict(), "verification": report.to_dict()}), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args: argparse.Namespace) -> int:
    tol = 1e-9 if args.tol is None else args.tol
    if args.template_check:
        rep = validate_template(HaloTemplate.from_dict(read_json(args.graph)), tol)
        emit(dump_json(rep.to_dict()), args.out)
        return EXIT_OK if rep.passed else EXIT_FAIL
    g = load_graph(args.graph)
    if args.gate:
        try:
            d1, d2 = (int(x) for x in str(args.gate).split(","))
        except ValueError as exc:
            raise UsageError("--gate takes D1,D2") from exc
        report = verify_gate(g, GateSpec.for_graph(g, d1, d2), tol)
    elif args.target is not None:
        report = verify_state(g, load_target(args.target), tol)
    else:
        raise UsageError("verify needs --target or --gate")
    emit(dump_json(report.to_dict()), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_export(args: argparse.Namespace) -> int:
    fmt = args.format or "json"
    obj = load_graph_or_hypergraph(args.graph)
    if fmt == "dot":
        text = to_dot(obj)
    elif fmt == "svg":
        text = to_svg(obj)
    elif fmt == "json":
        text = dump_json(obj.to_dict())
    else:
        raise UsageError(f"unknown format {fmt!r}")
    emit(text, args.out)
    return EXIT_OK


def int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file supplying default option values")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path (directory for discover)")
    common.add_argument("--format", help="export format: dot, svg or json")
    common.add_argument("--tol", type=float)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="halograph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", parents=[common], help="find a graph for a target state")
    p.add_argument("target", nargs="?", help="target JSON file")
    p.set_defaults(func=cmd_discover, optimizer=None)

    p = sub.add_parser("state", parents=[common], help="post-selected state of a graph")
    p.add_argument("graph", nargs="?")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("fidelity", parents=[common], help="fidelity of a graph with a target")
    p.add_argument("graph", nargs="?")
    p.add_argument("--target")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("extract-halo", parents=[common], help="cut an emitter template out of a graph")
    p.add_argument("graph", nargs="?")
    p.add_argument("--main", type=int_list)
    p.add_argument("--ancillas", type=int_list)
    p.add_argument("--base")
    p.add_argument("--close-vacuum", action="store_true", default=None)
    p.add_argument("--name")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("expand", parents=[common], help="replace hyperedges by template copies")
    p.add_argument("hypergraph", nargs="?")
    p.add_argument("--template")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("construct", parents=[common], help="build and verify a family member")
    p.add_argument("family", nargs="?", choices=["ghz", "ghz63", "swap", "cnot"])
    p.add_argument("param", nargs="?", type=int)
    p.add_argument("--template")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="check a graph against a target or gate")
    p.add_argument("graph", nargs="?")
    p.add_argument("--target")
    p.add_argument("--gate", help="CNOT dimensions D1,D2")
    p.add_argument("--template-check", action="store_true", default=None,
                   help="treat the input as a template and validate it")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", parents=[common], help="write DOT, SVG or JSON")
    p.add_argument("graph", nargs="?")
    p.set_defaults(func=cmd_export)
    return parser


def apply_config(args: argparse.Namespace) -> None:
    if not args.config:
        return
    data = read_json(args.config)
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    for key, value in data.items():
        attr = key.replace("-", "_")
        if attr in ("config", "func", "command"):
            continue
        if not hasattr(args, attr):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        apply_config(args)
        for attr in ("graph", "hypergraph"):
            if hasattr(args, attr) and getattr(args, attr) is None:
                raise UsageError(f"{args.command} needs a {attr} file")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoSolution as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except NotAHalo as exc:
        print(f"not an emitter: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except HaloGraphError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: bad input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
