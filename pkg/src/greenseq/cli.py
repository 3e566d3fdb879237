"""``greenseq`` command line: results as JSON (or DOT) on stdout, logs on stderr."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx
from pydantic import ValidationError

from .cache import CertificateCache, certificate_key
from .classify import classify, formula_breakdown, min_length
from .constants import DEFAULT_DOT_GRAPH_NAME, EXIT_DOMAIN_ERROR, EXIT_OK, EXIT_USAGE, STAGES_TYPE_IV
from .construct import min_mgs
from .disk import TaggedTriangulation, adjacency_quiver, flip, flip_sequence, lower_bound_IV, rho, type_IV_stages
from .exceptions import GreenSeqError, MalformedQuiver, MalformedTriangulation
from .green_seq import (
    GreenSequence,
    apply_green_sequence,
    certify,
    enumerate_exchange_graph,
    graph_to_jsonl,
    is_maximal_green,
    restrict_mgs,
    shortest_mgs,
)
from .logger import setup_logging
from .quiver_core import Quiver, arrow_view, matrix_view, mutate
from .schemas import (
    CertificateDocument,
    ClassificationDocument,
    QuiverDocument,
    VerdictDocument,
    load_quiver,
    load_triangulation,
)
from .settings import settings

log = logging.getLogger("greenseq.cli")


class _InputError(Exception):
    pass


def _vertices(text: str) -> List[int]:
    try:
        return list(GreenSequence.parse(text).steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated vertices, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greenseq", description="Maximal green sequences of quivers.")
    parser.add_argument("--log-level", default=None, help="Override GREENSEQ_LOG_LEVEL (default: %(default)s)")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-q", "--quiver", required=True, help="Quiver JSON document or matrix text file")
        return p

    p = command("mutate", "Mutate the quiver along a vertex sequence")
    p.add_argument("-s", "--sequence", type=_vertices, required=True)

    p = command("verify", "Check that a sequence is a maximal green sequence")
    p.add_argument("-s", "--sequence", type=_vertices, required=True)

    p = command("search", "Breadth-first search for a shortest maximal green sequence")
    p.add_argument("--depth", type=int, default=None, help="Depth bound (default: GREENSEQ_SEARCH_DEPTH)")
    p.add_argument("--nodes", type=int, default=None, help="Seed budget (default: GREENSEQ_SEARCH_NODE_LIMIT)")

    command("classify", "Recognise the mutation class family of the quiver")
    command("minlen", "Minimal length of a maximal green sequence by formula")
    command("construct", "Build and verify a minimal length maximal green sequence")

    p = command("exchange-graph", "Enumerate the oriented exchange graph")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--nodes", type=int, default=None, help="Seed budget (default: GREENSEQ_ENUMERATE_NODE_LIMIT)")
    p.add_argument("--green-only", action="store_true", help="Follow green mutations only")

    p = command("restrict", "Restrict a maximal green sequence to a full subquiver")
    p.add_argument("-s", "--sequence", type=_vertices, required=True)
    p.add_argument("--subquiver", type=_vertices, required=True)

    p = sub.add_parser("disk", help="Type IV construction on a tagged triangulation of the punctured disk")
    p.add_argument("-t", "--triangulation", required=True, help="Triangulation JSON document")
    p.add_argument("--snapshots", action="store_true", help="Also print the triangulation after every flip")
    return parser


def emit_dot(graph: nx.DiGraph) -> str:
    """DOT text with nodes in canonical key order and green edges labelled by c-vectors."""
    names = {key: f"s{i}" for i, key in enumerate(sorted(graph))}
    ordered = nx.DiGraph()
    for key in sorted(graph):
        attrs = graph.nodes[key]
        ordered.add_node(
            names[key],
            label=f'"{json.dumps(attrs["c"], separators=(",", ":"))}"',
            shape="doublecircle" if attrs["all_red"] else "circle",
        )
    for source, target in sorted(graph.edges, key=lambda e: (names[e[0]], names[e[1]])):
        attrs = graph.edges[source, target]
        ordered.add_edge(
            names[source],
            names[target],
            label=f'"{attrs["vertex"]}: {json.dumps(attrs["c_vector"], separators=(",", ":"))}"',
            color="green",
        )
    dot = nx.nx_pydot.to_pydot(ordered)
    dot.set_name(DEFAULT_DOT_GRAPH_NAME)
    return dot.to_string()


def _cached(command: str, quiver: Quiver, params: tuple, compute: Callable[[], dict]) -> dict:
    if not settings.cache_dir:
        return compute()
    key = certificate_key(command, matrix_view(quiver), *params)
    with CertificateCache(settings.cache_dir, settings.cache_expire_seconds) as cache:
        hit = cache.get(key)
        if hit is not None:
            log.debug("certificate cache hit", extra={"command": command})
            return hit
        result = compute()
        cache.set(key, result)
        return result


def _mutate(quiver: Quiver, args: argparse.Namespace) -> dict:
    matrix = matrix_view(quiver)
    for k in args.sequence:
        matrix = mutate(matrix, k)
    return QuiverDocument.from_quiver(arrow_view(matrix)).model_dump(exclude_none=True)


def _verify(quiver: Quiver, args: argparse.Namespace) -> dict:
    return VerdictDocument.model_validate(certify(quiver, args.sequence)).model_dump(exclude_none=True)


def _search(quiver: Quiver, args: argparse.Namespace) -> dict:
    depth = args.depth if args.depth is not None else settings.search_depth
    nodes = args.nodes if args.nodes is not None else settings.search_node_limit

    def compute() -> dict:
        return CertificateDocument(**shortest_mgs(quiver, depth, nodes).to_dict()).model_dump()

    return _cached("search", quiver, (depth, nodes), compute)


def _classify(quiver: Quiver, args: argparse.Namespace) -> dict:
    found = classify(quiver)
    report = found.to_dict()
    try:
        report["length"] = min_length(quiver, found)
        report["breakdown"] = formula_breakdown(quiver, found)
    except GreenSeqError as exc:
        log.info("no length formula", extra={"class": found.tag, "reason": exc.message})
    return ClassificationDocument.model_validate(report).model_dump(by_alias=True, exclude_none=True)


def _minlen(quiver: Quiver, args: argparse.Namespace) -> dict:
    def compute() -> dict:
        found = classify(quiver)
        return {
            "class": found.tag,
            "length": min_length(quiver, found),
            "breakdown": formula_breakdown(quiver, found),
        }

    return _cached("minlen", quiver, (), compute)


def _construct(quiver: Quiver, args: argparse.Namespace) -> dict:
    found = classify(quiver)
    steps, length = min_mgs(quiver, found)
    _, trace = apply_green_sequence(quiver, steps)
    return {
        "class": found.tag,
        "sequence": list(steps.steps),
        "length": length,
        "trace": trace.to_list(),
        "breakdown": formula_breakdown(quiver, found),
        "verified": True,
    }


def _exchange_graph(quiver: Quiver, args: argparse.Namespace) -> str:
    graph = enumerate_exchange_graph(quiver, node_limit=args.nodes, green_only=args.green_only, depth=args.depth)
    if args.format == "dot":
        return emit_dot(graph)
    return graph_to_jsonl(graph)


def _restrict(quiver: Quiver, args: argparse.Namespace) -> dict:
    restricted = restrict_mgs(quiver, args.sequence, args.subquiver)
    return {"subquiver": sorted(set(args.subquiver)), "sequence": list(restricted.steps), "length": len(restricted)}


def _snapshots(triangulation: TaggedTriangulation, steps: List[Tuple[str, int]]) -> List[dict]:
    snapshots = [{"step": 0, "triangulation": triangulation.to_dict()}]
    for step, (stage, vertex) in enumerate(steps, start=1):
        triangulation, arc = flip(triangulation, vertex)
        snapshots.append(
            {
                "step": step,
                "stage": stage,
                "vertex": vertex,
                "arc": arc.to_dict(),
                "triangulation": triangulation.to_dict(),
            }
        )
    return snapshots


def _disk(triangulation: TaggedTriangulation, args: argparse.Namespace) -> dict:
    stages = type_IV_stages(triangulation)
    steps = [(stage, vertex) for stage in STAGES_TYPE_IV for vertex in stages[stage]]
    sequence = GreenSequence(tuple(vertex for _, vertex in steps))
    quiver = adjacency_quiver(triangulation)
    report = {
        "adjacency": QuiverDocument.from_quiver(quiver).model_dump(exclude_none=True),
        "stages": {stage: list(stages[stage]) for stage in STAGES_TYPE_IV},
        "sequence": list(sequence.steps),
        "length": len(sequence),
        "lower_bound": lower_bound_IV(triangulation),
        "verified": bool(is_maximal_green(quiver, sequence)),
        "ends_at_rotation": flip_sequence(triangulation, sequence.steps).same_arcs(rho(triangulation)),
    }
    if args.snapshots:
        report["snapshots"] = _snapshots(triangulation, steps)
    return report


HANDLERS: Dict[str, Callable[[Any, argparse.Namespace], object]] = {
    "mutate": _mutate,
    "verify": _verify,
    "search": _search,
    "classify": _classify,
    "minlen": _minlen,
    "construct": _construct,
    "exchange-graph": _exchange_graph,
    "restrict": _restrict,
    "disk": _disk,
}


def _load(args: argparse.Namespace) -> Any:
    if args.command == "disk":
        what, path, loader = "triangulation", args.triangulation, load_triangulation
    else:
        what, path, loader = "quiver", args.quiver, load_quiver
    try:
        return loader(path)
    except (OSError, json.JSONDecodeError, ValidationError, MalformedQuiver, MalformedTriangulation) as exc:
        raise _InputError(f"cannot read {what} from {path}: {exc}") from exc


def _write(result: object) -> None:
    if isinstance(result, str):
        sys.stdout.write(result if result.endswith("\n") else result + "\n")
    else:
        sys.stdout.write(json.dumps(result) + "\n")


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    setup_logging(level=args.log_level)

    try:
        subject = _load(args)
    except _InputError as exc:
        log.error(str(exc))
        sys.stderr.write(str(exc) + "\n")
        return EXIT_USAGE

    try:
        result = HANDLERS[args.command](subject, args)
    except GreenSeqError as exc:
        log.warning(
            "command failed", extra={"command": args.command, "error": type(exc).__name__, "context": exc.context}
        )
        _write(exc.to_dict())
        return EXIT_DOMAIN_ERROR
    _write(result)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
