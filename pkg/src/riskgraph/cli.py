"""Command-line entry points: validate, evaluate, critical-path, serve."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .countermeasures import Overlay, what_if
from .errors import (
    GraphInvalidError,
    ParseError,
    ProfileError,
    RiskGraphError,
)
from .feasibility import evaluate_graph
from .graph import RiskGraph, validate
from .io import REPORT_FORMATS, emit_report, parse_graph
from .profiles import Profile, load_profile, resolve_profile

PROFILE_DIR_ENV = "RAG_PROFILE_DIR"


def profile_search_dirs() -> list[str]:
    raw = os.environ.get(PROFILE_DIR_ENV, "")
    return [d for d in raw.split(os.pathsep) if d]


def _load_graph(path: str, strict: bool = False) -> RiskGraph:
    return parse_graph(Path(path).read_bytes(), strict=strict)


def _resolve(graph: RiskGraph, profile_name: str | None) -> Profile:
    if profile_name:
        return resolve_profile(profile_name, profile_search_dirs())
    if graph.inline_profile is not None:
        return load_profile(graph.inline_profile)
    return resolve_profile(graph.profile_name, profile_search_dirs())


def _overlay_from_args(args) -> Overlay:
    overrides: dict[str, dict[str, int]] = {}
    for assignment in args.set or []:
        try:
            target, value = assignment.split("=", 1)
            ident, attr = target.rsplit(".", 1)
            overrides.setdefault(ident, {})[attr] = int(value)
        except ValueError:
            raise SystemExit(f"error: --set expects id.attribute=rank, got {assignment!r}")
    return Overlay(disabled=frozenset(args.disable or []),
                   rating_overrides=overrides)


def cmd_validate(args) -> int:
    try:
        graph = _load_graph(args.path, strict=args.strict)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    try:
        profile = _resolve(graph, args.profile)
    except ProfileError as exc:
        print(f"profile error: {exc}", file=sys.stderr)
        return 2
    report = validate(graph, profile)
    if report.violations or report.notes:
        print(report.render())
    return 0 if report.ok else 1


def cmd_evaluate(args) -> int:
    try:
        graph = _load_graph(args.path)
        profile = _resolve(graph, args.profile)
    except (ParseError, ProfileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    overlay = _overlay_from_args(args)
    try:
        if overlay.is_baseline:
            evaluation = evaluate_graph(graph, profile)
            result = None
        else:
            result = what_if(graph, profile, overlay)
            evaluation = result.evaluation
    except GraphInvalidError as exc:
        print(exc.report.render(), file=sys.stderr)
        return 1
    except RiskGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    output = emit_report(evaluation, graph, profile, args.format)
    if args.format == "text-table" and result is not None:
        output += _delta_section(result, graph)
    sys.stdout.write(output)
    return 0


def _delta_section(result, graph: RiskGraph) -> str:
    lines = ["", "WHAT-IF DELTA (versus all countermeasures enabled)"]
    for cons_id, entry in sorted(result.delta["consequences"].items()):
        label = graph.nodes[cons_id].label
        marker = "" if entry["risk_before"] == entry["risk_after"] else " *"
        lines.append(f"{label}: {entry['risk_label_before']} -> "
                     f"{entry['risk_label_after']}{marker}")
    for node_id, entry in sorted(result.delta["nodes"].items()):
        lines.append(f"{graph.nodes[node_id].label}: feasibility "
                     f"{entry['feasibility_before']} -> {entry['feasibility_after']}")
    return "\n".join(lines) + "\n"


def cmd_critical_path(args) -> int:
    try:
        graph = _load_graph(args.path)
        profile = _resolve(graph, args.profile)
    except (ParseError, ProfileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        evaluation = evaluate_graph(graph, profile)
    except GraphInvalidError as exc:
        print(exc.report.render(), file=sys.stderr)
        return 1
    if args.consequence not in evaluation.critical_paths:
        print(f"error: unknown consequence {args.consequence!r}", file=sys.stderr)
        return 1
    path = evaluation.critical_paths[args.consequence]
    kind = "critical attack tree" if path.kind == "tree" else "critical path"
    print(f"{args.consequence} [{kind}]")
    for node_id in path.nodes:
        print(f"  {node_id}  ({graph.nodes[node_id].label})")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    try:
        return serve(port=args.port, graph_dir=args.graph_dir, ui_dir=args.ui_dir,
                     profile_dirs=profile_search_dirs(),
                     session_timeout=args.session_timeout)
    except OSError as exc:
        print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskgraph",
        description="Evaluate risk assessment graphs against standards profiles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a graph document against a profile")
    p.add_argument("path")
    p.add_argument("--profile", help="profile name overriding the document's")
    p.add_argument("--strict", action="store_true",
                   help="reject unknown document fields")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("evaluate", help="evaluate a graph and print a report")
    p.add_argument("path")
    p.add_argument("--profile")
    p.add_argument("--format", choices=REPORT_FORMATS, default="text-table")
    p.add_argument("--disable", action="append", metavar="CM_ID",
                   help="disable a countermeasure (repeatable)")
    p.add_argument("--set", action="append", metavar="ID.ATTR=RANK",
                   help="override a rating or impact (repeatable)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("critical-path", help="print the highest-risk attack path")
    p.add_argument("path")
    p.add_argument("--profile")
    p.add_argument("--consequence", required=True)
    p.set_defaults(func=cmd_critical_path)

    p = sub.add_parser("serve", help="run the HTTP evaluation service")
    p.add_argument("--port", type=int, default=8337)
    p.add_argument("--graph-dir", default=".")
    p.add_argument("--ui-dir", default=None,
                   help="static UI bundle directory (default: ./frontend/dist if present)")
    p.add_argument("--session-timeout", type=int, default=3600,
                   help="idle seconds before a what-if session expires")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
