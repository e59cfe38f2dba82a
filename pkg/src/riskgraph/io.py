"""Canonical graph file format (.rag), report emission, and DOT export.

Graph documents are UTF-8 JSON without a byte-order mark; ids are
non-empty strings and ranks are integers.  Unknown fields are rejected in
strict mode and preserved verbatim in lenient mode, as are display hints.
Serialization is byte-deterministic: sorted keys, fixed indentation.
"""

from __future__ import annotations

import json
from html import escape

from .errors import ParseError, VersionError
from .graph import (
    ATTACHMENT,
    CONSEQUENCE,
    CONSEQUENCE_EDGE,
    COUNTERMEASURE,
    EDGE_KINDS,
    NODE_KINDS,
    Edge,
    Node,
    RiskGraph,
)
from .risk import Evaluation

FORMAT_VERSION = "1"

_NODE_FIELDS = {"id", "label", "kind", "ratings", "connector", "display"}
_EDGE_FIELDS = {"id", "source", "target", "kind", "attributes", "deltas",
                "combine", "display"}
_TOP_FIELDS = {"format_version", "profile", "metadata", "nodes", "edges"}


def _string(value, path: str, allow_empty: bool = False) -> str:
    if not isinstance(value, str) or (not allow_empty and not value):
        raise ParseError("expected a non-empty string", path=path)
    return value


def _rank_map(value, path: str) -> dict[str, int]:
    if not isinstance(value, dict):
        raise ParseError("expected an object of attribute ranks", path=path)
    out = {}
    for key, rank in value.items():
        if not isinstance(rank, int) or isinstance(rank, bool):
            raise ParseError("ranks are integers", path=f"{path}.{key}")
        out[str(key)] = rank
    return out


def _opaque(value, path: str) -> dict | None:
    if value is None:
        return None
    if not isinstance(value, dict):
        raise ParseError("expected an object", path=path)
    return value


def parse_graph(text: str | bytes, strict: bool = False) -> RiskGraph:
    """Parse a graph document; malformed input raises ParseError, never crashes."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not valid UTF-8: {exc}") from exc
    if text.startswith("﻿"):
        raise ParseError("byte-order mark is not allowed")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    except RecursionError as exc:
        raise ParseError("document nests too deeply") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")

    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported format_version {version!r}",
                           path="format_version")

    profile = doc.get("profile")
    if isinstance(profile, str) and profile:
        profile_name, inline = profile, None
    elif isinstance(profile, dict):
        inline = profile
        profile_name = str(inline.get("name", ""))
        if not profile_name:
            raise ParseError("inline profile needs a name", path="profile.name")
    else:
        raise ParseError("profile must be a name or an inline document",
                         path="profile")

    if strict:
        unknown = set(doc) - _TOP_FIELDS
        if unknown:
            raise ParseError(f"unknown field {sorted(unknown)[0]!r}",
                             path=sorted(unknown)[0])

    metadata = doc.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise ParseError("metadata must be an object", path="metadata")

    raw_nodes = doc.get("nodes")
    raw_edges = doc.get("edges")
    if not isinstance(raw_nodes, list):
        raise ParseError("nodes must be an array", path="nodes")
    if not isinstance(raw_edges, list):
        raise ParseError("edges must be an array", path="edges")

    nodes: dict[str, Node] = {}
    for index, entry in enumerate(raw_nodes):
        path = f"nodes[{index}]"
        if not isinstance(entry, dict):
            raise ParseError("node entries are objects", path=path)
        node_id = _string(entry.get("id"), f"{path}.id")
        if node_id in nodes:
            raise ParseError(f"duplicate node id {node_id!r}", path=f"{path}.id")
        kind = entry.get("kind")
        if kind not in NODE_KINDS:
            raise ParseError(f"node kind must be one of {NODE_KINDS}",
                             path=f"{path}.kind")
        extra = {k: v for k, v in entry.items() if k not in _NODE_FIELDS}
        if strict and extra:
            raise ParseError(f"unknown field {sorted(extra)[0]!r}",
                             path=f"{path}.{sorted(extra)[0]}")
        nodes[node_id] = Node(
            id=node_id,
            label=str(entry.get("label", node_id)),
            kind=kind,
            ratings=_rank_map(entry["ratings"], f"{path}.ratings")
            if entry.get("ratings") is not None else None,
            connector=entry.get("connector"),
            display=_opaque(entry.get("display"), f"{path}.display"),
            extra=extra,
        )

    edges: dict[str, Edge] = {}
    for index, entry in enumerate(raw_edges):
        path = f"edges[{index}]"
        if not isinstance(entry, dict):
            raise ParseError("edge entries are objects", path=path)
        edge_id = _string(entry.get("id"), f"{path}.id")
        if edge_id in edges:
            raise ParseError(f"duplicate edge id {edge_id!r}", path=f"{path}.id")
        kind = entry.get("kind")
        if kind not in EDGE_KINDS:
            raise ParseError(f"edge kind must be one of {EDGE_KINDS}",
                             path=f"{path}.kind")
        extra = {k: v for k, v in entry.items() if k not in _EDGE_FIELDS}
        if strict and extra:
            raise ParseError(f"unknown field {sorted(extra)[0]!r}",
                             path=f"{path}.{sorted(extra)[0]}")
        combine = entry.get("combine")
        if combine is not None and not isinstance(combine, str):
            raise ParseError("combine must be a string", path=f"{path}.combine")
        edges[edge_id] = Edge(
            id=edge_id,
            source=_string(entry.get("source"), f"{path}.source"),
            target=_string(entry.get("target"), f"{path}.target"),
            kind=kind,
            attributes=_rank_map(entry["attributes"], f"{path}.attributes")
            if entry.get("attributes") is not None else None,
            deltas=_rank_map(entry["deltas"], f"{path}.deltas")
            if entry.get("deltas") is not None else None,
            combine=combine,
            display=_opaque(entry.get("display"), f"{path}.display"),
            extra=extra,
        )

    return RiskGraph(nodes=nodes, edges=edges, profile_name=profile_name,
                     inline_profile=inline, metadata=metadata,
                     extra={k: v for k, v in doc.items() if k not in _TOP_FIELDS})


def graph_to_document(graph: RiskGraph) -> dict:
    nodes = []
    for node in sorted(graph.nodes.values(), key=lambda n: n.id):
        entry: dict = {"id": node.id, "label": node.label, "kind": node.kind}
        if node.ratings is not None:
            entry["ratings"] = dict(sorted(node.ratings.items()))
        if node.connector is not None:
            entry["connector"] = node.connector
        if node.display is not None:
            entry["display"] = node.display
        entry.update(node.extra)
        nodes.append(entry)
    edges = []
    for edge in sorted(graph.edges.values(), key=lambda e: e.id):
        entry = {"id": edge.id, "source": edge.source, "target": edge.target,
                 "kind": edge.kind}
        if edge.attributes is not None:
            entry["attributes"] = dict(sorted(edge.attributes.items()))
        if edge.deltas is not None:
            entry["deltas"] = dict(sorted(edge.deltas.items()))
        if edge.combine is not None:
            entry["combine"] = edge.combine
        if edge.display is not None:
            entry["display"] = edge.display
        entry.update(edge.extra)
        edges.append(entry)
    doc = {
        "format_version": FORMAT_VERSION,
        "profile": graph.inline_profile if graph.inline_profile is not None
        else graph.profile_name,
        "nodes": nodes,
        "edges": edges,
    }
    if graph.metadata:
        doc["metadata"] = graph.metadata
    doc.update(graph.extra)
    return doc


def serialize_graph(graph: RiskGraph) -> str:
    """Deterministic document text: parse(serialize(g)) == g."""
    return json.dumps(graph_to_document(graph), indent=2, sort_keys=True,
                      ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

REPORT_FORMATS = ("text-table", "json", "dot")


def emit_report(evaluation: Evaluation, graph: RiskGraph, profile,
                format: str = "text-table") -> str:
    """Render an evaluation; identical inputs yield byte-identical output."""
    if format == "json":
        return json.dumps(evaluation.to_dict(), indent=2, sort_keys=True,
                          ensure_ascii=False) + "\n"
    if format == "text-table":
        return _text_table(evaluation, graph)
    if format == "dot":
        return _dot(evaluation, graph, profile)
    raise ValueError(f"unknown report format {format!r} "
                     f"(expected one of {REPORT_FORMATS})")


def _text_table(evaluation: Evaluation, graph: RiskGraph) -> str:
    lines = [f"PROFILE {evaluation.profile}",
             "CONSEQUENCE | IMPACT | FEASIBILITY | RISK"]
    for cons_id in sorted(evaluation.consequences):
        cons = evaluation.consequences[cons_id]
        label = graph.nodes[cons_id].label if cons_id in graph.nodes else cons_id
        for edge_id in sorted(cons.edges):
            edge = cons.edges[edge_id]
            lines.append(
                f"{label} | {edge.impact} | {edge.feasibility} | {edge.risk_label}")
        if len(cons.edges) > 1:
            lines.append(f"{label} (overall) | - | - | {cons.risk_label}")
    lines.append("")
    lines.append("CRITICAL PATHS")
    for cons_id in sorted(evaluation.critical_paths):
        path = evaluation.critical_paths[cons_id]
        label = graph.nodes[cons_id].label if cons_id in graph.nodes else cons_id
        kind = "critical attack tree" if path.kind == "tree" else "critical path"
        lines.append(f"{label} [{kind}]: " + " -> ".join(path.nodes))
    if evaluation.diagnostics:
        lines.append("")
        lines.append("DIAGNOSTICS")
        lines.extend(evaluation.diagnostics)
    return "\n".join(lines) + "\n"


_RISK_PALETTE = ("palegreen", "khaki", "orange", "tomato", "firebrick")


def _risk_color(schema, rank: int) -> str:
    position = schema.ranks.index(rank)
    if len(schema.ranks) == 1:
        return _RISK_PALETTE[0]
    scaled = round(position * (len(_RISK_PALETTE) - 1) / (len(schema.ranks) - 1))
    return _RISK_PALETTE[scaled]


def _ratings_html(result) -> str:
    parts = []
    for name in sorted(result.ratings_effective):
        effective = result.ratings_effective[name]
        authored = result.ratings_authored.get(name)
        short = escape(name[:1])
        if authored is not None and authored != effective:
            parts.append(f'{short}:<font color="blue"><s>{authored}</s></font>'
                         f"&nbsp;{effective}")
        else:
            parts.append(f"{short}:{effective}")
    return " ".join(parts)


def _dot(evaluation: Evaluation, graph: RiskGraph, profile) -> str:
    disabled = set(evaluation.overlay.get("disabled", []))
    metric = profile.feasibility_schema.name
    critical_edges = set()
    for path in evaluation.critical_paths.values():
        included = set(path.nodes)
        for node_id in path.nodes:
            result = evaluation.nodes[node_id]
            children = (result.selected_children
                        if result.selected_children is not None
                        else graph.attack_children(node_id))
            critical_edges.update(
                (node_id, child) for child in children if child in included)

    lines = [
        "digraph riskgraph {",
        "  rankdir=TB;",
        '  node [fontname="Helvetica", shape=box, style=filled, fillcolor=white];',
        '  edge [fontname="Helvetica"];',
    ]
    for node in sorted(graph.nodes.values(), key=lambda n: n.id):
        attrs = []
        title = escape(node.label)
        if node.kind == CONSEQUENCE:
            cons = evaluation.consequences[node.id]
            color = _risk_color(profile.risk_schema, cons.risk)
            attrs.append('shape=box')
            attrs.append('style="rounded,filled"')
            attrs.append(f'fillcolor="{color}"')
            attrs.append(f"label=<{title}<br/>Risk: {escape(cons.risk_label)}>")
        elif node.kind == COUNTERMEASURE:
            attrs.append('fillcolor="lightblue"')
            if node.id in disabled:
                attrs.append('style="filled,dashed"')
                attrs.append(f"label=<{title}<br/><i>disabled</i>>")
            else:
                attrs.append(f"label=<{title}>")
        else:
            result = evaluation.nodes[node.id]
            body = [title]
            if result.connector and result.connector != "OR":
                body[0] = f"<b>{escape(result.connector)}</b> " + body[0]
            if result.ratings_effective is not None:
                body.append(_ratings_html(result))
                attrs.append('fillcolor="palegreen"')
            body.append(f"{escape(metric)}: {escape(result.feasibility_label)}")
            attrs.append("label=<" + "<br/>".join(body) + ">")
        lines.append(f'  "{node.id}" [{", ".join(attrs)}];')

    for edge in sorted(graph.edges.values(), key=lambda e: e.id):
        attrs = []
        if edge.kind == CONSEQUENCE_EDGE:
            result = evaluation.consequences[edge.source].edges[edge.id]
            if result.impact != result.impact_authored:
                attrs.append(
                    f'label=<Impact: <font color="blue"><s>{result.impact_authored}'
                    f"</s></font>&nbsp;{result.impact}>")
            else:
                attrs.append(f'label="Impact: {result.impact}"')
            start = evaluation.critical_paths[edge.source].nodes
            if start and start[0] == edge.target:
                attrs.append('color="red"')
                attrs.append("penwidth=2")
        elif edge.kind == ATTACHMENT:
            attrs.append("style=dashed")
            attrs.append('color="gray"' if edge.target in disabled
                         else 'color="steelblue"')
        elif (edge.source, edge.target) in critical_edges:
            attrs.append('color="red"')
            attrs.append("penwidth=2")
        suffix = f' [{", ".join(attrs)}]' if attrs else ""
        lines.append(f'  "{edge.source}" -> "{edge.target}"{suffix};')
    lines.append("}")
    return "\n".join(lines) + "\n"
