"""Risk assessment graph model and structural validation.

A graph holds three node kinds: attack nodes refined through directed
edges into sub-goals, consequence nodes naming the negative outcomes of
the topmost attack goals, and countermeasure leaves that harden attack
steps or dampen impacts.  Graphs are treated as immutable after parsing;
every operation here is pure, so concurrent read-only use is safe.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .aggregate import COMBINE_FUNCTIONS
from .errors import CycleError

ATTACK = "attack"
CONSEQUENCE = "consequence"
COUNTERMEASURE = "countermeasure"
NODE_KINDS = (ATTACK, CONSEQUENCE, COUNTERMEASURE)

REFINEMENT = "refinement"
CONSEQUENCE_EDGE = "consequence"
ATTACHMENT = "countermeasure"
EDGE_KINDS = (REFINEMENT, CONSEQUENCE_EDGE, ATTACHMENT)


@dataclass
class Node:
    id: str
    label: str
    kind: str
    ratings: dict[str, int] | None = None
    connector: str | None = None
    display: dict | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class Edge:
    id: str
    source: str
    target: str
    kind: str
    attributes: dict[str, int] | None = None
    deltas: dict[str, int] | None = None
    combine: str | None = None
    display: dict | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class RiskGraph:
    """Parsed graph plus derived adjacency, keyed by id throughout."""

    nodes: dict[str, Node]
    edges: dict[str, Edge]
    profile_name: str
    inline_profile: dict | None = None
    metadata: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def node_ids(self, kind: str) -> list[str]:
        return sorted(n.id for n in self.nodes.values() if n.kind == kind)

    def _is_attack(self, node_id: str) -> bool:
        node = self.nodes.get(node_id)
        return node is not None and node.kind == ATTACK

    def attack_children(self, node_id: str) -> list[str]:
        """Attack-node successors through refinement edges, ascending by id."""
        children = {
            e.target
            for e in self.edges.values()
            if e.kind == REFINEMENT and e.source == node_id and self._is_attack(e.target)
        }
        return sorted(children)

    def attack_parents(self, node_id: str) -> list[str]:
        parents = {
            e.source
            for e in self.edges.values()
            if e.kind == REFINEMENT and e.target == node_id and self._is_attack(e.source)
        }
        return sorted(parents)

    def is_basic(self, node_id: str) -> bool:
        node = self.nodes.get(node_id)
        return node is not None and node.kind == ATTACK and not self.attack_children(node_id)

    def consequence_edges(self, consequence_id: str | None = None) -> list[Edge]:
        edges = [e for e in self.edges.values() if e.kind == CONSEQUENCE_EDGE]
        if consequence_id is not None:
            edges = [e for e in edges if e.source == consequence_id]
        return sorted(edges, key=lambda e: e.id)

    def attachments(self) -> list[Edge]:
        return sorted(
            (e for e in self.edges.values() if e.kind == ATTACHMENT),
            key=lambda e: e.id,
        )

    def without_countermeasure(self, node_id: str) -> "RiskGraph":
        """A copy with one countermeasure node and its attachments removed."""
        nodes = {k: v for k, v in self.nodes.items() if k != node_id}
        edges = {
            k: v for k, v in self.edges.items()
            if not (v.kind == ATTACHMENT and v.target == node_id)
        }
        return RiskGraph(nodes, edges, self.profile_name, self.inline_profile,
                         dict(self.metadata), dict(self.extra))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str
    message: str


@dataclass
class ValidationReport:
    """Ordered violations (errors) and informational notes.

    Violations block evaluation; notes record legal-but-notable structure
    such as a consequence tied to several topmost nodes.
    """

    violations: list[Violation] = field(default_factory=list)
    notes: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def render(self) -> str:
        lines = [f"ERROR {v.rule} {v.subject}: {v.message}" for v in self.violations]
        lines += [f"INFO {v.rule} {v.subject}: {v.message}" for v in self.notes]
        return "\n".join(lines)


def _refinement_cycle(graph: RiskGraph) -> tuple[str, ...] | None:
    """Return the node ids of one refinement cycle, or None."""
    color: dict[str, int] = {}
    stack: list[str] = []

    def visit(node_id: str):
        color[node_id] = 1
        stack.append(node_id)
        for child in graph.attack_children(node_id):
            state = color.get(child, 0)
            if state == 1:
                return tuple(sorted(stack[stack.index(child):]))
            if state == 0:
                found = visit(child)
                if found:
                    return found
        stack.pop()
        color[node_id] = 2
        return None

    for node in graph.node_ids(ATTACK):
        if color.get(node, 0) == 0:
            found = visit(node)
            if found:
                return found
    return None


def validate(graph: RiskGraph, profile) -> ValidationReport:
    """Check every structural invariant and schema conformance rule.

    Violations are data, not exceptions: the report lists each broken rule
    with the offending node or edge id.  The same graph always yields the
    same report, ordered by (rule, subject, message).
    """
    violations: list[Violation] = []
    notes: list[Violation] = []

    def err(rule, subject, message):
        violations.append(Violation(rule, subject, message))

    node_schemas = profile.node_schemas
    edge_schemas = profile.edge_schemas
    rated = profile.rated_schemas

    for node_id in graph.nodes:
        if node_id in graph.edges:
            err("DUPLICATE_ID", f"node:{node_id}", "id is used by both a node and an edge")

    for node in graph.nodes.values():
        if node.kind not in NODE_KINDS:
            err("NODE_KIND", f"node:{node.id}", f"unknown node kind {node.kind!r}")

    for edge in sorted(graph.edges.values(), key=lambda e: e.id):
        subject = f"edge:{edge.id}"
        if edge.kind not in EDGE_KINDS:
            err("EDGE_KIND", subject, f"unknown edge kind {edge.kind!r}")
            continue
        source = graph.nodes.get(edge.source)
        target = graph.nodes.get(edge.target)
        if edge.kind == REFINEMENT:
            if source is None or target is None:
                err("UNKNOWN_NODE", subject, "refinement edge endpoint does not exist")
                continue
            if source.kind != ATTACK or target.kind != ATTACK:
                err("EDGE_KIND", subject,
                    "refinement edges must run attack node -> attack node")
        elif edge.kind == CONSEQUENCE_EDGE:
            if source is None or target is None:
                err("UNKNOWN_NODE", subject, "consequence edge endpoint does not exist")
                continue
            if source.kind != CONSEQUENCE or target.kind != ATTACK:
                err("EDGE_KIND", subject,
                    "consequence edges must run consequence node -> attack node")
                continue
            if graph.attack_parents(edge.target):
                err("CONSEQUENCE_TARGET", subject,
                    f"target {edge.target!r} is not a topmost attack node")
            attrs = edge.attributes or {}
            if len(attrs) != 1:
                err("IMPACT_ARITY", subject,
                    "consequence edges carry exactly one impact attribute")
            for name, value in sorted(attrs.items()):
                schema = edge_schemas.get(name)
                if schema is None:
                    err("UNKNOWN_ATTRIBUTE", subject, f"{name!r} is not an edge attribute")
                elif not schema.contains_rank(value):
                    err("OUT_OF_DOMAIN", subject, f"{name}={value} not in domain")
        else:  # countermeasure attachment
            if target is None or target.kind != COUNTERMEASURE:
                err("EDGE_KIND", subject,
                    "attachment edges must end at a countermeasure node")
                continue
            if edge.combine is not None and edge.combine not in COMBINE_FUNCTIONS:
                err("CM_COMBINE", subject, f"unknown combine rule {edge.combine!r}")
            protected_edge = graph.edges.get(edge.source)
            deltas = edge.deltas if edge.deltas is not None else (target.ratings or {})
            if source is not None:
                if source.kind != ATTACK:
                    err("CM_TARGET", subject,
                        "countermeasures attach to attack nodes or consequence edges")
                elif not graph.is_basic(edge.source):
                    err("CM_TARGET", subject,
                        f"{edge.source!r} is not a basic attack node")
                else:
                    for name, delta in sorted(deltas.items()):
                        if name not in rated:
                            err("UNKNOWN_ATTRIBUTE", subject,
                                f"{name!r} is not a rated node attribute")
                        elif delta < 0:
                            err("CM_DELTA_SIGN", subject,
                                f"node-targeted delta {name}={delta} must be >= 0")
            elif protected_edge is not None:
                if protected_edge.kind != CONSEQUENCE_EDGE:
                    err("CM_TARGET", subject,
                        f"{edge.source!r} is not a consequence edge")
                else:
                    for name in sorted(deltas):
                        if name not in edge_schemas:
                            err("UNKNOWN_ATTRIBUTE", subject,
                                f"{name!r} is not an impact attribute")
            else:
                err("UNKNOWN_NODE", subject, "attachment source does not exist")

    cm_edges_by_node = {}
    for edge in graph.attachments():
        cm_edges_by_node.setdefault(edge.target, []).append(edge)

    for node in sorted(graph.nodes.values(), key=lambda n: n.id):
        subject = f"node:{node.id}"
        outgoing = [e for e in graph.edges.values() if e.source == node.id]
        incoming = [e for e in graph.edges.values() if e.target == node.id]
        if node.kind == CONSEQUENCE:
            if incoming:
                err("CONSEQUENCE_STRUCTURE", subject,
                    "consequence nodes are roots and take no incoming edges")
            if any(e.kind == REFINEMENT for e in outgoing):
                err("CONSEQUENCE_STRUCTURE", subject,
                    "consequence nodes have no refinement successors")
            if node.ratings:
                err("RATING_NOT_ALLOWED", subject,
                    "consequence nodes carry no attacker ratings")
            cons_edges = [e for e in outgoing if e.kind == CONSEQUENCE_EDGE]
            if len(cons_edges) > 1:
                notes.append(Violation(
                    "MULTI_TOPMOST", subject,
                    f"consequence is linked to {len(cons_edges)} topmost attack nodes"))
        elif node.kind == COUNTERMEASURE:
            if outgoing:
                err("COUNTERMEASURE_LEAF", subject,
                    "countermeasure nodes have no successors of their own")
            if any(e.kind != ATTACHMENT for e in incoming):
                err("COUNTERMEASURE_LEAF", subject,
                    "countermeasure nodes are reached only by attachment edges")
        elif node.kind == ATTACK:
            if node.connector is not None:
                if node.connector not in profile.connectors:
                    err("CONNECTOR_UNKNOWN", subject,
                        f"connector {node.connector!r} is not registered in the profile")
                if len(graph.attack_children(node.id)) < 2:
                    err("CONNECTOR_PLACEMENT", subject,
                        "connectors are only meaningful with two or more attack children")
            if graph.is_basic(node.id):
                ratings = node.ratings or {}
                for name in sorted(rated):
                    if name not in ratings:
                        err("MISSING_RATING", subject, f"missing rating for {name!r}")
                for name, value in sorted(ratings.items()):
                    schema = node_schemas.get(name)
                    if schema is None or name not in rated:
                        err("UNKNOWN_ATTRIBUTE", subject,
                            f"{name!r} is not a rated node attribute")
                    elif not schema.contains_rank(value):
                        err("OUT_OF_DOMAIN", subject, f"{name}={value} not in domain")
            elif node.ratings:
                err("RATING_NOT_ALLOWED", subject,
                    "only basic attack nodes carry ratings")

    cycle = _refinement_cycle(graph)
    if cycle:
        err("CYCLE", "graph", "refinement cycle through " + ", ".join(cycle))

    if not graph.node_ids(CONSEQUENCE):
        notes.append(Violation(
            "PLAIN_ATTACK_GRAPH", "graph",
            "no consequence nodes: this is an attack graph, not a risk assessment graph"))

    violations.sort(key=lambda v: (v.rule, v.subject, v.message))
    notes.sort(key=lambda v: (v.rule, v.subject, v.message))
    return ValidationReport(violations, notes)


def topological_order(graph: RiskGraph) -> list[str]:
    """Attack node ids, children before parents, ties by ascending id.

    Raises CycleError if the refinement subgraph contains a directed cycle.
    """
    attack = graph.node_ids(ATTACK)
    pending = {node: len(graph.attack_children(node)) for node in attack}
    ready = [node for node, count in pending.items() if count == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for parent in graph.attack_parents(node):
            if parent in pending:
                pending[parent] -= 1
                if pending[parent] == 0:
                    heapq.heappush(ready, parent)
    if len(order) != len(attack):
        stuck = sorted(n for n in attack if n not in set(order))
        raise CycleError("refinement cycle prevents ordering", tuple(stuck))
    return order
