"""Per-consequence risk determination and critical path extraction."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownConsequenceError
from .graph import CONSEQUENCE, RiskGraph


@dataclass
class NodeResult:
    """Computed state of one attack node."""

    attributes: dict[str, int]
    feasibility: int
    feasibility_label: str
    connector: str | None = None
    selected_children: list[str] | None = None
    ratings_authored: dict[str, int] | None = None
    ratings_effective: dict[str, int] | None = None

    def to_dict(self) -> dict:
        return {
            "attributes": dict(sorted(self.attributes.items())),
            "feasibility": self.feasibility,
            "feasibility_label": self.feasibility_label,
            "connector": self.connector,
            "selected_children": list(self.selected_children)
            if self.selected_children is not None else None,
            "ratings_authored": dict(sorted(self.ratings_authored.items()))
            if self.ratings_authored is not None else None,
            "ratings_effective": dict(sorted(self.ratings_effective.items()))
            if self.ratings_effective is not None else None,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "NodeResult":
        return cls(
            attributes=dict(doc["attributes"]),
            feasibility=doc["feasibility"],
            feasibility_label=doc["feasibility_label"],
            connector=doc.get("connector"),
            selected_children=list(doc["selected_children"])
            if doc.get("selected_children") is not None else None,
            ratings_authored=dict(doc["ratings_authored"])
            if doc.get("ratings_authored") is not None else None,
            ratings_effective=dict(doc["ratings_effective"])
            if doc.get("ratings_effective") is not None else None,
        )


@dataclass
class EdgeRisk:
    """Risk contributed by one consequence edge."""

    topmost: str
    impact: int
    impact_authored: int
    feasibility: int
    risk: int
    risk_label: str

    def to_dict(self) -> dict:
        return {
            "topmost": self.topmost,
            "impact": self.impact,
            "impact_authored": self.impact_authored,
            "feasibility": self.feasibility,
            "risk": self.risk,
            "risk_label": self.risk_label,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EdgeRisk":
        return cls(doc["topmost"], doc["impact"], doc["impact_authored"],
                   doc["feasibility"], doc["risk"], doc["risk_label"])


@dataclass
class ConsequenceRisk:
    """Risk of one consequence node: the worst of its edge risks."""

    risk: int
    risk_label: str
    edges: dict[str, EdgeRisk]

    def to_dict(self) -> dict:
        return {
            "risk": self.risk,
            "risk_label": self.risk_label,
            "edges": {k: v.to_dict() for k, v in sorted(self.edges.items())},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ConsequenceRisk":
        return cls(doc["risk"], doc["risk_label"],
                   {k: EdgeRisk.from_dict(v) for k, v in doc["edges"].items()})


@dataclass
class CriticalPath:
    """Highest-risk refinement walk for one consequence.

    ``kind`` is "path" for a simple chain and "tree" when a conjunctive
    refinement forces the walk to branch into every child; ``nodes`` is the
    spanning sub-DAG flattened in topological order, topmost node first.
    """

    kind: str
    nodes: list[str]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "nodes": list(self.nodes)}

    @classmethod
    def from_dict(cls, doc: dict) -> "CriticalPath":
        return cls(doc["kind"], list(doc["nodes"]))


@dataclass
class Evaluation:
    """Everything one evaluation run computed, keyed by node and edge ids."""

    profile: str
    overlay: dict
    nodes: dict[str, NodeResult]
    consequences: dict[str, ConsequenceRisk]
    critical_paths: dict[str, CriticalPath]
    diagnostics: list[str] = field(default_factory=list)

    @property
    def or_selection(self) -> dict[str, str]:
        """Selected child per disjunctive node (single-selection nodes only)."""
        return {
            node_id: result.selected_children[0]
            for node_id, result in self.nodes.items()
            if result.selected_children is not None
            and len(result.selected_children) == 1
        }

    def to_dict(self) -> dict:
        return {
            "profile": self.profile,
            "overlay": self.overlay,
            "nodes": {k: v.to_dict() for k, v in sorted(self.nodes.items())},
            "consequences": {
                k: v.to_dict() for k, v in sorted(self.consequences.items())
            },
            "critical_paths": {
                k: v.to_dict() for k, v in sorted(self.critical_paths.items())
            },
            "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Evaluation":
        return cls(
            profile=doc["profile"],
            overlay=doc["overlay"],
            nodes={k: NodeResult.from_dict(v) for k, v in doc["nodes"].items()},
            consequences={
                k: ConsequenceRisk.from_dict(v)
                for k, v in doc["consequences"].items()
            },
            critical_paths={
                k: CriticalPath.from_dict(v)
                for k, v in doc["critical_paths"].items()
            },
            diagnostics=list(doc["diagnostics"]),
        )


def determine_risk(node_feasibility: dict[str, int], graph: RiskGraph, profile,
                   edge_impacts: dict[str, dict[str, int]],
                   edge_impacts_authored: dict[str, dict[str, int]]):
    """Relate impact and topmost feasibility per consequence edge.

    A consequence with several incoming edges takes the worst edge risk,
    mirroring the rule that multiple attack paths aggregate by maximum
    feasibility; a diagnostic records when that rule fires.
    """
    risk_schema = profile.risk_schema
    consequences: dict[str, ConsequenceRisk] = {}
    diagnostics: list[str] = []
    for cons_id in graph.node_ids(CONSEQUENCE):
        edges: dict[str, EdgeRisk] = {}
        for edge in graph.consequence_edges(cons_id):
            (impact_name, impact), = edge_impacts[edge.id].items()
            (_, impact_authored), = edge_impacts_authored[edge.id].items()
            feasibility = node_feasibility[edge.target]
            risk = profile.risk_matrix.lookup({
                impact_name: impact,
                profile.feasibility_schema.name: feasibility,
            })
            edges[edge.id] = EdgeRisk(
                topmost=edge.target,
                impact=impact,
                impact_authored=impact_authored,
                feasibility=feasibility,
                risk=risk,
                risk_label=risk_schema.label_of(risk),
            )
        worst = max(e.risk for e in edges.values())
        if len(edges) > 1:
            diagnostics.append(
                f"consequence {cons_id!r}: risk is the maximum over "
                f"{len(edges)} incoming edges")
        consequences[cons_id] = ConsequenceRisk(
            risk=worst, risk_label=risk_schema.label_of(worst), edges=edges)
    return consequences, diagnostics


def _included_children(graph: RiskGraph, nodes: dict[str, NodeResult],
                       node_id: str) -> list[str]:
    selected = nodes[node_id].selected_children
    if selected is not None:
        return sorted(selected)
    return graph.attack_children(node_id)


def critical_path(evaluation: Evaluation, graph: RiskGraph,
                  consequence: str) -> CriticalPath:
    """Walk from the consequence's highest-risk topmost node downward.

    Disjunctive nodes follow the recorded selection; conjunctive nodes
    branch into every child since all of them are required.  The resulting
    sub-DAG is flattened parents-first with ties broken by ascending id.
    """
    cons = evaluation.consequences.get(consequence)
    if cons is None:
        raise UnknownConsequenceError(f"unknown consequence {consequence!r}")
    start = min(
        cons.edges.values(),
        key=lambda e: (-e.risk, e.topmost),
    ).topmost

    included: set[str] = set()
    stack = [start]
    while stack:
        node_id = stack.pop()
        if node_id in included:
            continue
        included.add(node_id)
        stack.extend(_included_children(graph, evaluation.nodes, node_id))

    branching = any(
        len([c for c in _included_children(graph, evaluation.nodes, n)]) > 1
        for n in included
    )

    # Kahn flattening restricted to the included sub-DAG, smallest id first.
    pending = {
        n: sum(1 for p in graph.attack_parents(n)
               if p in included and n in _included_children(graph, evaluation.nodes, p))
        for n in included
    }
    ready = sorted(n for n, count in pending.items() if count == 0)
    order: list[str] = []
    while ready:
        node_id = ready.pop(0)
        order.append(node_id)
        for child in _included_children(graph, evaluation.nodes, node_id):
            pending[child] -= 1
            if pending[child] == 0:
                ready.append(child)
        ready.sort()
    return CriticalPath(kind="tree" if branching else "path", nodes=order)
