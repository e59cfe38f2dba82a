"""Countermeasure application and what-if overlays.

A countermeasure node carries rating deltas.  Attached to a basic attack
node it hardens that step (deltas are added into the ratings, capped at
the attribute maximum); attached to a consequence edge it dampens the
impact (deltas may be negative, floored at the impact minimum).  Overlays
describe a what-if state: countermeasures switched off and ratings or
impacts overridden, evaluated without mutating the stored graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .aggregate import COMBINE_FUNCTIONS
from .errors import OutOfDomainError, UnknownTargetError
from .graph import ATTACK, CONSEQUENCE_EDGE, COUNTERMEASURE, RiskGraph


@dataclass(frozen=True)
class CountermeasureEffect:
    """One resolved attachment: which countermeasure changes what, and how."""

    countermeasure: str
    target: str                       # basic attack node id or consequence edge id
    target_is_edge: bool
    deltas: dict[str, int]
    combine: str = "capped-sum"
    attachment: str = ""


@dataclass(frozen=True)
class Overlay:
    """What-if state: disabled countermeasures plus rating/impact overrides.

    ``rating_overrides`` is keyed by node id (basic attack nodes) or
    consequence edge id, each mapping attribute name to a replacement rank.
    Overrides replace the authored value before countermeasure deltas are
    applied.
    """

    disabled: frozenset = frozenset()
    rating_overrides: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: dict) -> "Overlay":
        overrides = {
            str(target): {str(k): v for k, v in attrs.items()}
            for target, attrs in (doc.get("rating_overrides") or {}).items()
        }
        return cls(frozenset(doc.get("disabled") or ()), overrides)

    def to_dict(self) -> dict:
        return {
            "disabled": sorted(self.disabled),
            "rating_overrides": {
                target: dict(sorted(attrs.items()))
                for target, attrs in sorted(self.rating_overrides.items())
            },
        }

    @property
    def is_baseline(self) -> bool:
        return not self.disabled and not self.rating_overrides


def effects(graph: RiskGraph) -> list[CountermeasureEffect]:
    """All attachments resolved to concrete effects, in application order.

    Per-edge deltas take precedence over the countermeasure node's own
    ratings.  Effects on one target apply in ascending countermeasure id
    (then edge id) so results are reproducible for order-dependent
    combiners; the default capped sum is order-independent anyway.
    """
    resolved = []
    for edge in graph.attachments():
        node = graph.nodes.get(edge.target)
        if node is None or node.kind != COUNTERMEASURE:
            continue
        deltas = edge.deltas if edge.deltas is not None else (node.ratings or {})
        resolved.append(CountermeasureEffect(
            countermeasure=edge.target,
            target=edge.source,
            target_is_edge=edge.source in graph.edges,
            deltas=dict(deltas),
            combine=edge.combine or "capped-sum",
            attachment=edge.id,
        ))
    resolved.sort(key=lambda e: (e.target, e.countermeasure, e.attachment))
    return resolved


@dataclass
class AppliedState:
    """Effective basic-node ratings and consequence-edge impacts.

    ``*_authored`` keeps the document values so reports can show the
    original next to the countermeasure-adjusted one.
    """

    node_ratings: dict[str, dict[str, int]]
    node_ratings_authored: dict[str, dict[str, int]]
    edge_impacts: dict[str, dict[str, int]]
    edge_impacts_authored: dict[str, dict[str, int]]


def _check_overlay(graph: RiskGraph, overlay: Overlay, profile) -> None:
    for cm_id in sorted(overlay.disabled):
        node = graph.nodes.get(cm_id)
        if node is None or node.kind != COUNTERMEASURE:
            raise UnknownTargetError(f"{cm_id!r} is not a countermeasure node")
    for target, attrs in sorted(overlay.rating_overrides.items()):
        node = graph.nodes.get(target)
        edge = graph.edges.get(target)
        if node is not None and node.kind == ATTACK and graph.is_basic(target):
            schemas, allowed = profile.node_schemas, profile.rated_schemas
        elif edge is not None and edge.kind == CONSEQUENCE_EDGE:
            schemas, allowed = profile.edge_schemas, set(profile.edge_schemas)
        else:
            raise UnknownTargetError(
                f"override target {target!r} is neither a basic attack node "
                "nor a consequence edge")
        for name, value in sorted(attrs.items()):
            if name not in allowed:
                raise UnknownTargetError(f"{target}: {name!r} is not overridable")
            if not schemas[name].contains_rank(value):
                raise OutOfDomainError(f"{target}: {name}={value} not in domain")


def apply_countermeasures(graph: RiskGraph, overlay: Overlay, profile) -> AppliedState:
    """Fold enabled countermeasures and overrides into effective values.

    Node-targeted deltas add into the basic node's ratings, capped at the
    attribute's largest rank; edge-targeted deltas add into the impact,
    additionally floored at the impact minimum so mitigation can never
    leave the domain.
    """
    _check_overlay(graph, overlay, profile)

    ratings_authored = {
        node_id: dict(graph.nodes[node_id].ratings or {})
        for node_id in graph.node_ids(ATTACK)
        if graph.is_basic(node_id)
    }
    impacts_authored = {
        e.id: dict(e.attributes or {}) for e in graph.consequence_edges()
    }

    ratings = {k: dict(v) for k, v in ratings_authored.items()}
    impacts = {k: dict(v) for k, v in impacts_authored.items()}
    for target, attrs in overlay.rating_overrides.items():
        bucket = ratings if target in ratings else impacts
        bucket[target].update(attrs)

    for effect in effects(graph):
        if effect.countermeasure in overlay.disabled:
            continue
        combine = COMBINE_FUNCTIONS[effect.combine]
        if effect.target_is_edge:
            current, schemas = impacts.get(effect.target), profile.edge_schemas
        else:
            current, schemas = ratings.get(effect.target), profile.node_schemas
        if current is None:
            raise UnknownTargetError(
                f"countermeasure {effect.countermeasure!r} attached to "
                f"unknown target {effect.target!r}")
        for name, delta in sorted(effect.deltas.items()):
            schema = schemas[name]
            value = combine([current.get(name, schema.x_min), delta], schema)
            current[name] = schema.clamp(value)

    return AppliedState(ratings, ratings_authored, impacts, impacts_authored)


@dataclass
class WhatIfResult:
    """An overlay evaluation plus its delta against the baseline."""

    evaluation: "Evaluation"
    baseline: "Evaluation"
    delta: dict

    def to_dict(self, include_baseline: bool = False) -> dict:
        doc = {"evaluation": self.evaluation.to_dict(), "delta": self.delta}
        doc["baseline"] = self.baseline.to_dict() if include_baseline else None
        return doc


def what_if(graph: RiskGraph, profile, overlay: Overlay) -> WhatIfResult:
    """Re-evaluate under an overlay and diff against the baseline.

    The baseline is the graph with every countermeasure enabled and no
    overrides.  The delta lists every consequence's risk before and after,
    plus the feasibility changes per attack node (changed nodes only).
    """
    from .feasibility import evaluate_graph  # deferred: avoids an import cycle

    baseline = evaluate_graph(graph, profile)
    current = evaluate_graph(graph, profile, overlay)

    consequences = {}
    for cons_id in sorted(baseline.consequences):
        before = baseline.consequences[cons_id]
        after = current.consequences[cons_id]
        consequences[cons_id] = {
            "risk_before": before.risk, "risk_label_before": before.risk_label,
            "risk_after": after.risk, "risk_label_after": after.risk_label,
        }
    nodes = {}
    for node_id in sorted(baseline.nodes):
        before = baseline.nodes[node_id].feasibility
        after = current.nodes[node_id].feasibility
        if before != after:
            nodes[node_id] = {"feasibility_before": before, "feasibility_after": after}

    delta = {"consequences": consequences, "nodes": nodes}
    return WhatIfResult(evaluation=current, baseline=baseline, delta=delta)
