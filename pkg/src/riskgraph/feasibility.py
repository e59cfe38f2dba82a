"""Attack feasibility computation and full-graph evaluation.

Feasibility is derived per attack node from its attribute values through a
profile-defined pipeline: matrix stages look combinations up in a table,
function stages fold values arithmetically, and band stages map an
unbounded total onto a feasibility class.  The final value is clamped into
the feasibility domain; clamping is legal but reported as a diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .aggregate import LookupMatrix
from .countermeasures import AppliedState, Overlay, apply_countermeasures
from .errors import GraphInvalidError, MissingAttributeError, OutOfDomainError
from .graph import RiskGraph, topological_order, validate
from .risk import Evaluation, NodeResult, critical_path, determine_risk
from .schema import AttributeSchema


@dataclass(frozen=True)
class MatrixStage:
    """Look the named inputs up in a total matrix.

    ``monotone`` optionally declares the matrix direction along every axis;
    the profile loader verifies the declaration against the cells.
    """

    matrix: LookupMatrix
    output: str
    monotone: str | None = None

    @property
    def inputs(self) -> tuple[str, ...]:
        return tuple(axis.name for axis in self.matrix.axes)

    def run(self, values: dict[str, int]) -> int:
        return self.matrix.lookup({name: values[name] for name in self.inputs})


@dataclass(frozen=True)
class FunctionStage:
    """Fold the named inputs arithmetically.

    ``fn`` is "add" (sum of inputs), "subtract" (first minus the rest), or
    "affine" (weighted sum); ``offset`` shifts the result either way.
    """

    fn: str
    inputs: tuple[str, ...]
    output: str
    offset: int = 0
    weights: tuple[int, ...] | None = None

    def run(self, values: dict[str, int]) -> int:
        resolved = [values[name] for name in self.inputs]
        if self.fn == "add":
            result = sum(resolved)
        elif self.fn == "subtract":
            result = resolved[0] - sum(resolved[1:])
        elif self.fn == "affine":
            weights = self.weights or (1,) * len(resolved)
            result = sum(w * v for w, v in zip(weights, resolved))
        else:
            raise ValueError(f"unknown pipeline function {self.fn!r}")
        return result + self.offset


@dataclass(frozen=True)
class BandStage:
    """Map an unbounded non-negative total onto a rank through ranges.

    ``bands`` holds (low, high, rank) triples; a high of None is open-ended.
    """

    input: str
    output: str
    bands: tuple[tuple[int, int | None, int], ...]

    @property
    def inputs(self) -> tuple[str, ...]:
        return (self.input,)

    def run(self, values: dict[str, int]) -> int:
        value = values[self.input]
        for low, high, rank in self.bands:
            if value >= low and (high is None or value <= high):
                return rank
        raise OutOfDomainError(f"{self.input}={value} falls outside every band")


@dataclass(frozen=True)
class FeasibilityPipeline:
    """Ordered stages producing the profile's feasibility value."""

    stages: tuple
    output_schema: AttributeSchema

    @property
    def output_name(self) -> str:
        return self.stages[-1].output

    def run(self, node_attrs: dict[str, int]) -> tuple[int, bool]:
        """Execute all stages; returns (rank, clamped)."""
        values = dict(node_attrs)
        for index, stage in enumerate(self.stages):
            missing = [name for name in stage.inputs if name not in values]
            if missing:
                raise MissingAttributeError(
                    f"stage {index} ({type(stage).__name__}) is missing "
                    f"input {missing[0]!r}", stage=index)
            values[stage.output] = stage.run(values)
        raw = values[self.output_name]
        clamped = self.output_schema.clamp(raw)
        return clamped, clamped != raw


def compute_feasibility(node_attrs: dict[str, int],
                        pipeline: FeasibilityPipeline) -> int:
    """Feasibility of a single node from its complete attribute map."""
    rank, _ = pipeline.run(node_attrs)
    return rank


def evaluate_graph(graph: RiskGraph, profile,
                   overlay: Overlay | None = None) -> Evaluation:
    """Evaluate every attack node, then risks and critical paths.

    Attack nodes are visited children-first.  Basic nodes take their
    countermeasure-adjusted ratings; single-child nodes pass the child's
    attributes through; branching nodes aggregate through their connector,
    defaulting to the disjunctive rule.  Evaluation is all-or-nothing: a
    graph that fails validation raises instead of yielding partial output.
    """
    overlay = overlay if overlay is not None else Overlay()
    report = validate(graph, profile)
    if not report.ok:
        raise GraphInvalidError(report)
    applied: AppliedState = apply_countermeasures(graph, overlay, profile)

    attributes: dict[str, dict[str, int]] = {}
    feasibility: dict[str, int] = {}
    results: dict[str, NodeResult] = {}
    diagnostics: list[str] = []

    for node_id in topological_order(graph):
        node = graph.nodes[node_id]
        children = graph.attack_children(node_id)
        authored = effective = None
        if not children:
            effective = applied.node_ratings[node_id]
            authored = applied.node_ratings_authored[node_id]
            node_attrs = dict(effective)
            selected = None
        elif len(children) == 1:
            node_attrs = dict(attributes[children[0]])
            selected = [children[0]]
        else:
            connector = profile.connectors[node.connector or "OR"]
            triples = [(c, attributes[c], feasibility[c]) for c in children]
            node_attrs, selected = connector.aggregate(
                triples, profile.node_schemas, profile.tie_break)

        rank, clamped = profile.pipeline.run(node_attrs)
        if clamped:
            diagnostics.append(
                f"node {node_id!r}: feasibility clamped into "
                f"[{profile.feasibility_schema.x_min}, "
                f"{profile.feasibility_schema.x_max}]")
        attributes[node_id] = node_attrs
        feasibility[node_id] = rank
        results[node_id] = NodeResult(
            attributes=node_attrs,
            feasibility=rank,
            feasibility_label=profile.feasibility_schema.label_of(rank),
            connector=node.connector if len(children) >= 2 else None,
            selected_children=selected,
            ratings_authored=dict(authored) if authored is not None else None,
            ratings_effective=dict(effective) if effective is not None else None,
        )

    consequences, risk_diagnostics = determine_risk(
        feasibility, graph, profile,
        applied.edge_impacts, applied.edge_impacts_authored)
    diagnostics.extend(risk_diagnostics)

    evaluation = Evaluation(
        profile=profile.name,
        overlay=overlay.to_dict(),
        nodes=results,
        consequences=consequences,
        critical_paths={},
        diagnostics=sorted(diagnostics),
    )
    for cons_id in sorted(consequences):
        evaluation.critical_paths[cons_id] = critical_path(
            evaluation, graph, cons_id)
    return evaluation
