"""Standards profiles: schemas, connectors, pipelines, and risk matrices.

The three built-in profiles ship as plain documents next to this module
and load through the same path as user-authored ones, so a profile file
dropped into a search directory behaves exactly like a built-in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..aggregate import (
    COMBINE_FUNCTIONS,
    Connector,
    LookupMatrix,
    TieBreakPolicy,
    TieBreaker,
)
from ..errors import (
    OutOfDomainError,
    ProfileError,
    UnknownEnumerateError,
)
from ..feasibility import (
    BandStage,
    FeasibilityPipeline,
    FunctionStage,
    MatrixStage,
)
from ..schema import SCHEMA_KINDS, AttributeSchema, DomainValue

PROFILE_SUFFIX = ".ragp"
_KIND_ORDER = {kind: index for index, kind in enumerate(SCHEMA_KINDS)}


@dataclass(frozen=True)
class Profile:
    """One standard's complete rule set, immutable after load."""

    name: str
    title: str | None
    schemas: dict[str, AttributeSchema]
    connectors: dict[str, Connector]
    tie_break: TieBreakPolicy
    pipeline: FeasibilityPipeline
    risk_matrix: LookupMatrix

    @property
    def node_schemas(self) -> dict[str, AttributeSchema]:
        return {n: s for n, s in self.schemas.items() if s.kind == "node"}

    @property
    def edge_schemas(self) -> dict[str, AttributeSchema]:
        return {n: s for n, s in self.schemas.items() if s.kind == "edge"}

    @property
    def consequence_schemas(self) -> dict[str, AttributeSchema]:
        return {n: s for n, s in self.schemas.items() if s.kind == "consequence"}

    @property
    def rated_schemas(self) -> dict[str, AttributeSchema]:
        """Node attributes that basic nodes must rate (pipeline outputs are computed)."""
        computed = {stage.output for stage in self.pipeline.stages}
        return {n: s for n, s in self.node_schemas.items() if n not in computed}

    @property
    def feasibility_schema(self) -> AttributeSchema:
        return self.pipeline.output_schema

    @property
    def impact_schema(self) -> AttributeSchema:
        return self.risk_matrix.axes[0]

    @property
    def risk_schema(self) -> AttributeSchema:
        return self.risk_matrix.output

    def to_document(self) -> dict:
        """Canonical document form; loading it back yields an equal profile."""
        schemas = []
        for schema in sorted(self.schemas.values(),
                             key=lambda s: (_KIND_ORDER[s.kind], s.name)):
            entry = {
                "name": schema.name,
                "kind": schema.kind,
                "values": [[v.label, v.rank] for v in schema.values],
            }
            if schema.title:
                entry["title"] = schema.title
            schemas.append(entry)

        connectors = {}
        for name in sorted(self.connectors):
            connector = self.connectors[name]
            entry: dict = {"mode": connector.mode}
            if connector.mode != "select":
                entry["fn"] = connector.combine_fn
                if connector.per_attribute:
                    entry["per_attribute"] = dict(sorted(connector.per_attribute.items()))
            if connector.mode == "k-of-n":
                entry["k"] = connector.k
            connectors[name] = entry

        stages = []
        for stage in self.pipeline.stages:
            if isinstance(stage, MatrixStage):
                entry = {
                    "type": "matrix",
                    "axes": [a.name for a in stage.matrix.axes],
                    "output": stage.output,
                    "cells": _matrix_grid(stage.matrix, labels=False),
                }
                if stage.monotone:
                    entry["monotone"] = stage.monotone
            elif isinstance(stage, BandStage):
                entry = {
                    "type": "bands",
                    "input": stage.input,
                    "output": stage.output,
                    "bands": [
                        [low, high, self.schemas[stage.output].label_of(rank)]
                        for low, high, rank in stage.bands
                    ],
                }
            else:
                entry = {
                    "type": "function",
                    "fn": stage.fn,
                    "inputs": list(stage.inputs),
                    "output": stage.output,
                }
                if stage.offset:
                    entry["offset"] = stage.offset
                if stage.weights:
                    entry["weights"] = list(stage.weights)
            stages.append(entry)

        doc = {
            "format_version": "1",
            "name": self.name,
            "schemas": schemas,
            "connectors": connectors,
            "tie_break": {
                "metric": self.tie_break.metric,
                "tiebreakers": [
                    [t.kind] if t.kind == "attribute-sum" else [t.kind, t.name]
                    for t in self.tie_break.tiebreakers
                ],
            },
            "feasibility": {
                "output": self.pipeline.output_name,
                "stages": stages,
            },
            "risk_matrix": {
                "axes": [a.name for a in self.risk_matrix.axes],
                "output": self.risk_matrix.output.name,
                "cells": _matrix_grid(self.risk_matrix, labels=True),
            },
        }
        if self.title:
            doc["title"] = self.title
        return doc


def _matrix_grid(matrix: LookupMatrix, labels: bool):
    if len(matrix.axes) == 1:
        row = [matrix.cells[(r,)] for r in matrix.axes[0].ranks]
        return [matrix.output.label_of(v) if labels else v for v in row]
    grid = []
    for row_rank in matrix.axes[0].ranks:
        row = [matrix.cells[(row_rank, col)] for col in matrix.axes[1].ranks]
        grid.append([matrix.output.label_of(v) if labels else v for v in row])
    return grid


def serialize_profile(profile: Profile) -> str:
    return json.dumps(profile.to_document(), indent=2, sort_keys=True,
                      ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def _want(doc: dict, key: str, path: str):
    if key not in doc:
        raise ProfileError("missing required field", f"{path}.{key}" if path else key)
    return doc[key]


def _load_schemas(doc, path: str) -> dict[str, AttributeSchema]:
    schemas: dict[str, AttributeSchema] = {}
    if not isinstance(doc, list) or not doc:
        raise ProfileError("schemas must be a non-empty list", path)
    for index, entry in enumerate(doc):
        where = f"{path}[{index}]"
        name = _want(entry, "name", where)
        kind = _want(entry, "kind", where)
        raw_values = _want(entry, "values", where)
        try:
            values = tuple(DomainValue(str(label), int(rank)) for label, rank in raw_values)
            schema = AttributeSchema(name=name, kind=kind, values=values,
                                     title=entry.get("title"))
        except (ValueError, TypeError) as exc:
            raise ProfileError(str(exc), where) from exc
        if name in schemas:
            raise ProfileError(f"duplicate schema name {name!r}", where)
        schemas[name] = schema
    return schemas


def _load_connectors(doc, schemas, path: str) -> dict[str, Connector]:
    connectors: dict[str, Connector] = {}
    for name, entry in (doc or {}).items():
        where = f"{path}.{name}"
        mode = entry.get("mode")
        if mode not in ("combine", "select", "k-of-n"):
            raise ProfileError(f"unknown connector mode {mode!r}", where)
        fn = entry.get("fn", "capped-sum")
        if fn not in COMBINE_FUNCTIONS:
            raise ProfileError(f"unknown combine function {fn!r}", where)
        per_attribute = dict(entry.get("per_attribute") or {})
        for attr, rule in per_attribute.items():
            if attr not in schemas:
                raise ProfileError(f"per-attribute rule names unknown schema {attr!r}", where)
            if rule not in COMBINE_FUNCTIONS:
                raise ProfileError(f"unknown combine function {rule!r}", where)
        k = entry.get("k")
        if mode == "k-of-n" and (not isinstance(k, int) or k < 1):
            raise ProfileError("k-of-n connectors need an integer k >= 1", where)
        connectors[name] = Connector(name=name, mode=mode, combine_fn=fn,
                                     per_attribute=per_attribute, k=k)
    connectors.setdefault("AND", Connector(name="AND", mode="combine"))
    connectors.setdefault("OR", Connector(name="OR", mode="select"))
    return connectors


def _load_tie_break(doc, schemas, metric: str, path: str) -> TieBreakPolicy:
    if doc is None:
        return TieBreakPolicy(metric=metric)
    breakers = []
    for index, entry in enumerate(doc.get("tiebreakers") or []):
        where = f"{path}.tiebreakers[{index}]"
        kind = entry[0]
        if kind == "attribute-sum":
            breakers.append(TieBreaker(kind="attribute-sum"))
        elif kind == "attribute":
            name = entry[1]
            if name not in schemas or schemas[name].kind != "node":
                raise ProfileError(f"tie-break attribute {name!r} is not a node schema", where)
            breakers.append(TieBreaker(kind="attribute", name=name))
        else:
            raise ProfileError(f"unknown tie-breaker kind {kind!r}", where)
    declared = doc.get("metric", metric)
    if declared != metric:
        raise ProfileError(
            f"tie-break metric {declared!r} does not match the pipeline output {metric!r}",
            f"{path}.metric")
    return TieBreakPolicy(metric=metric, tiebreakers=tuple(breakers))


def _load_stage(entry, schemas, produced, path: str):
    stage_type = entry.get("type")
    output = _want(entry, "output", path)
    known = set(schemas) | produced
    if stage_type == "matrix":
        axes = []
        for axis in _want(entry, "axes", path):
            if axis not in schemas:
                raise ProfileError(f"matrix axis {axis!r} is not a schema", path)
            axes.append(schemas[axis])
        if output not in schemas:
            raise ProfileError(f"matrix output {output!r} is not a schema", path)
        try:
            matrix = LookupMatrix.from_grid(axes, schemas[output], _want(entry, "cells", path))
        except (ValueError, OutOfDomainError) as exc:
            raise ProfileError(str(exc), f"{path}.cells") from exc
        monotone = entry.get("monotone")
        if monotone:
            if monotone not in ("non-increasing", "non-decreasing"):
                raise ProfileError(f"unknown monotonicity {monotone!r}", f"{path}.monotone")
            if not matrix.is_monotone(monotone):
                raise ProfileError(
                    f"matrix is declared {monotone} but is not", f"{path}.cells")
        stage = MatrixStage(matrix=matrix, output=output, monotone=monotone)
        missing = [name for name in stage.inputs if name not in known]
    elif stage_type == "function":
        inputs = tuple(_want(entry, "inputs", path))
        fn = _want(entry, "fn", path)
        if fn not in ("add", "subtract", "affine"):
            raise ProfileError(f"unknown pipeline function {fn!r}", f"{path}.fn")
        weights = tuple(entry["weights"]) if entry.get("weights") else None
        if weights and len(weights) != len(inputs):
            raise ProfileError("weights must match inputs one to one", f"{path}.weights")
        stage = FunctionStage(fn=fn, inputs=inputs, output=output,
                              offset=int(entry.get("offset", 0)), weights=weights)
        missing = [name for name in inputs if name not in known]
    elif stage_type == "bands":
        source = _want(entry, "input", path)
        if output not in schemas:
            raise ProfileError(f"band output {output!r} is not a schema", path)
        out_schema = schemas[output]
        bands = []
        for raw in _want(entry, "bands", path):
            low, high, value = raw
            bands.append((int(low), None if high is None else int(high),
                          out_schema.rank_of(value)))
        _check_bands(bands, f"{path}.bands")
        stage = BandStage(input=source, output=output, bands=tuple(bands))
        missing = [name for name in stage.inputs if name not in known]
    else:
        raise ProfileError(f"unknown stage type {stage_type!r}", path)
    if missing:
        raise ProfileError(
            f"stage input {missing[0]!r} is neither a rated attribute nor an "
            "earlier stage output", path)
    return stage


def _check_bands(bands, path: str) -> None:
    """Bands must partition the non-negative integers without gaps or overlaps."""
    if not bands:
        raise ProfileError("empty band list", path)
    if bands[0][0] != 0:
        raise ProfileError("first band must start at 0", path)
    for (low, high, _), (next_low, _, _) in zip(bands, bands[1:]):
        if high is None:
            raise ProfileError("only the last band may be open-ended", path)
        if next_low != high + 1:
            raise ProfileError(
                f"bands must be contiguous: {high} is followed by {next_low}", path)
    if bands[-1][1] is not None:
        raise ProfileError("last band must be open-ended", path)


def load_profile(source: str | dict, origin: str = "") -> Profile:
    """Parse and validate a profile document (text or already-decoded dict)."""
    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ProfileError(f"not valid JSON: {exc}", origin) from exc
    else:
        doc = source
    if not isinstance(doc, dict):
        raise ProfileError("profile document must be a JSON object", origin)
    version = _want(doc, "format_version", "")
    if version != "1":
        raise ProfileError(f"unsupported format_version {version!r}", "format_version")
    name = _want(doc, "name", "")

    schemas = _load_schemas(_want(doc, "schemas", ""), "schemas")
    connectors = _load_connectors(doc.get("connectors"), schemas, "connectors")

    pipeline_doc = _want(doc, "feasibility", "")
    stage_docs = _want(pipeline_doc, "stages", "feasibility")
    if not stage_docs:
        raise ProfileError("pipeline needs at least one stage", "feasibility.stages")
    stages = []
    produced: set[str] = set()
    for index, entry in enumerate(stage_docs):
        stage = _load_stage(entry, schemas, produced, f"feasibility.stages[{index}]")
        produced.add(stage.output)
        stages.append(stage)
    final_name = _want(pipeline_doc, "output", "feasibility")
    if stages[-1].output != final_name:
        raise ProfileError(
            f"last stage produces {stages[-1].output!r}, not the declared "
            f"output {final_name!r}", "feasibility.output")
    if final_name not in schemas or schemas[final_name].kind != "node":
        raise ProfileError("feasibility output must be a node schema", "feasibility.output")
    pipeline = FeasibilityPipeline(stages=tuple(stages),
                                   output_schema=schemas[final_name])

    matrix_doc = _want(doc, "risk_matrix", "")
    axes = []
    for axis in _want(matrix_doc, "axes", "risk_matrix"):
        if axis not in schemas:
            raise ProfileError(f"risk matrix axis {axis!r} is not a schema", "risk_matrix.axes")
        axes.append(schemas[axis])
    if len(axes) != 2 or axes[0].kind != "edge" or axes[1].name != final_name:
        raise ProfileError(
            "risk matrix axes must be [impact schema, feasibility schema]",
            "risk_matrix.axes")
    output_name = _want(matrix_doc, "output", "risk_matrix")
    if output_name not in schemas or schemas[output_name].kind != "consequence":
        raise ProfileError("risk matrix output must be a consequence schema",
                           "risk_matrix.output")
    try:
        risk_matrix = LookupMatrix.from_grid(
            axes, schemas[output_name], _want(matrix_doc, "cells", "risk_matrix"))
    except (ValueError, OutOfDomainError) as exc:
        raise ProfileError(str(exc), "risk_matrix.cells") from exc
    # Raising the impact or the feasibility must never lower the risk.
    if not risk_matrix.is_monotone("non-decreasing"):
        raise ProfileError("risk matrix must be monotone non-decreasing "
                           "in impact and feasibility", "risk_matrix.cells")

    tie_break = _load_tie_break(doc.get("tie_break"), schemas, final_name, "tie_break")

    return Profile(
        name=name,
        title=doc.get("title"),
        schemas=schemas,
        connectors=connectors,
        tie_break=tie_break,
        pipeline=pipeline,
        risk_matrix=risk_matrix,
    )


def builtin_names() -> list[str]:
    files = resources.files(__package__)
    return sorted(
        entry.name[:-len(PROFILE_SUFFIX)]
        for entry in files.iterdir()
        if entry.name.endswith(PROFILE_SUFFIX)
    )


def load_builtin(name: str) -> Profile:
    resource = resources.files(__package__) / f"{name}{PROFILE_SUFFIX}"
    if not resource.is_file():
        raise ProfileError(f"no built-in profile named {name!r}")
    return load_profile(resource.read_text(encoding="utf-8"), origin=name)


def resolve_profile(name: str, search_dirs: list[str] | None = None) -> Profile:
    """Find a profile by name: search directories first, then built-ins."""
    for directory in search_dirs or []:
        candidate = Path(directory) / f"{name}{PROFILE_SUFFIX}"
        if candidate.is_file():
            return load_profile(candidate.read_text(encoding="utf-8"),
                                origin=str(candidate))
    if name in builtin_names():
        return load_builtin(name)
    raise ProfileError(f"profile {name!r} not found (searched "
                       f"{', '.join(search_dirs or []) or 'no extra directories'} "
                       "and the built-ins)")


# ---------------------------------------------------------------------------
# Standard-specific helpers
# ---------------------------------------------------------------------------


def iso_attack_potential(ratings: dict[str, int | str],
                         profile: Profile | None = None) -> tuple[int, int]:
    """Attack-potential total and its feasibility class.

    ``ratings`` maps each of the five parameters to a listed enumerate (or
    its value).  Returns ``(total, feasibility_rank)`` where the total is
    the plain sum of the parameter values and the rank follows the
    standard's mapping table.
    """
    profile = profile or load_builtin("iso-sae-21434")
    band_stage = next(s for s in profile.pipeline.stages if isinstance(s, BandStage))
    total = 0
    for name, schema in sorted(profile.rated_schemas.items()):
        if name not in ratings:
            raise UnknownEnumerateError(f"missing rating for {name!r}")
        try:
            total += schema.rank_of(ratings[name])
        except OutOfDomainError as exc:
            raise UnknownEnumerateError(str(exc)) from exc
    extra = set(ratings) - set(profile.rated_schemas)
    if extra:
        raise UnknownEnumerateError(f"unknown parameters {sorted(extra)}")
    return total, band_stage.run({band_stage.input: total})


def clc_likelihood(exposure: int, vulnerability: int) -> int:
    """Likelihood from exposure and vulnerability, each rated 1 to 3."""
    for label, value in (("exposure", exposure), ("vulnerability", vulnerability)):
        if not isinstance(value, int) or not 1 <= value <= 3:
            raise OutOfDomainError(f"{label} must be an integer in [1, 3], got {value!r}")
    return exposure + vulnerability - 1


def risk_lookup(profile: Profile, impact: int | str, feasibility: int | str) -> DomainValue:
    """Risk matrix cell for an impact and a feasibility value."""
    impact_rank = profile.impact_schema.rank_of(impact)
    feasibility_rank = profile.feasibility_schema.rank_of(feasibility)
    rank = profile.risk_matrix.lookup({
        profile.impact_schema.name: impact_rank,
        profile.feasibility_schema.name: feasibility_rank,
    })
    return DomainValue(label=profile.risk_schema.label_of(rank), rank=rank)
