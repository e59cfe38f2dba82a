"""Attribute aggregation: base combination functions, lookup matrices, and
the connector rules that propagate values from child nodes to their parent.

The four base functions mirror the usual attack-graph toolkit: maximum,
minimum, and capped sum/product, where the cap is the attribute domain's
largest rank.  Connectors build on them: a conjunctive (AND) refinement
combines every child per attribute, a disjunctive (OR) refinement adopts
the attribute map of the child with the worst computed metric (numerically
highest feasibility), breaking ties through an ordered tie-break policy
and finally through the lowest node id so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

from .errors import (
    EmptyInputError,
    MissingAxisError,
    OutOfDomainError,
    SchemaMismatchError,
)
from .schema import AttributeSchema

# ---------------------------------------------------------------------------
# Base aggregation functions
# ---------------------------------------------------------------------------


def _require_values(values) -> list[int]:
    values = list(values)
    if not values:
        raise EmptyInputError("aggregation over an empty value list")
    return values


def f_max(values) -> int:
    """Highest of the given ranks."""
    return max(_require_values(values))


def f_min(values) -> int:
    """Lowest of the given ranks."""
    return min(_require_values(values))


def f_sum(values, x_max: int | None = None) -> int:
    """Sum of the given ranks, capped at ``x_max`` when a cap is given."""
    total = sum(_require_values(values))
    return total if x_max is None else min(total, x_max)


def f_prod(values, x_max: int | None = None) -> int:
    """Product of the given ranks, capped at ``x_max`` when a cap is given."""
    total = prod(_require_values(values))
    return total if x_max is None else min(total, x_max)


# Per-attribute combination rules usable by conjunctive connectors.  The
# "capped" variants cap at the attribute schema's x_max; the plain "sum"
# variant is unbounded (attack-potential style totals have no cap).
COMBINE_FUNCTIONS = {
    "max": lambda values, schema: f_max(values),
    "min": lambda values, schema: f_min(values),
    "sum": lambda values, schema: f_sum(values),
    "capped-sum": lambda values, schema: f_sum(values, schema.x_max),
    "capped-product": lambda values, schema: f_prod(values, schema.x_max),
}


# ---------------------------------------------------------------------------
# Lookup matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LookupMatrix:
    """A total function from rank tuples (one per axis) to an output rank."""

    axes: tuple[AttributeSchema, ...]
    cells: dict
    output: AttributeSchema

    def __post_init__(self):
        expected = 1
        for axis in self.axes:
            expected *= len(axis.values)
        if len(self.cells) != expected:
            raise ValueError(
                f"matrix over {[a.name for a in self.axes]} is not total: "
                f"{len(self.cells)} cells, expected {expected}"
            )
        for coords, out in self.cells.items():
            for axis, rank in zip(self.axes, coords):
                if not axis.contains_rank(rank):
                    raise ValueError(f"matrix cell {coords}: {rank} not in {axis.name}")
            if not self.output.contains_rank(out):
                raise ValueError(f"matrix cell {coords}: output {out} not in {self.output.name}")

    @classmethod
    def from_grid(cls, axes, output: AttributeSchema, grid) -> "LookupMatrix":
        """Build a matrix from nested lists indexed in axis rank order.

        Only 1- and 2-axis grids are supported here; deeper matrices can be
        built through the ``cells`` mapping directly.  Grid entries may be
        ranks or labels of the output schema.
        """
        axes = tuple(axes)
        cells = {}
        if len(axes) == 1:
            rows = [(r,) for r in axes[0].ranks]
            flat = list(grid)
            if len(flat) != len(rows):
                raise ValueError("grid length does not match the axis domain")
            for coords, cell in zip(rows, flat):
                cells[coords] = output.rank_of(cell)
        elif len(axes) == 2:
            if len(grid) != len(axes[0].ranks):
                raise ValueError("grid row count does not match the first axis domain")
            for row_rank, row in zip(axes[0].ranks, grid):
                if len(row) != len(axes[1].ranks):
                    raise ValueError("grid column count does not match the second axis domain")
                for col_rank, cell in zip(axes[1].ranks, row):
                    cells[(row_rank, col_rank)] = output.rank_of(cell)
        else:
            raise ValueError("from_grid supports one or two axes")
        return cls(axes=axes, cells=cells, output=output)

    def lookup(self, coords: dict[str, int]) -> int:
        key = []
        for axis in self.axes:
            if axis.name not in coords:
                raise MissingAxisError(f"matrix lookup is missing axis {axis.name!r}")
            rank = coords[axis.name]
            if not axis.contains_rank(rank):
                raise OutOfDomainError(f"{axis.name}: rank {rank} not in domain")
            key.append(rank)
        extra = set(coords) - {a.name for a in self.axes}
        if extra:
            raise MissingAxisError(f"matrix lookup got unknown axes {sorted(extra)}")
        return self.cells[tuple(key)]

    def is_monotone(self, direction: str) -> bool:
        """Check monotonicity along every axis.

        ``direction`` is "non-decreasing" or "non-increasing": moving to a
        higher rank on any single axis must never move the output the wrong
        way.
        """
        for i, axis in enumerate(self.axes):
            ranks = axis.ranks
            for coords in self.cells:
                pos = ranks.index(coords[i])
                if pos + 1 == len(ranks):
                    continue
                upper = list(coords)
                upper[i] = ranks[pos + 1]
                a, b = self.cells[coords], self.cells[tuple(upper)]
                if direction == "non-decreasing" and b < a:
                    return False
                if direction == "non-increasing" and b > a:
                    return False
        return True


def matrix_lookup(matrix: LookupMatrix, coords: dict[str, int]) -> int:
    """Read the matrix cell addressed by per-axis ranks."""
    return matrix.lookup(coords)


# ---------------------------------------------------------------------------
# Tie-break policies and connector aggregation
# ---------------------------------------------------------------------------

ATTRIBUTE_SUM = "attribute-sum"


@dataclass(frozen=True)
class TieBreaker:
    """One tie-break stage: keep candidates with the lowest attribute value.

    ``kind`` is "attribute" (compare one named attribute) or
    "attribute-sum" (compare the sum of all attribute values).
    """

    kind: str
    name: str | None = None


@dataclass(frozen=True)
class TieBreakPolicy:
    """Disjunctive selection policy: worst metric first, then tie-breakers.

    The metric is "worst means numerically highest" (easier attacks carry
    higher feasibility ranks).  Each tie-breaker keeps the candidates with
    the lowest value; any remaining tie falls back to the lowest node id.
    """

    metric: str
    tiebreakers: tuple[TieBreaker, ...] = ()


def aggregate_and(children, schemas: dict[str, AttributeSchema],
                  fn: str = "capped-sum", per_attribute: dict[str, str] | None = None):
    """Combine child attribute maps per attribute (conjunctive refinement).

    Every child map must cover exactly the same attributes, all of which
    must name a known schema.  The default rule is the capped sum.
    """
    children = list(children)
    if not children:
        raise EmptyInputError("conjunctive aggregation over no children")
    keys = set(children[0])
    for child in children[1:]:
        if set(child) != keys:
            raise SchemaMismatchError(
                f"child attribute maps differ: {sorted(keys)} vs {sorted(child)}"
            )
    unknown = keys - set(schemas)
    if unknown:
        raise SchemaMismatchError(f"attributes without a schema: {sorted(unknown)}")
    result = {}
    for name in sorted(keys):
        rule = (per_attribute or {}).get(name, fn)
        combine = COMBINE_FUNCTIONS[rule]
        result[name] = combine([child[name] for child in children], schemas[name])
    return result


def aggregate_or(children, policy: TieBreakPolicy):
    """Adopt the attribute map of the child with the worst computed metric.

    ``children`` is a list of ``(node_id, attributes, metric)`` triples.
    Returns ``(node_id, attributes)`` for the selected child; the returned
    map is the child's own map, never a synthesized one.
    """
    children = list(children)
    if not children:
        raise EmptyInputError("disjunctive aggregation over no children")
    for node_id, _attrs, metric in children:
        if metric is None:
            raise EmptyInputError(f"child {node_id!r} has no computed metric")
    worst = max(metric for _, _, metric in children)
    candidates = [c for c in children if c[2] == worst]
    for breaker in policy.tiebreakers:
        if len(candidates) == 1:
            break
        if breaker.kind == ATTRIBUTE_SUM:
            key = lambda c: sum(c[1].values())  # noqa: E731
        else:
            key = lambda c: c[1].get(breaker.name, 0)  # noqa: E731
        best = min(key(c) for c in candidates)
        candidates = [c for c in candidates if key(c) == best]
    node_id, attrs, _ = min(candidates, key=lambda c: c[0])
    return node_id, attrs


@dataclass(frozen=True)
class Connector:
    """A named refinement rule from the profile's connector registry.

    ``mode`` is one of:

    * ``combine`` - conjunctive: aggregate every child per attribute,
    * ``select`` - disjunctive: adopt the worst child's attributes,
    * ``k-of-n`` - experimental: adopt the ``k`` worst children (per the
      tie-break policy) and combine those conjunctively.
    """

    name: str
    mode: str
    combine_fn: str = "capped-sum"
    per_attribute: dict[str, str] = field(default_factory=dict)
    k: int | None = None

    def aggregate(self, children, schemas, policy: TieBreakPolicy):
        """Apply this connector to ``(node_id, attributes, metric)`` triples.

        Returns ``(attributes, selected)``: the selected child ids for
        disjunctive and k-of-n refinements, None for purely conjunctive
        ones (every child is required).
        """
        children = list(children)
        if self.mode == "combine":
            attrs = aggregate_and(
                [c[1] for c in children], schemas, self.combine_fn, self.per_attribute
            )
            return attrs, None
        if self.mode == "select":
            node_id, attrs = aggregate_or(children, policy)
            return dict(attrs), [node_id]
        if self.mode == "k-of-n":
            k = min(self.k or 1, len(children))
            remaining = list(children)
            chosen = []
            for _ in range(k):
                node_id, _attrs = aggregate_or(remaining, policy)
                chosen.append(next(c for c in remaining if c[0] == node_id))
                remaining = [c for c in remaining if c[0] != node_id]
            attrs = aggregate_and(
                [c[1] for c in chosen], schemas, self.combine_fn, self.per_attribute
            )
            return attrs, sorted(c[0] for c in chosen)
        raise ValueError(f"connector {self.name!r}: unknown mode {self.mode!r}")
