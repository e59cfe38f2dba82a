"""Ordered, finite value domains for node, edge, and consequence attributes."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OutOfDomainError

SCHEMA_KINDS = ("node", "edge", "consequence")


@dataclass(frozen=True)
class DomainValue:
    """One admissible attribute value: a label paired with an integer rank."""

    label: str
    rank: int


@dataclass(frozen=True)
class AttributeSchema:
    """A named attribute with an ordered, finite value domain.

    ``kind`` states where the attribute may appear: on attack or
    countermeasure nodes ("node"), on consequence edges ("edge"), or on
    consequence nodes ("consequence").  Ranks must be strictly increasing
    and labels unique; ``title`` is an optional display name.
    """

    name: str
    kind: str
    values: tuple[DomainValue, ...]
    title: str | None = None

    def __post_init__(self):
        if self.kind not in SCHEMA_KINDS:
            raise ValueError(f"schema {self.name!r}: unknown kind {self.kind!r}")
        if not self.values:
            raise ValueError(f"schema {self.name!r}: empty value domain")
        ranks = [v.rank for v in self.values]
        if any(b <= a for a, b in zip(ranks, ranks[1:])):
            raise ValueError(f"schema {self.name!r}: ranks must be strictly increasing")
        labels = [v.label for v in self.values]
        if len(set(labels)) != len(labels):
            raise ValueError(f"schema {self.name!r}: duplicate value labels")

    @property
    def x_min(self) -> int:
        return self.values[0].rank

    @property
    def x_max(self) -> int:
        return self.values[-1].rank

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(v.rank for v in self.values)

    def contains_rank(self, rank: int) -> bool:
        return any(v.rank == rank for v in self.values)

    def rank_of(self, value: int | str) -> int:
        """Resolve a rank or label to a rank in this domain."""
        if isinstance(value, bool):
            raise OutOfDomainError(f"{self.name}: {value!r} is not a rank or label")
        if isinstance(value, int):
            if not self.contains_rank(value):
                raise OutOfDomainError(f"{self.name}: rank {value} not in domain")
            return value
        for v in self.values:
            if v.label == value:
                return v.rank
        raise OutOfDomainError(f"{self.name}: unknown label {value!r}")

    def label_of(self, rank: int) -> str:
        for v in self.values:
            if v.rank == rank:
                return v.label
        raise OutOfDomainError(f"{self.name}: rank {rank} not in domain")

    def clamp(self, value: int) -> int:
        """Clamp an integer into [x_min, x_max]."""
        return max(self.x_min, min(self.x_max, value))
