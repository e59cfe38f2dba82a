"""Exception types shared across the package."""

from __future__ import annotations


class RiskGraphError(Exception):
    """Base class for all errors raised by this package."""


class EmptyInputError(RiskGraphError):
    """An aggregation function received no values."""


class SchemaMismatchError(RiskGraphError):
    """Child attribute maps do not agree with the expected schemas."""


class MissingAxisError(RiskGraphError):
    """A matrix lookup was called without a coordinate for one of its axes."""


class OutOfDomainError(RiskGraphError):
    """A value lies outside the attribute schema's domain."""


class MissingAttributeError(RiskGraphError):
    """A feasibility pipeline input is absent from the node's attributes."""

    def __init__(self, message: str, stage: int | None = None):
        super().__init__(message)
        self.stage = stage


class UnknownTargetError(RiskGraphError):
    """A countermeasure or overlay references an id that does not exist."""


class UnknownConsequenceError(RiskGraphError):
    """A consequence node id is not present in the graph."""


class UnknownEnumerateError(RiskGraphError):
    """A rating label is not one of the parameter's enumerates."""


class CycleError(RiskGraphError):
    """The refinement subgraph contains a directed cycle."""

    def __init__(self, message: str, nodes: tuple[str, ...] = ()):
        super().__init__(message)
        self.nodes = tuple(nodes)


class ProfileError(RiskGraphError):
    """A profile document is malformed; ``path`` points at the offending field."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ParseError(RiskGraphError):
    """A graph document cannot be parsed.

    ``line``/``column`` are set for JSON syntax errors, ``path`` for
    structural errors (for example ``nodes[2].kind``).
    """

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None, path: str = ""):
        location = ""
        if line is not None:
            location = f" at line {line}, column {column}"
        elif path:
            location = f" at {path}"
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column
        self.path = path


class VersionError(ParseError):
    """The document declares an unsupported format version."""


class GraphInvalidError(RiskGraphError):
    """Evaluation was attempted on a graph that fails validation."""

    def __init__(self, report):
        super().__init__(
            "graph fails validation: "
            + "; ".join(v.message for v in report.violations)
        )
        self.report = report
