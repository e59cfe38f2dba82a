"""riskgraph: attack-graph risk assessment.

Evaluates directed acyclic attack graphs extended with consequence nodes,
attack-feasibility attributes, and countermeasure leaves.  Ships three
standards profiles (DIN VDE V 0831-104, ISO/SAE 21434, CLC/TS 50701) and a
what-if overlay mechanism for exploring countermeasures and ratings.
"""

from .aggregate import (
    Connector,
    LookupMatrix,
    TieBreakPolicy,
    TieBreaker,
    aggregate_and,
    aggregate_or,
    f_max,
    f_min,
    f_prod,
    f_sum,
    matrix_lookup,
)
from .countermeasures import (
    AppliedState,
    CountermeasureEffect,
    Overlay,
    WhatIfResult,
    apply_countermeasures,
    what_if,
)
from .errors import (
    CycleError,
    EmptyInputError,
    GraphInvalidError,
    MissingAttributeError,
    MissingAxisError,
    OutOfDomainError,
    ParseError,
    ProfileError,
    RiskGraphError,
    SchemaMismatchError,
    UnknownConsequenceError,
    UnknownEnumerateError,
    UnknownTargetError,
    VersionError,
)
from .feasibility import (
    BandStage,
    FeasibilityPipeline,
    FunctionStage,
    MatrixStage,
    compute_feasibility,
    evaluate_graph,
)
from .graph import (
    Edge,
    Node,
    RiskGraph,
    ValidationReport,
    Violation,
    topological_order,
    validate,
)
from .io import emit_report, parse_graph, serialize_graph
from .profiles import (
    Profile,
    builtin_names,
    clc_likelihood,
    iso_attack_potential,
    load_builtin,
    load_profile,
    resolve_profile,
    risk_lookup,
    serialize_profile,
)
from .risk import (
    ConsequenceRisk,
    CriticalPath,
    EdgeRisk,
    Evaluation,
    NodeResult,
    critical_path,
    determine_risk,
)
from .schema import AttributeSchema, DomainValue

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
