"""Causal models for accountability analysis.

Express a system as a structural causal model over finite domains, query it
at the association, intervention, and counterfactual levels, decide whether
an effect is identifiable through the back-door or front-door criterion,
match accountability patterns against the causal graph, and derive the set
of variables worth logging.
"""

from .errors import (
    CausalAccountError,
    CycleError,
    DuplicateNode,
    EdgeIntoExogenous,
    EnumerationLimit,
    GraphError,
    InconsistentEvidence,
    InterveneOnExogenous,
    InvalidMatch,
    InvalidPath,
    MissingExogenous,
    NotIdentifiable,
    OverlapError,
    ParseError,
    PatternArityError,
    PatternError,
    SchemaError,
    ScmError,
    SemanticError,
    UnknownEndpoint,
    UnknownNode,
    UnspecifiedFunction,
    ValueOutOfDomain,
)
from .graph import (
    BACKWARD,
    FORWARD,
    CausalGraph,
    Node,
    NodeKind,
    Path,
    all_paths,
    ancestors,
    build_graph,
    d_separated,
    d_separated_paths,
    d_separated_reachable,
    descendants,
    is_blocked,
)
from .identify import (
    IdentificationReport,
    IdentificationStatus,
    LoggingRecommendation,
    backdoor_paths,
    confounded,
    identify,
    logging_set,
    minimal_backdoor_sets,
    satisfies_backdoor,
    satisfies_frontdoor,
)
from .modelio import (
    SourceSpan,
    from_json,
    parse_model,
    parse_pattern,
    to_dot,
    to_dsl,
    to_json,
)
from .patterns import (
    AccountabilityReport,
    Pattern,
    PatternMatch,
    Role,
    RoleKind,
    Verdict,
    build_pattern,
    builtin_pattern,
    builtin_patterns,
    check_accountability,
    match_pattern,
    validate_match,
)
from .scm import (
    BOOL,
    And,
    Assignment,
    Domain,
    Eq,
    Expr,
    IfThenElse,
    Lit,
    Not,
    Or,
    Ref,
    Scm,
    StructuralFunction,
    Table,
    Value,
    build_scm,
    consistent_worlds,
    counterfactual,
    evaluate,
    intervene,
)

__version__ = "0.1.0"

__all__ = [
    "AccountabilityReport",
    "And",
    "Assignment",
    "BACKWARD",
    "BOOL",
    "CausalAccountError",
    "CausalGraph",
    "CycleError",
    "Domain",
    "DuplicateNode",
    "EdgeIntoExogenous",
    "EnumerationLimit",
    "Eq",
    "Expr",
    "FORWARD",
    "GraphError",
    "IdentificationReport",
    "IdentificationStatus",
    "IfThenElse",
    "InconsistentEvidence",
    "InterveneOnExogenous",
    "InvalidMatch",
    "InvalidPath",
    "Lit",
    "LoggingRecommendation",
    "MissingExogenous",
    "Node",
    "NodeKind",
    "Not",
    "NotIdentifiable",
    "Or",
    "OverlapError",
    "ParseError",
    "Path",
    "Pattern",
    "PatternArityError",
    "PatternError",
    "PatternMatch",
    "Ref",
    "Role",
    "RoleKind",
    "SchemaError",
    "Scm",
    "ScmError",
    "SemanticError",
    "SourceSpan",
    "StructuralFunction",
    "Table",
    "UnknownEndpoint",
    "UnknownNode",
    "UnspecifiedFunction",
    "Value",
    "ValueOutOfDomain",
    "Verdict",
    "all_paths",
    "ancestors",
    "backdoor_paths",
    "build_graph",
    "build_pattern",
    "build_scm",
    "builtin_pattern",
    "builtin_patterns",
    "check_accountability",
    "confounded",
    "consistent_worlds",
    "counterfactual",
    "d_separated",
    "d_separated_paths",
    "d_separated_reachable",
    "descendants",
    "evaluate",
    "from_json",
    "identify",
    "intervene",
    "is_blocked",
    "logging_set",
    "match_pattern",
    "minimal_backdoor_sets",
    "parse_model",
    "parse_pattern",
    "satisfies_backdoor",
    "satisfies_frontdoor",
    "to_dot",
    "to_dsl",
    "to_json",
    "validate_match",
]
