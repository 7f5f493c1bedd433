"""Many-valued Datalog(+-) reasoning under Lukasiewicz semantics.

Exact-rational minimal and preferred fuzzy models via the oblivious
chase and a rational simplex; fuzzy fact entailment on top.
"""

from .core import (
    Atom,
    Constant,
    DomainError,
    FuzzyDatabase,
    GroundRule,
    Instance,
    LabelledNull,
    Program,
    Rule,
    TruthAssignment,
    Variable,
    as_degree,
    atom,
    body_truth,
    crisp_database,
    crispify,
    k_satisfies,
    make_rule,
    relax_rewrite,
    rule_gap,
)
from .chase import ChaseResult, enumerate_homomorphisms, matches, oblivious_chase
from .engine import (
    Engine,
    GroundModel,
    NoObliviousBaseModel,
    QueryResult,
    TruncatedChase,
    Unsatisfiable,
    certain_closure,
    fixpoint_minimal_model,
    k_truth,
    minimal_model,
    preferred_model,
    verify_model,
)
from .parser import ParseError, format_instance, parse, parse_ground_atom, parse_many
from .termination import is_weakly_acyclic_ve, variable_expansion

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "ChaseResult",
    "Constant",
    "DomainError",
    "Engine",
    "FuzzyDatabase",
    "GroundModel",
    "GroundRule",
    "Instance",
    "LabelledNull",
    "NoObliviousBaseModel",
    "ParseError",
    "Program",
    "QueryResult",
    "Rule",
    "TruncatedChase",
    "TruthAssignment",
    "Unsatisfiable",
    "Variable",
    "as_degree",
    "atom",
    "body_truth",
    "certain_closure",
    "crisp_database",
    "crispify",
    "enumerate_homomorphisms",
    "fixpoint_minimal_model",
    "format_instance",
    "is_weakly_acyclic_ve",
    "k_satisfies",
    "k_truth",
    "make_rule",
    "matches",
    "minimal_model",
    "oblivious_chase",
    "parse",
    "parse_ground_atom",
    "parse_many",
    "preferred_model",
    "relax_rewrite",
    "rule_gap",
    "variable_expansion",
    "verify_model",
]
