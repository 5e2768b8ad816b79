"""Advice programs that ground to partial MDP knowledge.

Parse a program, check it against a vocabulary, compile the result into
queryable transition/reward/policy knowledge, and hand that to the
learning agents in :mod:`rlang.agents`.
"""

from .errors import (
    CompileError,
    ConfigError,
    DomainError,
    DuplicateNameError,
    EvalError,
    FullRestrictionError,
    IllFormedCompositionError,
    LexError,
    MissingContextError,
    ParseError,
    RLangError,
    TypeCheckError,
    UnboundGroundingError,
    UnresolvedNameError,
)
from .knowledge import (
    Assignment,
    DynamicsTaskKnowledge,
    PolicyQueryResult,
    SolutionKnowledge,
    TransitionQueryResult,
    compile_knowledge,
    dump_knowledge,
    query_policy,
    query_reward,
    query_transition,
    restricted_actions,
    sample_policy,
)
from .loader import check_source, load_program
from .parser import parse_program
from .runtime import UNKNOWN, ActionVal, make_context
from .semantics import CapabilityVector, CheckedProgram, capability_vector, check_program
from .vocab import VocabularyRegistry, load_vocabulary

__version__ = "0.1.0"

__all__ = [
    "ActionVal",
    "Assignment",
    "CapabilityVector",
    "CheckedProgram",
    "CompileError",
    "ConfigError",
    "DomainError",
    "DuplicateNameError",
    "DynamicsTaskKnowledge",
    "EvalError",
    "FullRestrictionError",
    "IllFormedCompositionError",
    "LexError",
    "MissingContextError",
    "ParseError",
    "PolicyQueryResult",
    "RLangError",
    "SolutionKnowledge",
    "TransitionQueryResult",
    "TypeCheckError",
    "UNKNOWN",
    "UnboundGroundingError",
    "UnresolvedNameError",
    "VocabularyRegistry",
    "capability_vector",
    "check_program",
    "check_source",
    "compile_knowledge",
    "dump_knowledge",
    "load_program",
    "load_vocabulary",
    "make_context",
    "parse_program",
    "query_policy",
    "query_reward",
    "query_transition",
    "restricted_actions",
    "sample_policy",
]
