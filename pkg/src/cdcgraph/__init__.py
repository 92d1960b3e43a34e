"""Domain-contextualized concept graph.

Facts are quads: (concept, relation, concept', domain).  Because the domain
is part of the statement, one concept can be categorized differently in
different contexts without contradiction, and the engine reasons strictly
within each domain: transitive closure, symmetric completion, attribute
inheritance, prerequisite ordering, and cross-domain analogy lookup.
"""

from .consistency import ConsistencyReport, Lint, SeparationWitness, Violation, check
from .domains import DomainExpr, DomainSegment, format_domain, fuse, is_prefix_of, parse_domain
from .errors import (
    CdcError,
    CycleError,
    DomainSyntaxError,
    NotDerivableError,
    QuerySyntaxError,
    RegistryError,
    ShapeMismatchError,
    StaleClosureError,
    UnknownRelationError,
)
from .inference import (
    ClosureSet,
    DerivationTrace,
    all_prerequisites,
    analogy_search,
    explain,
    inherited_attributes,
    materialize,
    reachable_star,
    star_pairs,
    trace_depth,
)
from .kbfile import (
    CASESTUDY_NAMES,
    Diagnostic,
    LoadResult,
    SourceSpan,
    export_interop,
    load_casestudy,
    load_file,
    load_text,
    parse_fact_text,
    save_file,
)
from .query import BindingSet, Query, eval_query, parse_query
from .relations import RelationRegistry, RelationShape, RelationSpec, builtin_registry
from .store import ConceptId, Fact, FactPattern, FactStore, StoreStats

__version__ = "0.1.0"

__all__ = [
    "BindingSet",
    "CASESTUDY_NAMES",
    "CdcError",
    "ClosureSet",
    "ConceptId",
    "ConsistencyReport",
    "CycleError",
    "DerivationTrace",
    "Diagnostic",
    "DomainExpr",
    "DomainSegment",
    "DomainSyntaxError",
    "Fact",
    "FactPattern",
    "FactStore",
    "Lint",
    "LoadResult",
    "NotDerivableError",
    "Query",
    "QuerySyntaxError",
    "RegistryError",
    "RelationRegistry",
    "RelationShape",
    "RelationSpec",
    "SeparationWitness",
    "ShapeMismatchError",
    "SourceSpan",
    "StaleClosureError",
    "StoreStats",
    "UnknownRelationError",
    "Violation",
    "all_prerequisites",
    "analogy_search",
    "builtin_registry",
    "check",
    "eval_query",
    "explain",
    "export_interop",
    "format_domain",
    "fuse",
    "inherited_attributes",
    "is_prefix_of",
    "load_casestudy",
    "load_file",
    "load_text",
    "materialize",
    "parse_domain",
    "parse_fact_text",
    "parse_query",
    "reachable_star",
    "save_file",
    "star_pairs",
    "trace_depth",
]
