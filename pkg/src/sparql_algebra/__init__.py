"""Graph pattern algebra over RDF: evaluation, rewriting and hardness encodings."""

from .algebra import (
    And,
    Bound,
    Condition,
    Conj,
    Disj,
    EqConst,
    EqVar,
    Filter,
    GraphPattern,
    Neg,
    Opt,
    ScopeReport,
    TriplePattern,
    Union,
    Variable,
    parse_condition,
    parse_pattern,
    serialize_condition,
    serialize_pattern,
    validate_filter_scope,
    var,
    vars_of_condition,
    vars_of_pattern,
)
from .errors import (
    CapExceededError,
    DomainMismatchError,
    NotWellDesignedError,
    ParseError,
    ScopeError,
    SparqlAlgebraError,
    UnboundVariableError,
    UnsupportedPatternError,
)
from .evaluation import (
    eval_compositional,
    eval_depth_first,
    membership,
    membership_fast,
    satisfies,
)
from .mappings import (
    EMPTY_MAPPING,
    Mapping,
    apply_mapping,
    compatible,
    difference,
    join,
    left_outer_join,
    mapping,
    union,
)
from .rdf import Dataset, Term, Triple, iri, literal, parse_dataset, serialize_dataset
from .reductions import (
    CnfFormula,
    QbfFormula,
    Reduction,
    brute_force_qbf,
    brute_force_sat,
    parse_dimacs,
    reduce_qbf,
    reduce_sat_cnf,
)
from .rewriting import (
    OptNormalForm,
    WellDesignedReport,
    apply_filter_rewrites,
    equivalent_on,
    is_well_designed,
    opt_in_and_measure,
    to_opt_normal_form,
    to_union_normal_form,
)

__all__ = [name for name in dir() if not name.startswith("_")]
