"""Evaluation of graph patterns over a dataset.

Two semantics are provided:

* :func:`eval_compositional` evaluates bottom-up, AND as join, OPT as left
  outer join, UNION as union and FILTER as selection.
* :func:`eval_depth_first` threads the set of mappings collected so far
  through a left-to-right traversal of the parse tree, the way many engines
  evaluate nested optionals. It only agrees with the compositional semantics
  on well-designed patterns.

Both accept patterns nested to depth ``sparql_algebra._deep.MAX_DEPTH``.
"""

from __future__ import annotations

from typing import Callable

from ._deep import deep_recursion
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
    TriplePattern,
    Union,
    Variable,
    check_filter_scope,
    is_union_free,
    iter_nodes,
    triples_of,
    vars_of_pattern,
)
from .errors import DomainMismatchError, UnsupportedPatternError
from .mappings import (
    EMPTY_MAPPING,
    Mapping,
    apply_mapping,
    join,
    left_outer_join,
    union,
)
from .rdf import Dataset

Trace = Callable[[GraphPattern, frozenset, frozenset], None]


def _depth_of_second(first, pattern, *args, **kwargs) -> int:
    return getattr(pattern, "depth", 0)


def _depth_of_first(first, *args, **kwargs) -> int:
    return getattr(first, "depth", 0)


@deep_recursion(_depth_of_second)
def satisfies(m: Mapping, condition: Condition) -> bool:
    """Two-valued satisfaction: an unbound variable makes ``=`` false."""
    if isinstance(condition, Bound):
        return condition.variable in m
    if isinstance(condition, EqConst):
        return m.get(condition.variable) == condition.constant
    if isinstance(condition, EqVar):
        left = m.get(condition.left)
        return left is not None and left == m.get(condition.right)
    if isinstance(condition, Neg):
        return not satisfies(m, condition.inner)
    if isinstance(condition, Disj):
        return satisfies(m, condition.left) or satisfies(m, condition.right)
    if isinstance(condition, Conj):
        return satisfies(m, condition.left) and satisfies(m, condition.right)
    raise TypeError(f"not a condition: {condition!r}")


def eval_triple(dataset: Dataset, pattern: TriplePattern) -> frozenset[Mapping]:
    """Mappings with domain exactly ``var(t)`` sending ``t`` into the dataset."""
    predicate = pattern.predicate if not isinstance(pattern.predicate, Variable) else None
    positions = tuple(pattern)
    result = set()
    for triple in dataset.candidates(predicate):
        bindings: dict = {}
        for wanted, actual in zip(positions, triple):
            if isinstance(wanted, Variable):
                bound = bindings.get(wanted)
                if bound is None:
                    bindings[wanted] = actual
                elif bound != actual:
                    break
            elif wanted != actual:
                break
        else:
            result.add(Mapping._trusted(bindings))
    return frozenset(result)


def eval_compositional(dataset: Dataset, pattern: GraphPattern, *, validate: bool = True) -> frozenset[Mapping]:
    """Bottom-up evaluation of ``pattern`` over ``dataset``.

    With ``validate`` (the default) a FILTER whose condition mentions
    variables outside its pattern raises :class:`ScopeError`; pass
    ``validate=False`` to evaluate such filters with plain satisfaction.
    """
    if validate:
        check_filter_scope(pattern)
    return _compositional(dataset, pattern)


@deep_recursion(_depth_of_second)
def _compositional(dataset: Dataset, pattern: GraphPattern) -> frozenset[Mapping]:
    if isinstance(pattern, TriplePattern):
        return eval_triple(dataset, pattern)
    if isinstance(pattern, Filter):
        inner = _compositional(dataset, pattern.inner)
        return frozenset(m for m in inner if satisfies(m, pattern.condition))
    left = _compositional(dataset, pattern.left)
    if isinstance(pattern, And):
        if not left:
            return frozenset()
        return join(left, _compositional(dataset, pattern.right))
    right = _compositional(dataset, pattern.right)
    if isinstance(pattern, Opt):
        return left_outer_join(left, right)
    if isinstance(pattern, Union):
        return union(left, right)
    raise TypeError(f"not a graph pattern: {pattern!r}")


def eval_depth_first(
    dataset: Dataset,
    pattern: GraphPattern,
    *,
    allow_union: bool = False,
    trace: Trace | None = None,
    validate: bool = True,
) -> frozenset[Mapping]:
    """Depth-first evaluation starting from ``{μ∅}``.

    The recursion has no case for UNION. With ``allow_union=True`` the
    pattern is first rewritten into its UNION normal form and the results of
    the branches are unioned; this extension is ours, and it coincides with
    the compositional semantics only branch by branch.

    ``trace(subpattern, omega_in, omega_out)`` is called after every
    recursive call, for instrumentation.
    """
    if validate:
        check_filter_scope(pattern)
    if not is_union_free(pattern):
        if not allow_union:
            raise UnsupportedPatternError(
                "depth-first evaluation is undefined on UNION; pass allow_union=True "
                "to evaluate the branches of the UNION normal form"
            )
        from .rewriting import to_union_normal_form

        result: frozenset[Mapping] = frozenset()
        for branch in to_union_normal_form(pattern):
            result |= _depth_first(dataset, branch, frozenset((EMPTY_MAPPING,)), trace)
        return result
    return _depth_first(dataset, pattern, frozenset((EMPTY_MAPPING,)), trace)


def eval_depth_first_from(
    dataset: Dataset, pattern: GraphPattern, omega, *, trace: Trace | None = None
) -> frozenset[Mapping]:
    """Depth-first evaluation of a UNION-free pattern from a given mapping set."""
    if not is_union_free(pattern):
        raise UnsupportedPatternError("depth-first evaluation is undefined on UNION")
    return _depth_first(dataset, pattern, frozenset(omega), trace)


@deep_recursion(_depth_of_second)
def _depth_first(dataset: Dataset, pattern: GraphPattern, omega: frozenset, trace: Trace | None) -> frozenset:
    if not omega:
        result: frozenset = frozenset()
    elif isinstance(pattern, TriplePattern):
        result = join(omega, eval_triple(dataset, pattern))
    elif isinstance(pattern, And):
        result = _depth_first(dataset, pattern.right, _depth_first(dataset, pattern.left, omega, trace), trace)
    elif isinstance(pattern, Opt):
        mandatory = _depth_first(dataset, pattern.left, omega, trace)
        result = left_outer_join(mandatory, _depth_first(dataset, pattern.right, mandatory, trace))
    elif isinstance(pattern, Filter):
        inner = _depth_first(dataset, pattern.inner, omega, trace)
        result = frozenset(m for m in inner if satisfies(m, pattern.condition))
    elif isinstance(pattern, Union):
        raise UnsupportedPatternError("depth-first evaluation is undefined on UNION")
    else:
        raise TypeError(f"not a graph pattern: {pattern!r}")
    if trace is not None:
        trace(pattern, omega, result)
    return result


def membership(dataset: Dataset, pattern: GraphPattern, m: Mapping) -> bool:
    """Decide ``m ∈ ⟦pattern⟧`` (general case; may enumerate the answer)."""
    check_filter_scope(pattern)
    if not m.domain <= vars_of_pattern(pattern):
        return False
    return m in _compositional(dataset, pattern)


def membership_fast(dataset: Dataset, pattern: GraphPattern, m: Mapping) -> bool:
    """Decide ``m ∈ ⟦pattern⟧`` for patterns built from AND and FILTER only.

    Every triple is instantiated by ``m`` and looked up in the dataset; the
    FILTER conditions are then checked against ``m``. Nothing is enumerated,
    so the cost is linear in the size of the pattern.
    """
    nodes = list(iter_nodes(pattern))
    for node in nodes:
        if isinstance(node, (Opt, Union)):
            raise UnsupportedPatternError(f"{node.operator} is outside the AND/FILTER fragment")
    check_filter_scope(pattern)
    expected = vars_of_pattern(pattern)
    if m.domain != expected:
        raise DomainMismatchError(
            "mapping domain {" + ", ".join(map(str, sorted(m.domain))) + "} differs from pattern variables {"
            + ", ".join(map(str, sorted(expected))) + "}"
        )
    for triple in triples_of(pattern):
        if apply_mapping(m, triple) not in dataset:
            return False
    # every mapping of the fragment binds all of var(P), so each FILTER sees m itself
    return all(satisfies(m, node.condition) for node in nodes if isinstance(node, Filter))
