"""Equivalence-preserving pattern transformations and well-designedness.

* :func:`to_union_normal_form` pulls every UNION to the top.
* :func:`is_well_designed` checks the OPT variable-scoping discipline.
* :func:`to_opt_normal_form` rewrites a well-designed, UNION- and
  FILTER-free pattern with ``(X AND (Y OPT Z)) -> ((X AND Y) OPT Z)``,
  working modulo associativity/commutativity of AND.
* :func:`apply_filter_rewrites` merges nested filters and pushes filters out
  of conjunctions of triple patterns.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Literal

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
    and_all,
    check_filter_scope,
    children,
    format_path,
    is_union_free,
    iter_nodes,
    path_of,
    serialize_pattern,
    subpattern_at,
    vars_of_pattern,
    walk_linked,
)
from .errors import NotWellDesignedError, UnsupportedPatternError
from .evaluation import eval_compositional
from .rdf import Dataset

Strategy = Literal["outermost", "innermost"]


def _depth(pattern, *args, **kwargs) -> int:
    return getattr(pattern, "depth", 0)


def replace_at(pattern: GraphPattern, path: tuple[str, ...], replacement: GraphPattern) -> GraphPattern:
    """Copy of ``pattern`` with the node at ``path`` replaced."""
    if not path:
        return replacement
    # rebuild bottom-up along the path without recursion
    spine = [pattern]
    for step in path[:-1]:
        spine.append(getattr(spine[-1], step))
    node = replacement
    for parent, step in zip(reversed(spine), reversed(path)):
        if isinstance(parent, Filter):
            node = Filter(node, parent.condition)
        elif step == "left":
            node = type(parent)(node, parent.right)
        else:
            node = type(parent)(parent.left, node)
    return node


# --------------------------------------------------------------------------
# UNION normal form


def _fresh_witness(pattern: GraphPattern) -> TriplePattern:
    taken = {v.name for v in vars_of_pattern(pattern)}
    prefix = "_w"
    while any(name.startswith(prefix) for name in taken):
        prefix = "_" + prefix
    return TriplePattern(Variable(prefix + "s"), Variable(prefix + "p"), Variable(prefix + "o"))


def to_union_normal_form(pattern: GraphPattern, *, order: Literal["left", "right"] = "left") -> list[GraphPattern]:
    """Equivalent UNION-free branches whose n-ary union is ``pattern``.

    AND and FILTER distribute over UNION, and a UNION on the left of OPT
    distributes as ``((A UNION B) OPT C) = ((A OPT C) UNION (B OPT C))``.
    OPT does *not* distribute over a UNION on its right, so
    ``(A OPT (B1 UNION ... UNION Bk))`` becomes the branches
    ``(A AND Bi)`` plus one branch keeping the members of ``A`` compatible
    with no ``Bi``. That branch is built as::

        (((A OPT (B1 AND W)) FILTER (! bound(?_ws))) OPT (B2 AND W)) FILTER ...

    where ``W = (?_ws ?_wp ?_wo)`` uses fresh variables and matches any
    triple, so the filter discards exactly the extended mappings.

    A filter copied onto a branch that lacks some of its variables is
    simplified, since those variables are unbound in every answer of the
    branch; branches whose filter becomes unsatisfiable are dropped, so the
    list may be empty for a pattern that has no answer on any dataset.

    ``order`` only changes the order of the branches produced by AND.
    """
    check_filter_scope(pattern)
    if is_union_free(pattern):
        return [pattern]
    witness = _fresh_witness(pattern)
    return _union_branches(pattern, witness, order)


@deep_recursion(_depth)
def _union_branches(pattern: GraphPattern, witness: TriplePattern, order: str) -> list[GraphPattern]:
    if isinstance(pattern, TriplePattern):
        return [pattern]
    if isinstance(pattern, Union):
        return _union_branches(pattern.left, witness, order) + _union_branches(pattern.right, witness, order)
    if isinstance(pattern, Filter):
        inner = _union_branches(pattern.inner, witness, order)
        branches = []
        for branch in inner:
            condition = specialize_condition(pattern.condition, vars_of_pattern(branch))
            if condition is True:
                branches.append(branch)
            elif condition is not False:
                branches.append(Filter(branch, condition))
        return branches
    lefts = _union_branches(pattern.left, witness, order)
    rights = _union_branches(pattern.right, witness, order)
    if isinstance(pattern, And):
        if order == "left":
            return [And(a, b) for a in lefts for b in rights]
        return [And(a, b) for b in rights for a in lefts]
    if isinstance(pattern, Opt):
        if len(rights) == 1:
            return [Opt(a, rights[0]) for a in lefts]
        branches = []
        for a in lefts:
            branches.extend(And(a, b) for b in rights)
            branches.append(_unmatched(a, rights, witness))
        return branches
    raise TypeError(f"not a graph pattern: {pattern!r}")


def _unmatched(pattern: GraphPattern, others: list[GraphPattern], witness: TriplePattern) -> GraphPattern:
    marker = Neg(Bound(witness.subject))
    for other in others:
        pattern = Filter(Opt(pattern, And(other, witness)), marker)
    return pattern


def specialize_condition(condition: Condition, scope: frozenset[Variable]) -> Condition | bool:
    """Simplify ``condition`` knowing that variables outside ``scope`` are unbound.

    Returns ``True``/``False`` when the condition becomes constant.
    """
    if isinstance(condition, Bound):
        return condition if condition.variable in scope else False
    if isinstance(condition, EqConst):
        return condition if condition.variable in scope else False
    if isinstance(condition, EqVar):
        return condition if condition.left in scope and condition.right in scope else False
    if isinstance(condition, Neg):
        inner = specialize_condition(condition.inner, scope)
        return (not inner) if isinstance(inner, bool) else Neg(inner)
    left = specialize_condition(condition.left, scope)
    right = specialize_condition(condition.right, scope)
    if isinstance(condition, Disj):
        if left is True or right is True:
            return True
        if left is False:
            return right
        if right is False:
            return left
        return Disj(left, right)
    if left is False or right is False:
        return False
    if left is True:
        return right
    if right is True:
        return left
    return Conj(left, right)


def union_branch_count(pattern: GraphPattern) -> int:
    """Number of branches :func:`to_union_normal_form` yields for a FILTER-free pattern."""
    if isinstance(pattern, TriplePattern):
        return 1
    if isinstance(pattern, Filter):
        return union_branch_count(pattern.inner)
    left = union_branch_count(pattern.left)
    right = union_branch_count(pattern.right)
    if isinstance(pattern, Union):
        return left + right
    if isinstance(pattern, And):
        return left * right
    return left if right == 1 else left * (right + 1)


# --------------------------------------------------------------------------
# Well-designedness


@dataclass(frozen=True)
class WellDesignedViolation:
    path: tuple[str, ...]
    subpattern: Opt
    variable: Variable

    def __str__(self) -> str:
        return (
            f"{self.variable} occurs in the optional part of the OPT at {format_path(self.path)} "
            f"and outside it, but not in its mandatory part"
        )


@dataclass(frozen=True)
class WellDesignedReport:
    violations: tuple[WellDesignedViolation, ...] = ()

    @property
    def is_well_designed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.is_well_designed

    def __str__(self) -> str:
        if self.is_well_designed:
            return "well designed: yes"
        return "well designed: no\n" + "\n".join(f"  {v}" for v in self.violations)


def _occurrences_by_node(pattern: GraphPattern) -> dict[int, Counter]:
    """Variable occurrence counts of every sub-pattern, keyed by ``id``."""
    table: dict[int, Counter] = {}
    for node in reversed(list(iter_nodes(pattern))):
        if id(node) in table:
            continue
        if isinstance(node, TriplePattern):
            table[id(node)] = Counter(x for x in node if isinstance(x, Variable))
        elif isinstance(node, Filter):
            table[id(node)] = table[id(node.inner)] + Counter(_condition_occurrences(node.condition))
        else:
            table[id(node)] = table[id(node.left)] + table[id(node.right)]
    return table


def _condition_occurrences(condition: Condition) -> list[Variable]:
    found, stack = [], [condition]
    while stack:
        node = stack.pop()
        if isinstance(node, (Bound, EqConst)):
            found.append(node.variable)
        elif isinstance(node, EqVar):
            found.extend((node.left, node.right))
        elif isinstance(node, Neg):
            stack.append(node.inner)
        else:
            stack.extend((node.left, node.right))
    return found


def is_well_designed(pattern: GraphPattern) -> WellDesignedReport:
    """Check every OPT occurrence ``P' = (P1 OPT P2)`` of a UNION-free pattern.

    A variable occurring in ``P2`` and somewhere outside ``P'`` (FILTER
    conditions count as occurrences) must also occur in ``P1``.
    """
    if not is_union_free(pattern):
        raise UnsupportedPatternError("well-designedness is defined for UNION-free patterns only")
    occurrences = _occurrences_by_node(pattern)
    total = occurrences[id(pattern)]
    violations = []
    for link, node in walk_linked(pattern):
        if not isinstance(node, Opt):
            continue
        inside = occurrences[id(node)]
        mandatory = occurrences[id(node.left)]
        for variable in sorted(occurrences[id(node.right)]):
            if total[variable] > inside[variable] and variable not in mandatory:
                violations.append(WellDesignedViolation(path_of(link), node, variable))
    return WellDesignedReport(tuple(violations))


# --------------------------------------------------------------------------
# OPT normal form


def _and_operands(pattern: GraphPattern) -> list[GraphPattern]:
    operands, stack = [], [pattern]
    while stack:
        node = stack.pop()
        if isinstance(node, And):
            stack.extend((node.right, node.left))
        else:
            operands.append(node)
    return operands


def opt_in_and_measure(pattern: GraphPattern) -> int:
    """Termination measure of the OPT-extraction rule.

    Sum, over every OPT node, of the number of distinct maximal AND-trees
    among its ancestors. AND-trees are taken after flattening, so the value
    is invariant under associativity/commutativity of AND and under
    swapping the right operands of two stacked OPTs, and it drops by at
    least one at every rewrite step whatever the strategy.
    """
    total = 0
    stack = [(pattern, 0, False)]
    while stack:
        node, trees_above, parent_is_and = stack.pop()
        if isinstance(node, Opt):
            total += trees_above
        if isinstance(node, And) and not parent_is_and:
            trees_above += 1
        for _, child in children(node):
            stack.append((child, trees_above, isinstance(node, And)))
    return total


def _and_tree_roots(pattern: GraphPattern) -> list[tuple[str, ...]]:
    """Paths of AND-tree roots having an OPT operand, in pre-order."""
    roots = []
    for link, node in walk_linked(pattern):
        if not isinstance(node, And) or (link is not None and isinstance(link[2], And)):
            continue
        if any(isinstance(op, Opt) for op in _and_operands(node)):
            roots.append(path_of(link))
    return roots


def _pick_redex(roots: list[tuple[str, ...]], strategy: Strategy) -> tuple[str, ...]:
    if strategy == "outermost":
        return roots[0]
    for path in roots:
        if not any(other != path and other[: len(path)] == path for other in roots):
            return path
    raise AssertionError("unreachable: a finite tree has an innermost redex")


def opt_rewrite_step(pattern: GraphPattern, strategy: Strategy = "outermost") -> GraphPattern | None:
    """One application of the rule modulo AC of AND, or ``None`` at a normal form.

    The AND-tree at the chosen position is flattened; its leftmost OPT
    operand ``(Y OPT Z)`` is replaced by ``Y`` and the tree becomes
    ``(X AND Y) OPT Z``.
    """
    roots = _and_tree_roots(pattern)
    if not roots:
        return None
    path = _pick_redex(roots, strategy)
    operands = _and_operands(subpattern_at(pattern, path))
    index = next(i for i, op in enumerate(operands) if isinstance(op, Opt))
    optional = operands[index]
    operands[index] = optional.left
    return replace_at(pattern, path, Opt(and_all(operands), optional.right))


def opt_rewrite_steps(pattern: GraphPattern, strategy: Strategy = "outermost") -> Iterator[GraphPattern]:
    """Successive patterns of a rewrite run; the last one is in normal form."""
    while True:
        pattern = opt_rewrite_step(pattern, strategy)
        if pattern is None:
            return
        yield pattern


@dataclass(frozen=True)
class OptNormalForm:
    """``(((t1 AND ... AND tk) OPT O1) ... OPT On)`` with each ``Oj`` alike.

    ``mandatory`` is sorted by serialisation; ``optionals`` keep the order in
    which they were extracted.
    """

    mandatory: tuple[TriplePattern, ...]
    optionals: tuple["OptNormalForm", ...] = ()

    def __post_init__(self):
        if not self.mandatory:
            raise ValueError("the mandatory block of a normal form is non-empty")
        if not all(isinstance(t, TriplePattern) for t in self.mandatory):
            raise TypeError("the mandatory block holds triple patterns only")

    def to_pattern(self) -> GraphPattern:
        result = and_all(self.mandatory)
        for optional in self.optionals:
            result = Opt(result, optional.to_pattern())
        return result

    def canonical_key(self) -> tuple:
        """Equal for normal forms equal modulo AC of AND and OPT permutation."""
        return (
            tuple(sorted(serialize_pattern(t) for t in self.mandatory)),
            tuple(sorted(o.canonical_key() for o in self.optionals)),
        )

    def equivalent_modulo_e(self, other: "OptNormalForm") -> bool:
        return self.canonical_key() == other.canonical_key()

    def __str__(self) -> str:
        return serialize_pattern(self.to_pattern())


def has_opt_normal_form_shape(pattern: GraphPattern) -> bool:
    """True for ``(((t1 AND ... AND tk) OPT O1) ... OPT On)``, recursively."""
    optionals = []
    while isinstance(pattern, Opt):
        optionals.append(pattern.right)
        pattern = pattern.left
    if not all(isinstance(op, TriplePattern) for op in _and_operands(pattern)):
        return False
    return all(has_opt_normal_form_shape(o) for o in optionals)


def _extract_normal_form(pattern: GraphPattern) -> OptNormalForm:
    optionals = []
    while isinstance(pattern, Opt):
        optionals.append(pattern.right)
        pattern = pattern.left
    mandatory = _and_operands(pattern)
    if not all(isinstance(t, TriplePattern) for t in mandatory):
        raise ValueError(f"not in OPT normal form: {serialize_pattern(pattern)}")
    return OptNormalForm(
        tuple(sorted(mandatory, key=serialize_pattern)),
        tuple(_extract_normal_form(o) for o in reversed(optionals)),
    )


def _check_opt_normalizable(pattern: GraphPattern) -> None:
    for node in iter_nodes(pattern):
        if isinstance(node, Union):
            raise UnsupportedPatternError("the OPT normal form is defined for UNION-free patterns")
        if isinstance(node, Filter):
            raise UnsupportedPatternError("the OPT normal form is defined for FILTER-free patterns")
    report = is_well_designed(pattern)
    if not report.is_well_designed:
        raise NotWellDesignedError(report)


@deep_recursion(_depth)
def to_opt_normal_form(pattern: GraphPattern, strategy: Strategy = "outermost") -> OptNormalForm:
    _check_opt_normalizable(pattern)
    final = pattern
    for final in opt_rewrite_steps(pattern, strategy):
        pass
    return _extract_normal_form(final)


@deep_recursion(_depth)
def opt_normal_form_direct(pattern: GraphPattern) -> OptNormalForm:
    """Normal form computed structurally, without running the rewrite system."""
    _check_opt_normalizable(pattern)
    return _direct(pattern)


def _direct(pattern: GraphPattern) -> OptNormalForm:
    if isinstance(pattern, TriplePattern):
        return OptNormalForm((pattern,))
    left, right = _direct(pattern.left), _direct(pattern.right)
    if isinstance(pattern, And):
        return OptNormalForm(
            tuple(sorted(left.mandatory + right.mandatory, key=serialize_pattern)),
            left.optionals + right.optionals,
        )
    return OptNormalForm(left.mandatory, left.optionals + (right,))


# --------------------------------------------------------------------------
# FILTER identities


def _is_triple_conjunction(pattern: GraphPattern) -> bool:
    return all(isinstance(op, TriplePattern) for op in _and_operands(pattern))


@deep_recursion(_depth)
def apply_filter_rewrites(pattern: GraphPattern, *, split_or: bool = False) -> GraphPattern:
    """Rewrite to fixpoint with the FILTER identities.

    * ``((P FILTER R1) FILTER R2) -> (P FILTER (R1 && R2))``
    * ``((P1 FILTER R) AND P2) -> ((P1 AND P2) FILTER R)`` when ``P1`` and
      ``P2`` are conjunctions of triple patterns (either operand order)
    * with ``split_or``: ``(P FILTER (R1 || R2)) -> ((P FILTER R1) UNION (P FILTER R2))``
    """
    check_filter_scope(pattern)
    return _filter_rewrite(pattern, split_or)


def _filter_rewrite(pattern: GraphPattern, split_or: bool) -> GraphPattern:
    if isinstance(pattern, TriplePattern):
        return pattern
    if isinstance(pattern, Filter):
        node: GraphPattern = Filter(_filter_rewrite(pattern.inner, split_or), pattern.condition)
    else:
        node = type(pattern)(_filter_rewrite(pattern.left, split_or), _filter_rewrite(pattern.right, split_or))
    while True:
        if isinstance(node, Filter) and isinstance(node.inner, Filter):
            node = Filter(node.inner.inner, Conj(node.inner.condition, node.condition))
        elif split_or and isinstance(node, Filter) and isinstance(node.condition, Disj):
            return Union(
                _filter_rewrite(Filter(node.inner, node.condition.left), split_or),
                _filter_rewrite(Filter(node.inner, node.condition.right), split_or),
            )
        elif (
            isinstance(node, And)
            and isinstance(node.left, Filter)
            and _is_triple_conjunction(node.left.inner)
            and _is_triple_conjunction(node.right)
        ):
            node = Filter(And(node.left.inner, node.right), node.left.condition)
        elif (
            isinstance(node, And)
            and isinstance(node.right, Filter)
            and _is_triple_conjunction(node.right.inner)
            and _is_triple_conjunction(node.left)
        ):
            node = Filter(And(node.left, node.right.inner), node.right.condition)
        else:
            return node


# --------------------------------------------------------------------------


def equivalent_on(first: GraphPattern, second: GraphPattern, dataset: Dataset) -> bool:
    """Whether both patterns have the same answers on this one dataset."""
    return eval_compositional(dataset, first) == eval_compositional(dataset, second)
