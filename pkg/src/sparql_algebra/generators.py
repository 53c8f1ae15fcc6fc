"""Random and exhaustive generators of datasets, patterns and formulas.

Everything takes an explicit :class:`random.Random` so runs are
reproducible from a seed.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterator, Sequence

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
    children,
    vars_of_condition,
    vars_of_pattern,
)
from .mappings import Mapping
from .rdf import Dataset, Term, Triple, iri, literal
from .reductions import CnfFormula, QbfFormula

IRIS = tuple(iri(x) for x in ("a", "b", "c", "p", "q"))
VOCABULARY: tuple[Term, ...] = IRIS + (literal("v"),)
VARIABLES = tuple(Variable(x) for x in ("X", "Y", "Z", "W"))


def random_triple(rng: random.Random, vocabulary: Sequence[Term] = VOCABULARY) -> Triple:
    iris = [t for t in vocabulary if t.is_iri]
    return Triple(rng.choice(iris), rng.choice(iris), rng.choice(vocabulary))


def random_dataset(
    rng: random.Random, max_triples: int = 30, vocabulary: Sequence[Term] = VOCABULARY
) -> Dataset:
    return Dataset(random_triple(rng, vocabulary) for _ in range(rng.randint(0, max_triples)))


def random_triple_pattern(
    rng: random.Random,
    variables: Sequence[Variable] = VARIABLES,
    vocabulary: Sequence[Term] = VOCABULARY,
    var_bias: float = 0.6,
) -> TriplePattern:
    iris = [t for t in vocabulary if t.is_iri]

    def position(constants):
        return rng.choice(variables) if rng.random() < var_bias else rng.choice(constants)

    return TriplePattern(position(iris), position(iris), position(vocabulary))


def random_condition(
    rng: random.Random, variables: Sequence[Variable], depth: int = 2, vocabulary: Sequence[Term] = VOCABULARY
) -> Condition:
    """A condition over ``variables`` (non-empty) of depth at most ``depth``."""
    variables = sorted(variables)
    if depth <= 1 or rng.random() < 0.4:
        kind = rng.randrange(3)
        if kind == 0:
            return Bound(rng.choice(variables))
        if kind == 1:
            return EqConst(rng.choice(variables), rng.choice(vocabulary))
        return EqVar(rng.choice(variables), rng.choice(variables))
    kind = rng.randrange(3)
    if kind == 0:
        return Neg(random_condition(rng, variables, depth - 1, vocabulary))
    left = random_condition(rng, variables, depth - 1, vocabulary)
    right = random_condition(rng, variables, depth - 1, vocabulary)
    return Disj(left, right) if kind == 1 else Conj(left, right)


def random_pattern(
    rng: random.Random,
    depth: int = 3,
    operators: Sequence[str] = ("AND", "OPT", "UNION", "FILTER"),
    variables: Sequence[Variable] = VARIABLES,
    vocabulary: Sequence[Term] = VOCABULARY,
) -> GraphPattern:
    """A random pattern of depth at most ``depth`` whose filters respect scope."""
    if depth <= 1 or rng.random() < 0.25:
        return random_triple_pattern(rng, variables, vocabulary)
    operator = rng.choice(operators)
    if operator == "FILTER":
        inner = random_pattern(rng, depth - 1, operators, variables, vocabulary)
        scope = vars_of_pattern(inner)
        if not scope:
            return inner
        return Filter(inner, random_condition(rng, scope, min(2, depth - 1), vocabulary))
    left = random_pattern(rng, depth - 1, operators, variables, vocabulary)
    right = random_pattern(rng, depth - 1, operators, variables, vocabulary)
    return {"AND": And, "OPT": Opt, "UNION": Union}[operator](left, right)


# --------------------------------------------------------------------------
# Well-designed patterns


def mandatory_vars(pattern: GraphPattern) -> frozenset[Variable]:
    """Variables with an occurrence outside every OPT right-hand side."""
    found: set[Variable] = set()
    stack = [pattern]
    while stack:
        node = stack.pop()
        if isinstance(node, TriplePattern):
            found.update(node.variables)
        elif isinstance(node, Opt):
            stack.append(node.left)
        elif isinstance(node, Filter):
            found.update(vars_of_condition(node.condition))
            stack.append(node.inner)
        else:
            stack.extend(child for _, child in children(node))
    return frozenset(found)


class _Fresh:
    def __init__(self):
        self.count = 0

    def __call__(self) -> Variable:
        self.count += 1
        return Variable(f"V{self.count}")


def random_well_designed(
    rng: random.Random,
    depth: int = 4,
    *,
    filters: bool = False,
    vocabulary: Sequence[Term] = VOCABULARY,
) -> GraphPattern:
    """A UNION-free pattern that is well designed by construction.

    The right operand of an OPT only shares the mandatory variables of its
    left operand; every other variable it uses is private to it. A filter
    only mentions mandatory variables of the pattern it restricts.
    """
    return _well_designed(rng, depth, frozenset(), _Fresh(), filters, vocabulary)


def _well_designed(rng, depth, allowed, fresh, filters, vocabulary) -> GraphPattern:
    if depth <= 1 or rng.random() < 0.2:
        return _triple_over(rng, allowed, fresh, vocabulary)
    choices = ["AND", "OPT", "OPT"] + (["FILTER"] if filters else [])
    operator = rng.choice(choices)
    if operator == "FILTER":
        inner = _well_designed(rng, depth - 1, allowed, fresh, filters, vocabulary)
        scope = mandatory_vars(inner)
        if not scope:
            return inner
        return Filter(inner, random_condition(rng, scope, 2, vocabulary))
    left = _well_designed(rng, depth - 1, allowed, fresh, filters, vocabulary)
    if operator == "AND":
        right = _well_designed(rng, depth - 1, allowed | mandatory_vars(left), fresh, filters, vocabulary)
        return And(left, right)
    right = _well_designed(rng, depth - 1, mandatory_vars(left), fresh, filters, vocabulary)
    return Opt(left, right)


def _triple_over(rng, allowed, fresh, vocabulary) -> TriplePattern:
    iris = [t for t in vocabulary if t.is_iri]
    pool = sorted(allowed)
    new: list[Variable] = []

    def position(constants):
        roll = rng.random()
        if roll < 0.35:
            return rng.choice(constants)
        if pool and roll < 0.8:
            return rng.choice(pool)
        if new and rng.random() < 0.5:
            return new[0]
        new.append(fresh())
        return new[-1]

    return TriplePattern(position(iris), position(iris), position(vocabulary))


# --------------------------------------------------------------------------
# AND/FILTER grid


GRID_TEMPLATES = (
    TriplePattern(Variable("X"), iri("p"), Variable("Y")),
    TriplePattern(Variable("Y"), iri("p"), Variable("Z")),
    TriplePattern(Variable("X"), iri("q"), iri("a")),
    TriplePattern(Variable("Z"), Variable("Y"), Variable("X")),
)


def _grid_conditions(variables: frozenset[Variable]) -> list[Condition]:
    ordered = sorted(variables)
    first, last = ordered[0], ordered[-1]
    return [EqConst(first, iri("a")), Neg(EqVar(first, last)), Disj(Bound(last), EqConst(last, iri("b")))]


def and_filter_grid(max_triples: int = 4, max_filters: int = 2) -> Iterator[GraphPattern]:
    """Every AND/FILTER pattern over the grid templates up to the given sizes.

    Triples come from :data:`GRID_TEMPLATES` (multisets, left-nested AND).
    A first filter may wrap the leftmost triple or the whole conjunction; a
    second one wraps the whole pattern.
    """
    for size in range(1, max_triples + 1):
        for combo in itertools.combinations_with_replacement(GRID_TEMPLATES, size):
            base = and_all(combo)
            yield base
            if max_filters < 1:
                continue
            first_options = [Filter(base, c) for c in _grid_conditions(vars_of_pattern(base))]
            if size > 1:
                head = combo[0]
                first_options += [
                    and_all((Filter(head, c),) + combo[1:]) for c in _grid_conditions(vars_of_pattern(head))
                ]
            for pattern in first_options:
                yield pattern
                if max_filters < 2:
                    continue
                for c in _grid_conditions(vars_of_pattern(pattern)):
                    yield Filter(pattern, c)


def all_mappings(variables, terms: Sequence[Term]) -> Iterator[Mapping]:
    """Every mapping with exactly this domain over ``terms``."""
    variables = sorted(variables)
    for values in itertools.product(terms, repeat=len(variables)):
        yield Mapping(dict(zip(variables, values)))


# --------------------------------------------------------------------------
# Formulas


def random_cnf(
    rng: random.Random, max_vars: int = 10, max_clauses: int = 8, max_width: int = 3
) -> CnfFormula:
    num_vars = rng.randint(1, max_vars)
    clauses = [
        [rng.choice((-1, 1)) * rng.randint(1, num_vars) for _ in range(rng.randint(1, max_width))]
        for _ in range(rng.randint(0, max_clauses))
    ]
    return CnfFormula(num_vars, clauses)


def random_qbf(
    rng: random.Random, max_blocks: int = 3, max_clauses: int = 4, max_width: int = 3
) -> QbfFormula:
    blocks = rng.randint(1, max_blocks)
    return QbfFormula(blocks, random_cnf_over(rng, 2 * blocks, max_clauses, max_width))


def random_cnf_over(rng: random.Random, num_vars: int, max_clauses: int, max_width: int) -> CnfFormula:
    clauses = [
        [rng.choice((-1, 1)) * rng.randint(1, num_vars) for _ in range(rng.randint(1, max_width))]
        for _ in range(rng.randint(0, max_clauses))
    ]
    return CnfFormula(num_vars, clauses)


def all_clauses(num_vars: int, max_width: int) -> list[tuple[int, ...]]:
    """Clauses over distinct variables, literals in increasing variable order."""
    clauses = []
    for width in range(1, max_width + 1):
        for chosen in itertools.combinations(range(1, num_vars + 1), width):
            for signs in itertools.product((1, -1), repeat=width):
                clauses.append(tuple(s * v for s, v in zip(signs, chosen)))
    return clauses


def enumerate_cnf(num_vars: int, max_clauses: int, max_width: int) -> Iterator[CnfFormula]:
    """Every set of at most ``max_clauses`` distinct clauses over ``num_vars`` variables."""
    clauses = all_clauses(num_vars, max_width)
    for count in range(max_clauses + 1):
        for chosen in itertools.combinations(clauses, count):
            yield CnfFormula(num_vars, chosen)


def enumerate_qbf(max_blocks: int, max_clauses: int, max_width: int) -> Iterator[QbfFormula]:
    for blocks in range(1, max_blocks + 1):
        for matrix in enumerate_cnf(2 * blocks, max_clauses, max_width):
            yield QbfFormula(blocks, matrix)
