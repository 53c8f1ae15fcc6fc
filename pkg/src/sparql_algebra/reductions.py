"""Encodings of SAT-CNF and QBF as pattern-membership problems.

``reduce_sat_cnf`` builds, over the one-triple dataset ``{(a b c)}``, a
pattern of AND, UNION and FILTER and a mapping that belongs to its answer
exactly when the formula is satisfiable. ``reduce_qbf`` builds, over a fixed
four-triple dataset, an AND/OPT/UNION pattern whose nested optionals play
the ∀∃ game; the mapping ``{?B0 -> 1}`` is an answer exactly when the
formula is valid. The brute-force deciders are independent oracles for
both.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import (
    And,
    Bound,
    Disj,
    Filter,
    GraphPattern,
    Neg,
    Opt,
    TriplePattern,
    Variable,
    and_all,
    conjunction,
    union_all,
    vars_of_pattern,
)
from .errors import CapExceededError, ParseError
from .evaluation import membership
from .mappings import Mapping
from .rdf import Dataset, Triple, iri

Clause = tuple[int, ...]

SAT_VAR_CAP = 24
QBF_BLOCK_CAP = 6


@dataclass(frozen=True)
class CnfFormula:
    """Clauses of signed, 1-based variable indices (DIMACS convention)."""

    num_vars: int
    clauses: tuple[Clause, ...]

    def __init__(self, num_vars: int, clauses):
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in clauses))
        if num_vars < 1:
            raise ValueError("a formula has at least one variable")
        for clause in self.clauses:
            if not clause:
                raise ValueError("clauses are non-empty")
            for literal in clause:
                if literal == 0 or abs(literal) > num_vars:
                    raise ValueError(f"literal {literal} outside 1..{num_vars}")

    def mentioned(self) -> list[int]:
        return sorted({abs(lit) for clause in self.clauses for lit in clause})

    def satisfied_by(self, assignment) -> bool:
        """``assignment[i]`` is the truth value of variable ``i``."""
        return all(any(assignment[abs(lit)] == (lit > 0) for lit in clause) for clause in self.clauses)

    def __str__(self) -> str:
        if not self.clauses:
            return "true"
        return " ∧ ".join("(" + " ∨ ".join(_literal_name(l) for l in c) + ")" for c in self.clauses)


def _literal_name(literal: int) -> str:
    return ("¬" if literal < 0 else "") + f"x{abs(literal)}"


@dataclass(frozen=True)
class QbfFormula:
    """``∀x1 ∃y1 ... ∀xm ∃ym matrix``.

    Matrix variables are numbered ``2i-1`` for ``x_i`` and ``2i`` for ``y_i``.
    """

    num_blocks: int
    matrix: CnfFormula

    def __post_init__(self):
        if self.num_blocks < 1:
            raise ValueError("a prefix has at least one block")
        if self.matrix.num_vars > 2 * self.num_blocks:
            raise ValueError(
                f"matrix has {self.matrix.num_vars} variables but the prefix binds {2 * self.num_blocks}"
            )

    @staticmethod
    def x(i: int) -> int:
        return 2 * i - 1

    @staticmethod
    def y(i: int) -> int:
        return 2 * i

    def __str__(self) -> str:
        prefix = "".join(f"∀x{i}∃y{i}" for i in range(1, self.num_blocks + 1))
        return f"{prefix} {_qbf_matrix_str(self.matrix)}"


def _qbf_matrix_str(matrix: CnfFormula) -> str:
    if not matrix.clauses:
        return "true"

    def name(lit: int) -> str:
        index = abs(lit)
        base = f"x{(index + 1) // 2}" if index % 2 else f"y{index // 2}"
        return ("¬" if lit < 0 else "") + base

    return " ∧ ".join("(" + " ∨ ".join(name(l) for l in c) + ")" for c in matrix.clauses)


@dataclass(frozen=True)
class Reduction:
    dataset: Dataset
    pattern: GraphPattern
    mapping: Mapping

    def holds(self) -> bool:
        """Whether the target mapping is an answer, by full evaluation."""
        return membership(self.dataset, self.pattern, self.mapping)


# --------------------------------------------------------------------------
# SAT-CNF


A, B, C, TV, TRUE, FALSE, ZERO, ONE = (iri(x) for x in ("a", "b", "c", "tv", "true", "false", "0", "1"))


def reduce_sat_cnf(formula: CnfFormula) -> Reduction:
    """``(P AND ((P_C1 AND ... AND P_Cn) FILTER R))`` over ``{(a b c)}``.

    ``?Xi`` stands for ``x_i`` and ``?Yi`` for ``¬x_i``. A conjunct
    ``(!bound(?Xi) || !bound(?Yi))`` of ``R`` is kept only when both
    variables occur in the clause patterns: otherwise one of them is never
    bound under the FILTER, the conjunct is always true, and keeping it would
    put a variable in the condition that its pattern lacks. With no conjunct
    left the FILTER is omitted; a formula without clauses becomes
    ``(a b c)``, whose only answer is the empty mapping.
    """
    dataset = Dataset([Triple(A, B, C)])
    mentioned = formula.mentioned()
    if not mentioned:
        return Reduction(dataset, TriplePattern(A, B, C), Mapping())

    def pos(i: int) -> Variable:
        return Variable(f"X{i}")

    def neg(i: int) -> Variable:
        return Variable(f"Y{i}")

    def atom(literal: int) -> TriplePattern:
        return TriplePattern(A, B, pos(literal) if literal > 0 else neg(-literal))

    base = and_all([TriplePattern(A, B, pos(i)) for i in mentioned] + [TriplePattern(A, B, neg(i)) for i in mentioned])
    clauses = and_all([union_all([atom(lit) for lit in clause]) for clause in formula.clauses])
    in_clauses = vars_of_pattern(clauses)
    conjuncts = [
        Disj(Neg(Bound(pos(i))), Neg(Bound(neg(i))))
        for i in mentioned
        if pos(i) in in_clauses and neg(i) in in_clauses
    ]
    if conjuncts:
        clauses = Filter(clauses, conjunction(conjuncts))
    target = Mapping({v: C for i in mentioned for v in (pos(i), neg(i))})
    return Reduction(dataset, And(base, clauses), target)


def brute_force_sat(formula: CnfFormula, *, max_vars: int = SAT_VAR_CAP) -> bool:
    """Truth-table satisfiability over all ``2^num_vars`` assignments."""
    if formula.num_vars > max_vars:
        raise CapExceededError(f"{formula.num_vars} variables exceed the cap of {max_vars}")
    for values in itertools.product((False, True), repeat=formula.num_vars):
        if formula.satisfied_by((None,) + values):
            return True
    return False


# --------------------------------------------------------------------------
# QBF


QBF_DATASET = Dataset([Triple(A, TV, ZERO), Triple(A, TV, ONE), Triple(A, FALSE, ZERO), Triple(A, TRUE, ONE)])


def _tv(name: str) -> TriplePattern:
    return TriplePattern(A, TV, Variable(name))


def _ladder(i: int, ys: int, flag: str) -> GraphPattern:
    return and_all(
        [_tv(f"X{j}") for j in range(1, i + 1)]
        + [_tv(f"Y{j}") for j in range(1, ys + 1)]
        + [TriplePattern(A, FALSE, Variable(f"{flag}{i - 1}")), TriplePattern(A, TRUE, Variable(f"{flag}{i}"))]
    )


def qbf_p(i: int) -> GraphPattern:
    return _ladder(i, i - 1, "A")


def qbf_q(i: int) -> GraphPattern:
    return _ladder(i, i, "B")


def qbf_matrix_pattern(formula: QbfFormula) -> GraphPattern | None:
    """``P_psi``; positive literals match ``(a true ?V)``, negative ``(a false ?V)``."""
    if not formula.matrix.clauses:
        return None

    def atom(literal: int) -> TriplePattern:
        index = abs(literal)
        name = f"X{(index + 1) // 2}" if index % 2 else f"Y{index // 2}"
        return TriplePattern(A, TRUE if literal > 0 else FALSE, Variable(name))

    return and_all([union_all([atom(lit) for lit in clause]) for clause in formula.matrix.clauses])


def reduce_qbf(formula: QbfFormula) -> Reduction:
    """``((a true ?B0) OPT (P1 OPT (Q1 OPT ... (Pm OPT (Qm AND P_psi)))))``.

    An empty matrix is true, so ``(Qm AND P_psi)`` degenerates to ``Qm``.
    """
    m = formula.num_blocks
    matrix = qbf_matrix_pattern(formula)
    if matrix is not None:
        ladder_vars = {v.name for i in range(1, m + 1) for v in vars_of_pattern(And(qbf_p(i), qbf_q(i)))}
        ladder_only = {n for n in ladder_vars if n[0] in "AB"}
        assert not ladder_only & {v.name for v in vars_of_pattern(matrix)}
    inner: GraphPattern = qbf_q(m) if matrix is None else And(qbf_q(m), matrix)
    inner = Opt(qbf_p(m), inner)
    for i in range(m - 1, 0, -1):
        inner = Opt(qbf_p(i), Opt(qbf_q(i), inner))
    pattern = Opt(TriplePattern(A, TRUE, Variable("B0")), inner)
    return Reduction(QBF_DATASET, pattern, Mapping({Variable("B0"): ONE}))


def brute_force_qbf(formula: QbfFormula, *, max_blocks: int = QBF_BLOCK_CAP) -> bool:
    """Game-tree evaluation of the ∀∃ prefix."""
    if formula.num_blocks > max_blocks:
        raise CapExceededError(f"{formula.num_blocks} blocks exceed the cap of {max_blocks}")
    m = formula.num_blocks

    def play(block: int, values: tuple) -> bool:
        # values[2i-1] is x_i and values[2i] is y_i; slot 0 is unused
        if block > m:
            return formula.matrix.satisfied_by(values)
        return all(any(play(block + 1, values + (x, y)) for y in (False, True)) for x in (False, True))

    return play(1, (None,))


# --------------------------------------------------------------------------
# DIMACS


def parse_dimacs(text: str) -> CnfFormula | QbfFormula:
    """``p cnf <vars> <clauses>`` then clauses of signed integers ending in 0.

    A ``b <m>`` line turns the input into a QBF with ``m`` ∀∃ blocks whose
    variable ``2i-1`` is ``x_i`` and ``2i`` is ``y_i``. Lines starting with
    ``c`` are comments.
    """
    num_vars = num_clauses = blocks = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for number, line in enumerate(text.splitlines(), 1):
        fields = line.split()
        if not fields or fields[0] == "c":
            continue
        if fields[0] == "p":
            if len(fields) != 4 or fields[1] != "cnf" or num_vars is not None:
                raise ParseError("expected a single 'p cnf <vars> <clauses>' header", number, 1)
            num_vars, num_clauses = _ints(fields[2:], number)
            continue
        if fields[0] == "b":
            if len(fields) != 2 or blocks is not None:
                raise ParseError("expected a single 'b <blocks>' line", number, 1)
            (blocks,) = _ints(fields[1:], number)
            continue
        if num_vars is None:
            raise ParseError("clause before the 'p cnf' header", number, 1)
        for literal in _ints(fields, number):
            if literal == 0:
                clauses.append(current)
                current = []
            else:
                current.append(literal)
    if num_vars is None:
        raise ParseError("missing 'p cnf' header", 1, 1)
    if current:
        raise ParseError("last clause is not terminated by 0", len(text.splitlines()), 1)
    if len(clauses) != num_clauses:
        raise ParseError(f"header announces {num_clauses} clauses, found {len(clauses)}", 1, 1)
    try:
        formula = CnfFormula(num_vars, clauses)
        return formula if blocks is None else QbfFormula(blocks, formula)
    except ValueError as error:
        raise ParseError(str(error), 1, 1) from None


def _ints(fields: list[str], line: int) -> list[int]:
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(fields)!r}", line, 1) from None


def format_dimacs(formula: CnfFormula | QbfFormula) -> str:
    lines = []
    if isinstance(formula, QbfFormula):
        lines.append(f"b {formula.num_blocks}")
        formula = formula.matrix
    lines.append(f"p cnf {formula.num_vars} {len(formula.clauses)}")
    lines.extend(" ".join(map(str, clause)) + " 0" for clause in formula.clauses)
    return "\n".join(lines) + "\n"
