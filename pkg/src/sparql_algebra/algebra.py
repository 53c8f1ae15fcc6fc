"""Graph pattern and FILTER condition syntax trees.

Patterns are written fully parenthesised, one operator per pair of
parentheses::

    (((?A name ?N) OPT (?A phone ?P)) FILTER ?P = "777-3426")

The parser keeps the parenthesisation exactly as written; any reassociation
is an explicit rewrite (see :mod:`sparql_algebra.rewriting`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator
from typing import Union as TypingUnion

from ._deep import deep_recursion
from ._lexer import VAR_NAME_RE, Token, tokenize
from .errors import ParseError, ScopeError
from .rdf import Term, iri, literal

KEYWORDS = ("AND", "OPT", "UNION", "FILTER")


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not VAR_NAME_RE.fullmatch(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")

    def __lt__(self, other: "Variable") -> bool:
        if not isinstance(other, Variable):
            return NotImplemented
        return self.name < other.name

    def __str__(self) -> str:
        return f"?{self.name}"


def var(name: str) -> Variable:
    return Variable(name.removeprefix("?"))


TermOrVariable = TypingUnion[Term, Variable]


# --------------------------------------------------------------------------
# Graph patterns


class GraphPattern:
    __slots__ = ()
    depth: int

    def __str__(self) -> str:
        return serialize_pattern(self)


@dataclass(frozen=True, slots=True)
class TriplePattern(GraphPattern):
    subject: TermOrVariable
    predicate: TermOrVariable
    object: TermOrVariable
    depth: int = field(default=1, init=False, compare=False, repr=False)

    def __post_init__(self):
        for position, value in (("subject", self.subject), ("predicate", self.predicate)):
            if isinstance(value, Term) and value.is_literal:
                raise ValueError(f"literal {value} is not allowed in {position} position")
        for value in (self.subject, self.predicate, self.object):
            if not isinstance(value, (Term, Variable)):
                raise TypeError(f"triple pattern positions hold terms or variables, got {value!r}")

    def __iter__(self) -> Iterator[TermOrVariable]:
        return iter((self.subject, self.predicate, self.object))

    @property
    def variables(self) -> frozenset[Variable]:
        return frozenset(x for x in self if isinstance(x, Variable))


@dataclass(frozen=True, slots=True)
class BinaryPattern(GraphPattern):
    left: GraphPattern
    right: GraphPattern
    depth: int = field(default=0, init=False, compare=False, repr=False)

    operator = ""

    def __post_init__(self):
        object.__setattr__(self, "depth", 1 + max(self.left.depth, self.right.depth))


@dataclass(frozen=True, slots=True)
class And(BinaryPattern):
    operator = "AND"


@dataclass(frozen=True, slots=True)
class Opt(BinaryPattern):
    operator = "OPT"


@dataclass(frozen=True, slots=True)
class Union(BinaryPattern):
    operator = "UNION"


@dataclass(frozen=True, slots=True)
class Filter(GraphPattern):
    inner: GraphPattern
    condition: "Condition"
    depth: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "depth", 1 + max(self.inner.depth, self.condition.depth))


# --------------------------------------------------------------------------
# Built-in conditions


class Condition:
    __slots__ = ()
    depth: int

    def __str__(self) -> str:
        return serialize_condition(self)


@dataclass(frozen=True, slots=True)
class Bound(Condition):
    variable: Variable
    depth: int = field(default=1, init=False, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class EqConst(Condition):
    variable: Variable
    constant: Term
    depth: int = field(default=1, init=False, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class EqVar(Condition):
    left: Variable
    right: Variable
    depth: int = field(default=1, init=False, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class Neg(Condition):
    inner: Condition
    depth: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "depth", 1 + self.inner.depth)


@dataclass(frozen=True, slots=True)
class Disj(Condition):
    left: Condition
    right: Condition
    depth: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "depth", 1 + max(self.left.depth, self.right.depth))


@dataclass(frozen=True, slots=True)
class Conj(Condition):
    left: Condition
    right: Condition
    depth: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "depth", 1 + max(self.left.depth, self.right.depth))


def conjunction(conditions) -> Condition:
    """Left-nested conjunction of a non-empty sequence of conditions."""
    conditions = list(conditions)
    if not conditions:
        raise ValueError("conjunction of no conditions")
    result = conditions[0]
    for condition in conditions[1:]:
        result = Conj(result, condition)
    return result


def and_all(patterns) -> GraphPattern:
    """Left-nested AND of a non-empty sequence of patterns."""
    return _fold_binary(And, patterns)


def union_all(patterns) -> GraphPattern:
    """Left-nested UNION of a non-empty sequence of patterns."""
    return _fold_binary(Union, patterns)


def _fold_binary(node, patterns) -> GraphPattern:
    patterns = list(patterns)
    if not patterns:
        raise ValueError(f"{node.operator} of no patterns")
    result = patterns[0]
    for pattern in patterns[1:]:
        result = node(result, pattern)
    return result


def _pattern_depth(pattern, *args, **kwargs) -> int:
    return getattr(pattern, "depth", 0)


# --------------------------------------------------------------------------
# Traversal and variable analysis


def children(pattern: GraphPattern) -> tuple[tuple[str, GraphPattern], ...]:
    if isinstance(pattern, BinaryPattern):
        return (("left", pattern.left), ("right", pattern.right))
    if isinstance(pattern, Filter):
        return (("inner", pattern.inner),)
    return ()


def iter_nodes(pattern: GraphPattern) -> Iterator[GraphPattern]:
    """Pre-order, left-to-right traversal of the sub-patterns."""
    stack = [pattern]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(child for _, child in reversed(children(node)))


# A link is ``None`` at the root, else ``(parent_link, step, parent)``; paths
# are only materialised on demand so deep patterns are walked in linear time.
Link = TypingUnion[None, tuple]


def walk_linked(pattern: GraphPattern) -> Iterator[tuple[Link, GraphPattern]]:
    stack: list[tuple[Link, GraphPattern]] = [(None, pattern)]
    while stack:
        link, node = stack.pop()
        yield link, node
        for step, child in reversed(children(node)):
            stack.append(((link, step, node), child))


def path_of(link: Link) -> tuple[str, ...]:
    steps = []
    while link is not None:
        link, step, _ = link
        steps.append(step)
    return tuple(reversed(steps))


def walk(pattern: GraphPattern) -> Iterator[tuple[tuple[str, ...], GraphPattern]]:
    """Pre-order, left-to-right traversal yielding ``(path, node)`` pairs."""
    for link, node in walk_linked(pattern):
        yield path_of(link), node


def subpattern_at(pattern: GraphPattern, path: tuple[str, ...]) -> GraphPattern:
    for step in path:
        pattern = getattr(pattern, step)
    return pattern


def format_path(path: tuple[str, ...]) -> str:
    return ".".join(path) if path else "root"


def triples_of(pattern: GraphPattern) -> list[TriplePattern]:
    return [node for node in iter_nodes(pattern) if isinstance(node, TriplePattern)]


def vars_of_condition(condition: Condition) -> frozenset[Variable]:
    found: set[Variable] = set()
    stack = [condition]
    while stack:
        node = stack.pop()
        if isinstance(node, (Bound, EqConst)):
            found.add(node.variable)
        elif isinstance(node, EqVar):
            found.update((node.left, node.right))
        elif isinstance(node, Neg):
            stack.append(node.inner)
        else:
            stack.extend((node.left, node.right))
    return frozenset(found)


def vars_of_pattern(pattern: GraphPattern) -> frozenset[Variable]:
    """Every variable occurring in the pattern, FILTER conditions included."""
    found: set[Variable] = set()
    for node in iter_nodes(pattern):
        if isinstance(node, TriplePattern):
            found.update(node.variables)
        elif isinstance(node, Filter):
            found.update(vars_of_condition(node.condition))
    return frozenset(found)


def vars_by_node(pattern: GraphPattern) -> dict[int, frozenset[Variable]]:
    """``vars_of_pattern`` of every sub-pattern, keyed by ``id``, in one pass."""
    table: dict[int, frozenset[Variable]] = {}
    for node in reversed(list(iter_nodes(pattern))):
        if id(node) in table:
            continue
        if isinstance(node, TriplePattern):
            table[id(node)] = frozenset(node.variables)
        elif isinstance(node, Filter):
            table[id(node)] = table[id(node.inner)] | vars_of_condition(node.condition)
        else:
            table[id(node)] = table[id(node.left)] | table[id(node.right)]
    return table


def is_union_free(pattern: GraphPattern) -> bool:
    return not any(isinstance(node, Union) for node in iter_nodes(pattern))


def operators_of(pattern: GraphPattern) -> frozenset[str]:
    """Names of the operators used: a subset of AND, OPT, UNION, FILTER."""
    names = set()
    for node in iter_nodes(pattern):
        if isinstance(node, BinaryPattern):
            names.add(node.operator)
        elif isinstance(node, Filter):
            names.add("FILTER")
    return frozenset(names)


@dataclass(frozen=True)
class ScopeViolation:
    path: tuple[str, ...]
    node: Filter
    missing: frozenset[Variable]

    def __str__(self) -> str:
        names = ", ".join(str(v) for v in sorted(self.missing))
        return f"FILTER at {format_path(self.path)} mentions {names} not occurring in its pattern"


@dataclass(frozen=True)
class ScopeReport:
    violations: tuple[ScopeViolation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "filter scope: ok"
        return "filter scope: violated\n" + "\n".join(f"  {v}" for v in self.violations)


def validate_filter_scope(pattern: GraphPattern) -> ScopeReport:
    """Check ``var(R) ⊆ var(P)`` for every ``(P FILTER R)`` node."""
    violations = []
    table = vars_by_node(pattern)
    for link, node in walk_linked(pattern):
        if isinstance(node, Filter):
            missing = vars_of_condition(node.condition) - table[id(node.inner)]
            if missing:
                violations.append(ScopeViolation(path_of(link), node, frozenset(missing)))
    return ScopeReport(tuple(violations))


def check_filter_scope(pattern: GraphPattern) -> None:
    report = validate_filter_scope(pattern)
    if not report.ok:
        raise ScopeError(report)


# --------------------------------------------------------------------------
# Serialisation


def serialize_term(value: TermOrVariable) -> str:
    return str(value)


@deep_recursion(_pattern_depth)
def serialize_condition(condition: Condition) -> str:
    if isinstance(condition, Bound):
        return f"bound({condition.variable})"
    if isinstance(condition, EqConst):
        return f"{condition.variable} = {condition.constant}"
    if isinstance(condition, EqVar):
        return f"{condition.left} = {condition.right}"
    if isinstance(condition, Neg):
        return f"(! {serialize_condition(condition.inner)})"
    symbol = "||" if isinstance(condition, Disj) else "&&"
    return f"({serialize_condition(condition.left)} {symbol} {serialize_condition(condition.right)})"


@deep_recursion(_pattern_depth)
def serialize_pattern(pattern: GraphPattern) -> str:
    if isinstance(pattern, TriplePattern):
        return "({} {} {})".format(*pattern)
    if isinstance(pattern, Filter):
        return f"({serialize_pattern(pattern.inner)} FILTER {serialize_condition(pattern.condition)})"
    return f"({serialize_pattern(pattern.left)} {pattern.operator} {serialize_pattern(pattern.right)})"


# --------------------------------------------------------------------------
# Parsing


def _nesting_depth(text: str, *args, **kwargs) -> int:
    depth = deepest = 0
    for char in text:
        if char == "(":
            depth += 1
            deepest = max(deepest, depth)
        elif char == ")":
            depth -= 1
    return deepest


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(tokenize(text))
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        if token.kind != "eof":
            self.index += 1
        return token

    def error(self, message: str, token: Token | None = None) -> ParseError:
        token = token or self.peek()
        return ParseError(message, token.line, token.column)

    def expect(self, text: str) -> Token:
        token = self.peek()
        if token.kind == "punct" and token.text == text:
            return self.advance()
        if token.kind == "bare" and token.text in KEYWORDS and text == ")":
            raise self.error(f"unparenthesized binary operator {token.text}")
        found = token.text or "end of input"
        raise self.error(f"expected {text!r}, found {found!r}")

    def finish(self) -> None:
        token = self.peek()
        if token.kind == "eof":
            return
        if token.kind == "bare" and token.text in KEYWORDS:
            raise self.error(f"unparenthesized binary operator {token.text}")
        raise self.error(f"unexpected trailing input {token.text!r}")

    def pattern(self) -> GraphPattern:
        self.expect("(")
        head = self.peek()
        if not (head.kind == "punct" and head.text == "("):
            return self.triple()
        left = self.pattern()
        operator = self.advance()
        if operator.kind != "bare" or operator.text not in KEYWORDS:
            raise self.error(f"expected AND, OPT, UNION or FILTER, found {operator.text!r}", operator)
        if operator.text == "FILTER":
            node: GraphPattern = Filter(left, self.condition())
        else:
            right = self.pattern()
            node = {"AND": And, "OPT": Opt, "UNION": Union}[operator.text](left, right)
        self.expect(")")
        return node

    def term_or_variable(self) -> TermOrVariable:
        token = self.advance()
        if token.kind == "var":
            return Variable(token.text[1:])
        if token.kind == "literal":
            if len(token.text) == 2:
                raise self.error("empty literal", token)
            return literal(token.text[1:-1])
        if token.kind == "bare":
            return iri(token.text)
        raise self.error(f"expected a term or variable, found {token.text or 'end of input'!r}", token)

    def triple(self) -> TriplePattern:
        start = self.peek()
        parts = [self.term_or_variable() for _ in range(3)]
        self.expect(")")
        try:
            return TriplePattern(*parts)
        except ValueError as exc:
            raise self.error(str(exc), start) from None

    def variable(self) -> Variable:
        token = self.advance()
        if token.kind != "var":
            raise self.error(f"expected a variable, found {token.text or 'end of input'!r}", token)
        return Variable(token.text[1:])

    def condition(self) -> Condition:
        token = self.peek()
        if token.kind == "bare" and token.text == "bound":
            self.advance()
            self.expect("(")
            variable = self.variable()
            self.expect(")")
            return Bound(variable)
        if token.kind == "var":
            left = self.variable()
            self.expect("=")
            right = self.term_or_variable()
            if isinstance(right, Variable):
                return EqVar(left, right)
            return EqConst(left, right)
        if token.kind == "punct" and token.text == "(":
            self.advance()
            if self.peek().text == "!" and self.peek().kind == "punct":
                self.advance()
                inner = self.condition()
                self.expect(")")
                return Neg(inner)
            first = self.condition()
            joiner = self.peek()
            if joiner.kind == "punct" and joiner.text in ("||", "&&"):
                self.advance()
                second = self.condition()
                self.expect(")")
                return Disj(first, second) if joiner.text == "||" else Conj(first, second)
            self.expect(")")
            return first
        raise self.error(f"expected a condition, found {token.text or 'end of input'!r}")


@deep_recursion(_nesting_depth)
def parse_pattern(text: str) -> GraphPattern:
    parser = _Parser(text)
    result = parser.pattern()
    parser.finish()
    return result


@deep_recursion(_nesting_depth)
def parse_condition(text: str) -> Condition:
    parser = _Parser(text)
    result = parser.condition()
    parser.finish()
    return result
