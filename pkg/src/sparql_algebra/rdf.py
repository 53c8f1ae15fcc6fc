"""Ground RDF terms, triples and datasets, plus the line-based dataset format.

Blank nodes are not modelled: identifiers such as ``B1`` are plain IRIs.
A bare token is an IRI and a double-quoted token is a literal::

    # comment
    B1 name paul
    B1 phone "777-3426"
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from ._lexer import BARE_RE, tokenize
from .errors import ParseError


class TermKind(enum.Enum):
    IRI = "iri"
    LITERAL = "literal"


@dataclass(frozen=True, slots=True)
class Term:
    kind: TermKind
    text: str

    def __post_init__(self):
        if not isinstance(self.text, str) or not self.text:
            raise ValueError("term text must be a non-empty string")
        if self.kind is TermKind.IRI and not BARE_RE.fullmatch(self.text):
            raise ValueError(f"invalid IRI token {self.text!r}")
        if self.kind is TermKind.LITERAL and ('"' in self.text or "\n" in self.text):
            raise ValueError(f"literal text may not contain quotes or newlines: {self.text!r}")

    @property
    def is_iri(self) -> bool:
        return self.kind is TermKind.IRI

    @property
    def is_literal(self) -> bool:
        return self.kind is TermKind.LITERAL

    def sort_key(self) -> tuple[str, str]:
        return (self.text, self.kind.value)

    def __lt__(self, other: "Term") -> bool:
        if not isinstance(other, Term):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f'"{self.text}"' if self.is_literal else self.text


def iri(text: str) -> Term:
    return Term(TermKind.IRI, text)


def literal(text: str) -> Term:
    return Term(TermKind.LITERAL, text)


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if not self.subject.is_iri:
            raise ValueError(f"subject must be an IRI, got literal {self.subject}")
        if not self.predicate.is_iri:
            raise ValueError(f"predicate must be an IRI, got literal {self.predicate}")

    def sort_key(self):
        return (self.subject.sort_key(), self.predicate.sort_key(), self.object.sort_key())

    def __iter__(self) -> Iterator[Term]:
        return iter((self.subject, self.predicate, self.object))

    def __str__(self) -> str:
        return f"{self.subject} {self.predicate} {self.object}"


class Dataset:
    """An immutable set of ground triples.

    Iteration is sorted by subject, predicate and object text so that every
    rendering of a dataset is reproducible.
    """

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples = frozenset(triples)

    @property
    def triples(self) -> frozenset[Triple]:
        return self._triples

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._sorted)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __repr__(self) -> str:
        return f"Dataset({len(self)} triples)"

    @cached_property
    def _sorted(self) -> tuple[Triple, ...]:
        return tuple(sorted(self._triples, key=Triple.sort_key))

    @cached_property
    def _by_predicate(self) -> dict[Term, tuple[Triple, ...]]:
        index: dict[Term, list[Triple]] = defaultdict(list)
        for triple in self._sorted:
            index[triple.predicate].append(triple)
        return {key: tuple(value) for key, value in index.items()}

    def candidates(self, predicate: Term | None = None) -> tuple[Triple, ...]:
        """Triples that may match a pattern with the given (or any) predicate."""
        if predicate is None:
            return self._sorted
        return self._by_predicate.get(predicate, ())


def dataset_contains(dataset: Dataset, triple: Triple) -> bool:
    return triple in dataset


def parse_dataset(text: str) -> Dataset:
    """Parse the line format; duplicate lines collapse into one triple."""
    triples = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = []
        try:
            tokens = list(tokenize(raw))
        except ParseError as exc:
            raise ParseError(exc.message, number, exc.column) from None
        for token in tokens:
            if token.kind == "eof":
                break
            if token.kind == "literal":
                body = token.text[1:-1]
                if not body:
                    raise ParseError("empty literal", number, token.column)
                fields.append(literal(body))
            elif token.kind == "bare":
                fields.append(iri(token.text))
            else:
                raise ParseError(f"unexpected token {token.text!r}", number, token.column)
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, found {len(fields)}", number)
        subject, predicate, obj = fields
        if subject.is_literal:
            raise ParseError(f"literal {subject} in subject position", number)
        if predicate.is_literal:
            raise ParseError(f"literal {predicate} in predicate position", number)
        triples.append(Triple(subject, predicate, obj))
    return Dataset(triples)


def serialize_dataset(dataset: Dataset) -> str:
    return "".join(f"{triple}\n" for triple in dataset)
