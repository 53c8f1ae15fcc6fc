"""Partial mappings from variables to terms and the operators on sets of them.

A mapping set is an ordinary ``frozenset`` of :class:`Mapping`. The
operators accept any iterable of mappings and always return a ``frozenset``.
Joins and differences hash on the variables shared by each pair of domain
groups, so their cost does not degrade to a full nested loop when domains
overlap.
"""

from __future__ import annotations

import collections.abc
import json
from collections import defaultdict
from typing import Iterable, Iterator

from .algebra import TriplePattern, Variable
from .errors import ParseError, UnboundVariableError
from .rdf import Term, Triple, iri, literal

MappingSet = frozenset  # frozenset[Mapping]


class Mapping(collections.abc.Mapping):
    """An immutable partial function from :class:`Variable` to :class:`Term`.

    Absence from the domain is the only way to be unbound; there is no null.
    """

    __slots__ = ("_data", "_items", "_hash")

    def __init__(self, bindings=()):
        data = dict(bindings)
        for key, value in data.items():
            if not isinstance(key, Variable) or not isinstance(value, Term):
                raise TypeError(f"mappings bind variables to terms, got {key!r} -> {value!r}")
        self._data = data
        self._items = frozenset(data.items())
        self._hash = hash(self._items)

    @classmethod
    def _trusted(cls, data: dict) -> "Mapping":
        self = cls.__new__(cls)
        self._data = data
        self._items = frozenset(data.items())
        self._hash = hash(self._items)
        return self

    def __getitem__(self, variable: Variable) -> Term:
        return self._data[variable]

    def __iter__(self) -> Iterator[Variable]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __contains__(self, variable: object) -> bool:
        return variable in self._data

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Mapping):
            return self._hash == other._hash and self._items == other._items
        return NotImplemented

    def __repr__(self) -> str:
        return "Mapping({" + ", ".join(f"{k}: {v}" for k, v in self.sorted_items()) + "})"

    __str__ = __repr__

    @property
    def domain(self) -> frozenset[Variable]:
        return frozenset(self._data)

    def sorted_items(self) -> list[tuple[Variable, Term]]:
        return sorted(self._data.items(), key=lambda item: item[0].name)

    def sort_key(self):
        return tuple((v.name, t.sort_key()) for v, t in self.sorted_items())

    def compatible(self, other: "Mapping") -> bool:
        return compatible(self, other)

    def merge(self, other: "Mapping") -> "Mapping":
        """The union of two compatible mappings."""
        if not compatible(self, other):
            raise ValueError(f"{self} and {other} are not compatible")
        return Mapping._trusted({**self._data, **other._data})

    def restrict(self, variables: Iterable[Variable]) -> "Mapping":
        return Mapping._trusted({v: self._data[v] for v in variables if v in self._data})

    def extends(self, other: "Mapping") -> bool:
        """True when ``other`` is a sub-function of this mapping."""
        return other._items <= self._items


EMPTY_MAPPING = Mapping()


def mapping(**bindings: Term | str) -> Mapping:
    """Shorthand: ``mapping(A=iri("B1"), P='"777-3426"')``.

    String values are parsed as a bare IRI or a quoted literal.
    """
    return Mapping({Variable(name): _as_term(value) for name, value in bindings.items()})


def _as_term(value: Term | str) -> Term:
    if isinstance(value, Term):
        return value
    if len(value) >= 2 and value.startswith('"') and value.endswith('"'):
        return literal(value[1:-1])
    return iri(value)


def compatible(first: Mapping, second: Mapping) -> bool:
    if len(second) < len(first):
        first, second = second, first
    data = second._data
    for variable, value in first._data.items():
        other = data.get(variable)
        if other is not None and other != value:
            return False
    return True


def _by_domain(mappings: Iterable[Mapping]) -> dict[frozenset, list[Mapping]]:
    groups: dict[frozenset, list[Mapping]] = defaultdict(list)
    for m in mappings:
        groups[frozenset(m._data)].append(m)
    return groups


def _index(group: list[Mapping], shared: tuple[Variable, ...]) -> dict[tuple, list[Mapping]]:
    index: dict[tuple, list[Mapping]] = defaultdict(list)
    for m in group:
        index[tuple(m._data[v] for v in shared)].append(m)
    return index


def join(left: Iterable[Mapping], right: Iterable[Mapping]) -> frozenset[Mapping]:
    """``{m1 ∪ m2 | m1 ∈ left, m2 ∈ right, m1 and m2 compatible}``."""
    left_groups = _by_domain(left)
    right_groups = _by_domain(right)
    result = set()
    for left_domain, left_group in left_groups.items():
        for right_domain, right_group in right_groups.items():
            shared = tuple(left_domain & right_domain)
            if not shared:
                for m1 in left_group:
                    for m2 in right_group:
                        result.add(Mapping._trusted({**m1._data, **m2._data}))
                continue
            index = _index(right_group, shared)
            for m1 in left_group:
                for m2 in index.get(tuple(m1._data[v] for v in shared), ()):
                    result.add(Mapping._trusted({**m1._data, **m2._data}))
    return frozenset(result)


def union(left: Iterable[Mapping], right: Iterable[Mapping]) -> frozenset[Mapping]:
    return frozenset(left) | frozenset(right)


def difference(left: Iterable[Mapping], right: Iterable[Mapping]) -> frozenset[Mapping]:
    """Members of ``left`` compatible with no member of ``right``."""
    right_groups = _by_domain(right)
    if not right_groups:
        return frozenset(left)
    result = set()
    indexes: dict[tuple, dict] = {}
    for left_domain, left_group in _by_domain(left).items():
        probes = []
        for right_domain, right_group in right_groups.items():
            shared = tuple(left_domain & right_domain)
            if not shared:
                # any right member is compatible with every left member
                break
            key = (right_domain, shared)
            if key not in indexes:
                indexes[key] = _index(right_group, shared)
            probes.append((shared, indexes[key]))
        else:
            for m1 in left_group:
                if not any(tuple(m1._data[v] for v in shared) in index for shared, index in probes):
                    result.add(m1)
    return frozenset(result)


def left_outer_join(left: Iterable[Mapping], right: Iterable[Mapping]) -> frozenset[Mapping]:
    left = frozenset(left)
    right = frozenset(right)
    return join(left, right) | difference(left, right)


def apply_mapping(m: Mapping, pattern: TriplePattern) -> Triple:
    """Replace every variable of ``pattern`` by its binding in ``m``."""
    terms = []
    for position in pattern:
        if isinstance(position, Variable):
            try:
                position = m[position]
            except KeyError:
                raise UnboundVariableError(position) from None
        terms.append(position)
    return Triple(*terms)


# --------------------------------------------------------------------------
# Rendering


def sort_mappings(mappings: Iterable[Mapping]) -> list[Mapping]:
    return sorted(mappings, key=Mapping.sort_key)


def table_rows(mappings: Iterable[Mapping], variables: Iterable[Variable] | None = None):
    """Header and body of the mapping table; empty cells mark unbound variables."""
    mappings = list(mappings)
    if variables is None:
        variables = {v for m in mappings for v in m}
    header = sorted(set(variables), key=lambda v: v.name)
    extra = {v for m in mappings for v in m} - set(header)
    if extra:
        header = sorted(set(header) | extra, key=lambda v: v.name)
    rows = sorted(tuple(str(m[v]) if v in m else "" for v in header) for m in mappings)
    return [str(v) for v in header], rows


def format_table(mappings: Iterable[Mapping], variables: Iterable[Variable] | None = None) -> str:
    """Tab-separated table: a header of sorted variables, then sorted rows."""
    header, rows = table_rows(mappings, variables)
    lines = ["\t".join(header)] + ["\t".join(row) for row in rows]
    return "\n".join(lines) + "\n"


def to_structured(mappings: Iterable[Mapping]) -> list[dict[str, str]]:
    """A list of ``{"?var": "term"}`` objects, terms in their textual form."""
    return [{str(v): str(t) for v, t in m.sorted_items()} for m in sort_mappings(mappings)]


def from_structured(data: list[dict[str, str]]) -> frozenset[Mapping]:
    result = set()
    for row in data:
        bindings = {}
        for name, text in row.items():
            if not name.startswith("?"):
                raise ParseError(f"variable names start with '?': {name!r}")
            bindings[Variable(name[1:])] = _as_term(text)
        result.add(Mapping(bindings))
    return frozenset(result)


def format_structured(mappings: Iterable[Mapping]) -> str:
    return json.dumps(to_structured(mappings), indent=2, ensure_ascii=False) + "\n"
