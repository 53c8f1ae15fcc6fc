import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparql_algebra import (
    EMPTY_MAPPING,
    Mapping,
    UnboundVariableError,
    apply_mapping,
    compatible,
    difference,
    iri,
    join,
    left_outer_join,
    mapping,
    parse_pattern,
    union,
    var,
)
from sparql_algebra.mappings import (
    format_structured,
    format_table,
    from_structured,
    to_structured,
)

TERMS = [iri("a"), iri("b"), iri("c")]
VARS = [var("X"), var("Y"), var("Z")]

mappings_st = st.dictionaries(st.sampled_from(VARS), st.sampled_from(TERMS), max_size=3).map(Mapping)
sets_st = st.frozensets(mappings_st, max_size=6)


def naive_join(left, right):
    return frozenset(
        Mapping({**m1, **m2}) for m1 in left for m2 in right if all(m1[v] == m2[v] for v in m1 if v in m2)
    )


def naive_difference(left, right):
    return frozenset(m1 for m1 in left if not any(all(m1[v] == m2[v] for v in m1 if v in m2) for m2 in right))


def test_empty_mapping_is_compatible_with_everything():
    assert compatible(EMPTY_MAPPING, mapping(X="a"))
    assert join([EMPTY_MAPPING], [mapping(X="a")]) == {mapping(X="a")}


def test_compatibility():
    assert compatible(mapping(X="a", Y="b"), mapping(Y="b", Z="c"))
    assert not compatible(mapping(X="a"), mapping(X="b"))
    assert compatible(mapping(X="a"), mapping(Y="a"))


def test_mapping_value_semantics():
    assert mapping(X="a", Y="b") == Mapping({var("Y"): iri("b"), var("X"): iri("a")})
    assert len({mapping(X="a"), mapping(X="a")}) == 1
    assert mapping(X="a").domain == {var("X")}
    assert mapping(P='"777-3426"')[var("P")].is_literal
    with pytest.raises(TypeError):
        Mapping({"X": iri("a")})


def test_merge_and_restrict():
    merged = mapping(X="a").merge(mapping(Y="b"))
    assert merged == mapping(X="a", Y="b")
    assert merged.restrict([var("Y")]) == mapping(Y="b")
    assert merged.extends(mapping(X="a"))
    with pytest.raises(ValueError):
        mapping(X="a").merge(mapping(X="b"))


def test_operators_on_small_sets():
    left = {mapping(X="a"), mapping(X="b")}
    right = {mapping(X="a", Y="c"), mapping(Z="c")}
    assert join(left, right) == {mapping(X="a", Y="c"), mapping(X="a", Z="c"), mapping(X="b", Z="c")}
    # the Z-only mapping is compatible with everything, so nothing survives the difference
    assert difference(left, right) == frozenset()
    assert difference(left, {mapping(X="a", Y="c")}) == {mapping(X="b")}
    assert left_outer_join(left, {mapping(X="a", Y="c")}) == {mapping(X="a", Y="c"), mapping(X="b")}
    assert union(left, right) == frozenset(left) | frozenset(right)
    assert difference(left, []) == frozenset(left)
    assert join(left, []) == frozenset()


@settings(max_examples=300, deadline=None)
@given(sets_st, sets_st)
def test_join_matches_nested_loops(left, right):
    assert join(left, right) == naive_join(left, right)


@settings(max_examples=300, deadline=None)
@given(sets_st, sets_st)
def test_difference_matches_nested_loops(left, right):
    assert difference(left, right) == naive_difference(left, right)


@settings(max_examples=200, deadline=None)
@given(sets_st, sets_st, sets_st)
def test_join_laws(a, b, c):
    assert join(a, b) == join(b, a)
    assert join(join(a, b), c) == join(a, join(b, c))
    assert join(a, union(b, c)) == union(join(a, b), join(a, c))
    assert join(a, {EMPTY_MAPPING}) == a


@settings(max_examples=200, deadline=None)
@given(sets_st, sets_st)
def test_left_outer_join_splits(a, b):
    result = left_outer_join(a, b)
    assert result == join(a, b) | difference(a, b)
    assert difference(a, b) <= a


def test_apply_mapping():
    t = parse_pattern("(?X p ?Y)")
    assert str(apply_mapping(mapping(X="a", Y="b"), t)) == "a p b"
    with pytest.raises(UnboundVariableError) as info:
        apply_mapping(mapping(X="a"), t)
    assert info.value.variable == var("Y")


def test_table_rendering_is_sorted_with_blank_cells():
    rows = {mapping(A="B2", E="e2"), mapping(A="B1")}
    text = format_table(rows, [var("A"), var("E")])
    assert text == "?A\t?E\nB1\t\nB2\te2\n"
    assert format_table([], [var("A")]) == "?A\n"


def test_structured_round_trip():
    rows = {mapping(A="B2", P='"777"'), mapping(A="B1")}
    data = json.loads(format_structured(rows))
    assert data == [{"?A": "B1"}, {"?A": "B2", "?P": '"777"'}]
    assert from_structured(data) == rows
    assert to_structured(rows) == data
