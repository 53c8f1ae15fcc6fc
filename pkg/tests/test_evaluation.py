import pytest

from sparql_algebra import (
    Dataset,
    DomainMismatchError,
    ScopeError,
    UnsupportedPatternError,
    eval_compositional,
    eval_depth_first,
    mapping,
    membership,
    membership_fast,
    parse_condition,
    parse_pattern,
    satisfies,
)
from sparql_algebra.evaluation import eval_depth_first_from, eval_triple
from sparql_algebra.mappings import EMPTY_MAPPING, join
from sparql_algebra.rdf import Triple, iri

from .conftest import AND_THEN_OPT, NESTED_OPT, OPT_THEN_AND


def test_triple_with_repeated_variable():
    dataset = Dataset([Triple(iri("a"), iri("p"), iri("a")), Triple(iri("a"), iri("p"), iri("b"))])
    assert eval_triple(dataset, parse_pattern("(?X p ?X)")) == {mapping(X="a")}
    assert eval_triple(dataset, parse_pattern("(?X ?P b)")) == {mapping(X="a", P="p")}
    assert eval_triple(dataset, parse_pattern("(a p b)")) == {EMPTY_MAPPING}
    assert eval_triple(dataset, parse_pattern("(a p c)")) == frozenset()


def test_p3_george_row_has_no_webpage(example_dataset, example_patterns):
    result = eval_compositional(example_dataset, example_patterns["P3"])
    assert mapping(A="B3", N="george") in result
    assert len(result) == 4


@pytest.mark.parametrize(
    "condition, expected",
    [
        ("bound(?X)", True),
        ("bound(?Z)", False),
        ("?X = a", True),
        ("?Z = a", False),
        ("?X = ?Y", False),
        ("?X = ?Z", False),
        ("(! ?Z = a)", True),
        ("(?X = a || ?Z = a)", True),
        ("(?X = a && ?Y = a)", False),
    ],
)
def test_satisfaction_is_two_valued(condition, expected):
    assert satisfies(mapping(X="a", Y="b"), parse_condition(condition)) is expected


def test_examples_of_divergence(example_dataset):
    nested = parse_pattern(NESTED_OPT)
    assert eval_compositional(example_dataset, nested) == {mapping(X="B1")}
    assert eval_depth_first(example_dataset, nested) == {mapping(X="B1", Y="B3")}
    assert eval_depth_first(example_dataset, parse_pattern(AND_THEN_OPT)) == {mapping(X="B1", Y="B3")}
    assert eval_depth_first(example_dataset, parse_pattern(OPT_THEN_AND)) == frozenset()


@pytest.mark.parametrize("name", ["P1", "P2", "P3", "P5"])
def test_semantics_agree_on_well_designed_examples(example_dataset, example_patterns, name):
    pattern = example_patterns[name]
    assert eval_depth_first(example_dataset, pattern) == eval_compositional(example_dataset, pattern)


def test_depth_first_rejects_union_unless_asked(example_dataset, example_patterns):
    p4 = example_patterns["P4"]
    with pytest.raises(UnsupportedPatternError):
        eval_depth_first(example_dataset, p4)
    assert eval_depth_first(example_dataset, p4, allow_union=True) == eval_compositional(example_dataset, p4)
    with pytest.raises(UnsupportedPatternError):
        eval_depth_first_from(example_dataset, p4, [EMPTY_MAPPING])


def test_scope_is_validated(example_dataset):
    bad = parse_pattern("((?A name ?N) FILTER bound(?Z))")
    with pytest.raises(ScopeError):
        eval_compositional(example_dataset, bad)
    with pytest.raises(ScopeError):
        eval_depth_first(example_dataset, bad)
    assert eval_compositional(example_dataset, bad, validate=False) == frozenset()


def test_trace_records_every_call(example_dataset, example_patterns):
    calls = []
    eval_depth_first(example_dataset, example_patterns["P2"], trace=lambda p, o, r: calls.append((p, o, r)))
    assert len(calls) == 5
    for sub, omega, result in calls:
        assert result == join(omega, eval_compositional(example_dataset, sub))


def test_depth_first_from_empty_set_is_empty(example_dataset, example_patterns):
    assert eval_depth_first_from(example_dataset, example_patterns["P1"], []) == frozenset()


def test_empty_dataset():
    pattern = parse_pattern("((?X p ?Y) OPT (?Y q ?Z))")
    assert eval_compositional(Dataset(), pattern) == frozenset()
    assert eval_depth_first(Dataset(), pattern) == frozenset()


def test_membership(example_dataset, example_patterns):
    p2 = example_patterns["P2"]
    assert membership(example_dataset, p2, mapping(A="B1", N="paul"))
    assert not membership(example_dataset, p2, mapping(A="B2", N="john"))
    assert not membership(example_dataset, p2, mapping(A="B1", N="paul", Q="x"))


def test_membership_fast(example_dataset):
    pattern = parse_pattern('(((?A name ?N) AND (?A phone ?P)) FILTER (! ?P = "888-4537"))')
    assert membership_fast(example_dataset, pattern, mapping(A="B1", N="paul", P='"777-3426"'))
    assert not membership_fast(example_dataset, pattern, mapping(A="B4", N="ringo", P='"888-4537"'))
    assert not membership_fast(example_dataset, pattern, mapping(A="B1", N="john", P='"777-3426"'))
    with pytest.raises(DomainMismatchError):
        membership_fast(example_dataset, pattern, mapping(A="B1"))
    with pytest.raises(UnsupportedPatternError):
        membership_fast(example_dataset, parse_pattern("((?A name ?N) OPT (?A phone ?P))"), mapping(A="B1", N="paul"))


def _deep_chain(depth: int, operator: str) -> str:
    text = "(?X name ?N)"
    for _ in range(depth):
        text = f"({text} {operator} (?X name ?N))"
    return text


@pytest.mark.parametrize("operator", ["AND", "OPT"])
def test_ten_thousand_levels(example_dataset, operator):
    pattern = parse_pattern(_deep_chain(10_000, operator))
    expected = eval_compositional(example_dataset, parse_pattern("(?X name ?N)"))
    assert eval_compositional(example_dataset, pattern) == expected
    assert eval_depth_first(example_dataset, pattern) == expected


def test_deep_right_nested_filters(example_dataset):
    text = "(?X name ?N)"
    for _ in range(10_000):
        text = f"({text} FILTER bound(?X))"
    pattern = parse_pattern(text)
    assert len(eval_compositional(example_dataset, pattern)) == 4
    assert len(eval_depth_first(example_dataset, pattern)) == 4
