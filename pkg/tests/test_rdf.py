import pytest

from sparql_algebra import (
    Dataset,
    ParseError,
    Triple,
    iri,
    literal,
    parse_dataset,
    serialize_dataset,
)
from sparql_algebra.rdf import Term, TermKind


def test_terms_compare_by_kind_and_text():
    assert iri("a") == iri("a")
    assert iri("a") != literal("a")
    assert str(literal("777-3426")) == '"777-3426"'
    assert str(iri("john@acd.edu")) == "john@acd.edu"


@pytest.mark.parametrize("text", ["", "has space", 'quo"te'])
def test_invalid_iri_rejected(text):
    with pytest.raises(ValueError):
        Term(TermKind.IRI, text)


def test_literal_cannot_be_subject_or_predicate():
    with pytest.raises(ValueError):
        Triple(literal("x"), iri("p"), iri("o"))
    with pytest.raises(ValueError):
        Triple(iri("s"), literal("x"), iri("o"))
    Triple(iri("s"), iri("p"), literal("x"))


def test_dataset_is_a_set(example_dataset):
    assert len(example_dataset) == 10
    doubled = Dataset(list(example_dataset) + list(example_dataset))
    assert doubled == example_dataset
    assert Triple(iri("B1"), iri("name"), iri("paul")) in example_dataset
    assert Triple(iri("B1"), iri("name"), iri("john")) not in example_dataset


def test_candidates_by_predicate(example_dataset):
    names = example_dataset.candidates(iri("name"))
    assert len(names) == 4
    assert example_dataset.candidates(iri("nothing")) == ()
    assert len(example_dataset.candidates()) == 10


def test_round_trip(example_dataset):
    assert parse_dataset(serialize_dataset(example_dataset)) == example_dataset


def test_comments_and_blank_lines_skipped():
    dataset = parse_dataset("# header\n\n a b c \n# end\n")
    assert list(dataset) == [Triple(iri("a"), iri("b"), iri("c"))]


@pytest.mark.parametrize(
    "text, line",
    [
        ("a b\n", 1),
        ("a b c\na b c d\n", 2),
        ('a b c\n\n"x" b c\n', 3),
        ('a b ""\n', 1),
        ("a b c\na ( c\n", 2),
    ],
)
def test_malformed_dataset_reports_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_dataset(text)
    assert info.value.line == line


def test_empty_dataset():
    assert len(parse_dataset("")) == 0
