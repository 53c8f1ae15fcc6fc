import io
import json
import random

import pytest

from sparql_algebra import (
    mapping,
    parse_dataset,
    parse_pattern,
    serialize_dataset,
    serialize_pattern,
)
from sparql_algebra.cli import CliConfig, main, run
from sparql_algebra.evaluation import membership
from sparql_algebra.generators import random_dataset, random_well_designed

from .conftest import DATA, EXAMPLE_PATTERNS, NESTED_OPT

EXAMPLE = DATA / "people.txt"


@pytest.fixture
def pattern_file(tmp_path):
    def write(text, name="pattern.txt"):
        path = tmp_path / name
        path.write_text(text + "\n")
        return str(path)

    return write


def cli(capsys, *argv):
    status = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def test_eval_p1_table(capsys, pattern_file):
    status, out, _ = cli(capsys, "eval", "-p", pattern_file(EXAMPLE_PATTERNS["P1"]), "-d", EXAMPLE)
    assert status == 0
    rows = [line for line in out.splitlines() if "B" in line]
    assert len(rows) == 2


def test_eval_depth_first_nested_opt(capsys, pattern_file):
    status, out, _ = cli(
        capsys, "eval", "--semantics", "depthfirst", "--format", "structured", "-p", pattern_file(NESTED_OPT), "-d", EXAMPLE
    )
    assert status == 0
    assert json.loads(out) == [{"?X": "B1", "?Y": "B3"}]


def test_eval_empty_dataset(capsys, pattern_file, tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    status, out, _ = cli(capsys, "eval", "--format", "structured", "-p", pattern_file("(?X p ?Y)"), "-d", empty)
    assert status == 0 and json.loads(out) == []


def test_eval_errors(capsys, pattern_file, tmp_path):
    status, _, err = cli(capsys, "eval", "-p", pattern_file("((?X p ?Y)"), "-d", EXAMPLE)
    assert status == 2 and "error:" in err
    status, _, err = cli(capsys, "eval", "-p", pattern_file("((?X p ?Y) FILTER bound(?Z))"), "-d", EXAMPLE)
    assert status == 2
    status, _, err = cli(capsys, "eval", "-p", pattern_file("(?X p ?Y)"), "-d", tmp_path / "missing.txt")
    assert status == 2 and "cannot read" in err
    p4 = pattern_file(EXAMPLE_PATTERNS["P4"])
    status, _, _ = cli(capsys, "eval", "--semantics", "depthfirst", "-p", p4, "-d", EXAMPLE)
    assert status == 3
    status, _, _ = cli(capsys, "eval", "--semantics", "depthfirst", "--allow-union-in-df", "-p", p4, "-d", EXAMPLE)
    assert status == 0


def test_diff_nested_opt(capsys, pattern_file):
    status, out, _ = cli(capsys, "diff", "-p", pattern_file(NESTED_OPT), "-d", EXAMPLE)
    assert status == 1
    lines = out.splitlines()
    assert lines[0] == "well designed: no"
    assert "DIFFERENT" in lines
    only_df = lines[lines.index("only in depth-first:") + 1]
    assert only_df.strip() == "{?X -> B1, ?Y -> B3}"


@pytest.mark.parametrize("text", [EXAMPLE_PATTERNS["P2"], "(?A name ?N)"])
def test_diff_equal(capsys, pattern_file, text):
    status, out, _ = cli(capsys, "diff", "-p", pattern_file(text), "-d", EXAMPLE)
    assert status == 0
    assert out.splitlines() == ["well designed: yes", "EQUAL"]


def test_check(capsys, pattern_file):
    status, out, _ = cli(capsys, "check", "-p", pattern_file(NESTED_OPT))
    assert status == 0
    assert "well designed: no" in out and "?X" in out


def test_normalize_union(capsys, pattern_file):
    status, out, _ = cli(capsys, "normalize", "--union", "-p", pattern_file(EXAMPLE_PATTERNS["P4"]))
    assert status == 0
    assert out.splitlines() == ["((?A name ?N) AND (?A email ?E))", "((?A name ?N) AND (?A webPage ?W))"]


def test_normalize_opt(capsys, pattern_file):
    text = '(((?X name ?Y) OPT (?X email ?E)) AND (?X phone "888-4537"))'
    status, out, _ = cli(capsys, "normalize", "--opt", "-p", pattern_file(text))
    assert status == 0
    assert out.strip() == '(((?X name ?Y) AND (?X phone "888-4537")) OPT (?X email ?E))'
    status, out, err = cli(capsys, "normalize", "--form", "opt", "-p", pattern_file(NESTED_OPT))
    assert status == 4 and "?X" in err and out == ""


def test_normalize_filter(capsys, pattern_file):
    text = "(((?X p ?Y) FILTER ?X = a) FILTER (?Y = b || ?Y = c))"
    status, out, _ = cli(capsys, "normalize", "--filter", "-p", pattern_file(text))
    assert out.strip() == "((?X p ?Y) FILTER (?X = a && (?Y = b || ?Y = c)))"
    text = "((?X p ?Y) FILTER (?Y = b || ?Y = c))"
    status, out, _ = cli(capsys, "normalize", "--filter", "--split-or", "-p", pattern_file(text))
    assert out.strip() == "(((?X p ?Y) FILTER ?Y = b) UNION ((?X p ?Y) FILTER ?Y = c))"


def test_output_is_deterministic(pattern_file):
    cfg = CliConfig("eval", dataset_path=EXAMPLE, pattern_path=pattern_file(EXAMPLE_PATTERNS["P2"]))
    outputs = set()
    for _ in range(3):
        buffer = io.StringIO()
        assert run(cfg, buffer) == 0
        outputs.add(buffer.getvalue())
    assert len(outputs) == 1


def _read_reduction(directory):
    dataset = parse_dataset((directory / "dataset.txt").read_text())
    pattern = parse_pattern((directory / "pattern.txt").read_text())
    (row,) = json.loads((directory / "mapping.json").read_text())
    target = mapping(**{name.lstrip("?"): value for name, value in row.items()})
    return dataset, pattern, target


def test_reduce_cnf_files(capsys, tmp_path):
    source = tmp_path / "f.cnf"
    source.write_text("p cnf 2 2\n1 -2 0\n2 -1 0\n")
    status, out, _ = cli(capsys, "reduce", source, "-o", tmp_path / "out")
    assert status == 0 and "oracle: satisfiable" in out
    dataset, pattern, target = _read_reduction(tmp_path / "out")
    assert membership(dataset, pattern, target)
    assert len(target) == 4


def test_reduce_qbf_files(capsys, tmp_path):
    source = tmp_path / "f.qdimacs"
    source.write_text("b 1\np cnf 2 1\n1 0\n")
    status, out, _ = cli(capsys, "reduce", source, "-o", tmp_path / "out")
    assert status == 0 and "oracle: invalid" in out
    dataset, pattern, target = _read_reduction(tmp_path / "out")
    assert not membership(dataset, pattern, target)


def test_reduce_random_is_seeded(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SPARQL_ALGEBRA_SEED", "11")
    cli(capsys, "reduce", "--random", "qbf", "-o", tmp_path / "a")
    cli(capsys, "reduce", "--random", "qbf", "-o", tmp_path / "b")
    for name in ("formula.dimacs", "pattern.txt", "dataset.txt", "mapping.json"):
        assert (tmp_path / "a" / name).read_text() == (tmp_path / "b" / name).read_text()


def test_reduce_errors(capsys, tmp_path):
    source = tmp_path / "bad.cnf"
    source.write_text("p cnf 2 1\n1 2\n")
    status, _, err = cli(capsys, "reduce", source, "-o", tmp_path / "out")
    assert status == 2 and "not terminated" in err
    source.write_text("p cnf 30 1\n30 0\n")
    status, _, _ = cli(capsys, "reduce", source, "-o", tmp_path / "out")
    assert status == 3


@pytest.mark.parametrize("seed", range(20))
def test_diff_is_equal_on_well_designed_inputs(tmp_path, seed):
    rng = random.Random(seed)
    pattern = tmp_path / "p.txt"
    dataset = tmp_path / "d.txt"
    pattern.write_text(serialize_pattern(random_well_designed(rng, 4, filters=True)))
    dataset.write_text(serialize_dataset(random_dataset(rng, 20)))
    cfg = CliConfig("diff", dataset_path=dataset, pattern_path=pattern)
    buffer = io.StringIO()
    assert run(cfg, buffer) == 0, buffer.getvalue()
    assert buffer.getvalue().splitlines() == ["well designed: yes", "EQUAL"]
