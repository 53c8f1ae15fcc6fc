"""Command-line front end.

Exit status: 0 success (or EQUAL for ``diff``), 1 the two semantics differ,
2 parse or validation error, 3 operation unsupported for the pattern,
4 precondition of a normal form not met.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

from .algebra import (
    GraphPattern,
    is_union_free,
    parse_pattern,
    serialize_pattern,
    validate_filter_scope,
    vars_of_pattern,
)
from .errors import (
    CapExceededError,
    NotWellDesignedError,
    ParseError,
    ScopeError,
    UnsupportedPatternError,
)
from .evaluation import eval_compositional, eval_depth_first
from .generators import random_cnf, random_qbf
from .mappings import Mapping, format_structured, format_table, sort_mappings
from .rdf import Dataset, parse_dataset, serialize_dataset
from .reductions import (
    CnfFormula,
    brute_force_qbf,
    brute_force_sat,
    format_dimacs,
    parse_dimacs,
    reduce_qbf,
    reduce_sat_cnf,
)
from .rewriting import (
    apply_filter_rewrites,
    is_well_designed,
    to_opt_normal_form,
    to_union_normal_form,
)

EXIT_OK, EXIT_DIFFERENT, EXIT_INVALID, EXIT_UNSUPPORTED, EXIT_PRECONDITION = range(5)
SEED_ENV = "SPARQL_ALGEBRA_SEED"


@dataclass
class CliConfig:
    command: str
    dataset_path: Path | None = None
    pattern_path: Path | None = None
    semantics: str = "compositional"
    normal_form: str = "union"
    output_format: str = "table"
    allow_union_in_df: bool = False
    split_or: bool = False
    strategy: str = "outermost"
    input_path: Path | None = None
    random_kind: str | None = None
    out_dir: Path | None = None


class _Failure(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


def _read(path: Path | None, what: str) -> str:
    if path is None:
        raise _Failure(EXIT_INVALID, f"missing {what} file")
    if str(path) == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise _Failure(EXIT_INVALID, f"cannot read {what} {path}: {error.strerror}") from None


def _load_pattern(cfg: CliConfig) -> GraphPattern:
    try:
        return parse_pattern(_read(cfg.pattern_path, "pattern"))
    except ParseError as error:
        raise _Failure(EXIT_INVALID, f"{cfg.pattern_path}: {error}") from None


def _load_dataset(cfg: CliConfig) -> Dataset:
    try:
        return parse_dataset(_read(cfg.dataset_path, "dataset"))
    except ParseError as error:
        raise _Failure(EXIT_INVALID, f"{cfg.dataset_path}: {error}") from None


def _render(mappings, pattern: GraphPattern, output_format: str) -> str:
    if output_format == "structured":
        return format_structured(mappings)
    return format_table(mappings, vars_of_pattern(pattern))


def _evaluate(dataset: Dataset, pattern: GraphPattern, semantics: str, allow_union: bool):
    try:
        if semantics == "depthfirst":
            return eval_depth_first(dataset, pattern, allow_union=allow_union)
        return eval_compositional(dataset, pattern)
    except ScopeError as error:
        raise _Failure(EXIT_INVALID, str(error)) from None
    except UnsupportedPatternError as error:
        raise _Failure(EXIT_UNSUPPORTED, str(error)) from None


def run_eval(cfg: CliConfig, out: TextIO) -> int:
    pattern = _load_pattern(cfg)
    dataset = _load_dataset(cfg)
    result = _evaluate(dataset, pattern, cfg.semantics, cfg.allow_union_in_df)
    out.write(_render(result, pattern, cfg.output_format))
    return EXIT_OK


def _well_designed_line(pattern: GraphPattern) -> str:
    if not is_union_free(pattern):
        return "well designed: undefined (pattern contains UNION)"
    return str(is_well_designed(pattern))


def _format_mapping(m: Mapping) -> str:
    return "{" + ", ".join(f"{v} -> {t}" for v, t in m.sorted_items()) + "}"


def run_diff(cfg: CliConfig, out: TextIO) -> int:
    pattern = _load_pattern(cfg)
    dataset = _load_dataset(cfg)
    compositional = _evaluate(dataset, pattern, "compositional", False)
    depth_first = _evaluate(dataset, pattern, "depthfirst", cfg.allow_union_in_df)
    out.write(_well_designed_line(pattern) + "\n")
    if compositional == depth_first:
        out.write("EQUAL\n")
        return EXIT_OK
    out.write("DIFFERENT\n")
    for label, mine, theirs in (
        ("only in compositional", compositional, depth_first),
        ("only in depth-first", depth_first, compositional),
    ):
        out.write(f"{label}:\n")
        for m in sort_mappings(mine - theirs):
            out.write(f"  {_format_mapping(m)}\n")
    return EXIT_DIFFERENT


def run_check(cfg: CliConfig, out: TextIO) -> int:
    pattern = _load_pattern(cfg)
    out.write(str(validate_filter_scope(pattern)) + "\n")
    out.write(_well_designed_line(pattern) + "\n")
    return EXIT_OK


def run_normalize(cfg: CliConfig, out: TextIO) -> int:
    pattern = _load_pattern(cfg)
    try:
        if cfg.normal_form == "union":
            for branch in to_union_normal_form(pattern):
                out.write(serialize_pattern(branch) + "\n")
        elif cfg.normal_form == "opt":
            out.write(str(to_opt_normal_form(pattern, cfg.strategy)) + "\n")
        else:
            out.write(serialize_pattern(apply_filter_rewrites(pattern, split_or=cfg.split_or)) + "\n")
    except ScopeError as error:
        raise _Failure(EXIT_INVALID, str(error)) from None
    except (NotWellDesignedError, UnsupportedPatternError) as error:
        raise _Failure(EXIT_PRECONDITION, f"precondition failed\n{error}") from None
    return EXIT_OK


def run_reduce(cfg: CliConfig, out: TextIO) -> int:
    if cfg.random_kind is not None:
        seed = os.environ.get(SEED_ENV, "0")
        rng = random.Random(seed)
        formula = random_cnf(rng) if cfg.random_kind == "cnf" else random_qbf(rng)
    else:
        try:
            formula = parse_dimacs(_read(cfg.input_path, "DIMACS input"))
        except ParseError as error:
            raise _Failure(EXIT_INVALID, f"{cfg.input_path}: {error}") from None
    try:
        if isinstance(formula, CnfFormula):
            reduction, verdict = reduce_sat_cnf(formula), ("satisfiable" if brute_force_sat(formula) else "unsatisfiable")
        else:
            reduction, verdict = reduce_qbf(formula), ("valid" if brute_force_qbf(formula) else "invalid")
    except CapExceededError as error:
        raise _Failure(EXIT_UNSUPPORTED, f"oracle refused the formula: {error}") from None
    target = Path(cfg.out_dir or ".")
    target.mkdir(parents=True, exist_ok=True)
    files = {
        "formula.dimacs": format_dimacs(formula),
        "dataset.txt": serialize_dataset(reduction.dataset),
        "pattern.txt": serialize_pattern(reduction.pattern) + "\n",
        "mapping.json": format_structured([reduction.mapping]),
    }
    for name, text in files.items():
        (target / name).write_text(text, encoding="utf-8")
        out.write(f"wrote {target / name}\n")
    out.write(f"formula: {formula}\n")
    out.write(f"oracle: {verdict}\n")
    return EXIT_OK


COMMANDS = {"eval": run_eval, "diff": run_diff, "check": run_check, "normalize": run_normalize, "reduce": run_reduce}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparql-algebra", description="Evaluate, analyse and rewrite graph patterns.")
    sub = parser.add_subparsers(dest="command", required=True)

    def inputs(p, dataset=True):
        p.add_argument("-p", "--pattern", type=Path, required=True, help="pattern file ('-' for stdin)")
        if dataset:
            p.add_argument("-d", "--dataset", type=Path, required=True, help="dataset file, one triple per line")

    p = sub.add_parser("eval", help="evaluate a pattern over a dataset")
    inputs(p)
    p.add_argument("--semantics", choices=("compositional", "depthfirst"), default="compositional")
    p.add_argument("--format", choices=("table", "structured"), default="table", dest="output_format")
    p.add_argument("--allow-union-in-df", action="store_true", help="depth-first over the UNION normal form")

    p = sub.add_parser("diff", help="compare the compositional and depth-first answers")
    inputs(p)
    p.add_argument("--allow-union-in-df", action="store_true")

    p = sub.add_parser("check", help="report filter scope and well-designedness")
    inputs(p, dataset=False)

    p = sub.add_parser("normalize", help="print a normal form of the pattern")
    inputs(p, dataset=False)
    form = p.add_mutually_exclusive_group()
    form.add_argument("--form", choices=("union", "opt", "filter"), default="union", dest="normal_form")
    for name in ("union", "opt", "filter"):
        form.add_argument(f"--{name}", action="store_const", const=name, dest="normal_form", help=f"same as --form {name}")
    p.add_argument("--split-or", action="store_true", help="also split disjunctive filters into UNIONs")
    p.add_argument("--strategy", choices=("outermost", "innermost"), default="outermost")

    p = sub.add_parser("reduce", help="encode a CNF or QBF formula as pattern membership")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("input_path", nargs="?", type=Path, help="DIMACS file ('b <m>' line for QBF)")
    source.add_argument("--random", choices=("cnf", "qbf"), dest="random_kind", help=f"random formula seeded by ${SEED_ENV}")
    p.add_argument("-o", "--out-dir", type=Path, default=Path("."))
    return parser


def config_from_args(args: argparse.Namespace) -> CliConfig:
    values = vars(args)
    return CliConfig(
        command=args.command,
        dataset_path=values.get("dataset"),
        pattern_path=values.get("pattern"),
        semantics=values.get("semantics", "compositional"),
        normal_form=values.get("normal_form", "union"),
        output_format=values.get("output_format", "table"),
        allow_union_in_df=values.get("allow_union_in_df", False),
        split_or=values.get("split_or", False),
        strategy=values.get("strategy", "outermost"),
        input_path=values.get("input_path"),
        random_kind=values.get("random_kind"),
        out_dir=values.get("out_dir"),
    )


def run(cfg: CliConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        return COMMANDS[cfg.command](cfg, out)
    except _Failure as failure:
        err.write(f"error: {failure}\n")
        return failure.status


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
