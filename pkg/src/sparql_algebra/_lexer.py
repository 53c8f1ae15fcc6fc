from __future__ import annotations

import re
from typing import Iterator, NamedTuple

from .errors import ParseError

BARE_CHARS = r"A-Za-z0-9_.:/@#\-"
BARE_RE = re.compile(rf"[{BARE_CHARS}]+")
VAR_NAME_RE = re.compile(r"[A-Za-z0-9_]+")

_TOKEN_RE = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<literal>"[^"\n]*")
  | (?P<var>\?[A-Za-z0-9_]+)
  | (?P<bare>[{BARE_CHARS}]+)
  | (?P<punct>\|\||&&|[()=!])
    """,
    re.VERBOSE,
)


class Token(NamedTuple):
    kind: str  # literal | var | bare | punct | eof
    text: str
    line: int
    column: int


def tokenize(text: str) -> Iterator[Token]:
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == "ws":
            chunk = match.group()
            newlines = chunk.count("\n")
            if newlines:
                line += newlines
                line_start = pos + chunk.rindex("\n") + 1
        else:
            yield Token(kind, match.group(), line, pos - line_start + 1)
        pos = match.end()
    yield Token("eof", "", line, pos - line_start + 1)
