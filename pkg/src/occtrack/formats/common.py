"""Shared helpers for the line-oriented text formats."""
from __future__ import annotations

import math


class MalformedLine(ValueError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


def format_float(x: float) -> str:
    """Shortest text that parses back to the same double.

    Integral values drop the trailing ``.0`` (``3.0`` -> ``3``) so that
    integer-looking columns stay integer-looking.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    r = repr(x)
    if r.endswith(".0"):
        r = r[:-2]
    return r


def parse_float(tok: str, line_no: int, name: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise MalformedLine(line_no, f"{name}: not a number: {tok!r}") from None
    if not math.isfinite(v):
        raise MalformedLine(line_no, f"{name}: non-finite value {tok!r}")
    return v


def parse_int(tok: str, line_no: int, name: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise MalformedLine(line_no, f"{name}: not an integer: {tok!r}") from None


def split_lines(text: str):
    """Yield ``(line_no, line)`` for each record line.

    A single trailing newline is allowed; any other empty line is an error
    because silently skipping it would break byte-exact round trips.
    """
    if not text:
        return
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            raise MalformedLine(i, "empty line")
        yield i, line
