"""Helpers for the line-oriented text artifacts.

All serialized artifacts share the same shape: a `<kind> <version>`
header line followed by whitespace-separated directive lines. Readers
skip blank and comment lines and report one-based line numbers.
"""

from __future__ import annotations

from typing import Sequence

from .errors import ParseError


class LineReader:
    """Sequential reader over the meaningful lines of a text artifact."""

    def __init__(self, text: str):
        self._lines = text.splitlines()
        self._index = 0
        self._skip()

    def _skip(self) -> None:
        while self._index < len(self._lines):
            stripped = self._lines[self._index].strip()
            if stripped and not stripped.startswith("#"):
                break
            self._index += 1

    @property
    def at_end(self) -> bool:
        return self._index >= len(self._lines)

    @property
    def line_no(self) -> int:
        return min(self._index, len(self._lines) - 1) + 1

    def peek(self) -> str | None:
        if self.at_end:
            return None
        return self._lines[self._index].strip()

    def take(self) -> tuple[int, list[str]]:
        """Consume the next meaningful line as (line number, tokens)."""
        if self.at_end:
            raise ParseError("unexpected end of input", len(self._lines) + 1)
        no = self._index + 1
        tokens = self._lines[self._index].split()
        self._index += 1
        self._skip()
        return no, tokens

    def error(self, message: str, line: int | None = None) -> ParseError:
        return ParseError(message, self.line_no if line is None else line)


def expect_header(reader: LineReader, kind: str, version: str) -> None:
    no, tokens = reader.take()
    if len(tokens) != 2 or tokens[0] != kind:
        raise ParseError(f"expected '{kind} <version>' header", no)
    if tokens[1] != version:
        raise ParseError(f"unsupported {kind} version {tokens[1]!r}", no)


def parse_kv(tokens: Sequence[str], keys: Sequence[str], line: int) -> dict[str, str]:
    """Parse `key=value` tokens; exactly the given keys, in any order."""
    out: dict[str, str] = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or not value:
            raise ParseError(f"expected key=value, got {token!r}", line)
        if key not in keys:
            raise ParseError(f"unknown field {key!r}", line)
        if key in out:
            raise ParseError(f"duplicate field {key!r}", line)
        out[key] = value
    for key in keys:
        if key not in out:
            raise ParseError(f"missing field {key!r}", line)
    return out


def parse_int(value: str, what: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"bad integer for {what}: {value!r}", line) from None


def parse_float(value: str, what: str, line: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"bad number for {what}: {value!r}", line) from None
