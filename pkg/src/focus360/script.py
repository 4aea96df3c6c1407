"""Attention-script parsing and CSV interchange.

A roadmap is a plain-text timeline, one interval per line:

    0:12 - 0:25 : the farthest turtle

Times are ``SS``, ``SS.mmm``, ``MM:SS`` or ``MM:SS.mmm``. Blank lines and
``#`` comments are skipped. Intervals are half-open [start, end) and may
overlap. The CSV form uses the header ``start_seconds,end_seconds,description``
and is byte-deterministic.
"""

from __future__ import annotations

import csv
import io
import re
import warnings
from dataclasses import dataclass, field

CSV_HEADER = ("start_seconds", "end_seconds", "description")

_TIME_RE = r"(?:\d+:)?\d+(?:\.\d+)?"
_LINE_RE = re.compile(
    rf"^\s*(?P<start>{_TIME_RE})\s*-\s*(?P<end>{_TIME_RE})\s*:\s*(?P<desc>.*\S)\s*$"
)

MAX_DESCRIPTION_BYTES = 1024


class ScriptError(ValueError):
    pass


class ScriptSyntaxError(ScriptError):
    def __init__(self, line: int, column: int, reason: str):
        super().__init__(f"line {line}, column {column}: {reason}")
        self.line = line
        self.column = column
        self.reason = reason


class InvalidIntervalError(ScriptError):
    pass


class EmptyScriptError(ScriptError):
    pass


class SchemaError(ScriptError):
    pass


def _check_description(desc: str) -> str:
    if not desc or not desc.strip():
        raise ScriptError("description is empty")
    if len(desc.encode("utf-8")) > MAX_DESCRIPTION_BYTES:
        raise ScriptError("description exceeds 1024 bytes")
    if any(ord(ch) < 0x20 or ord(ch) == 0x7F for ch in desc):
        raise ScriptError("description contains control characters")
    return desc


@dataclass(frozen=True)
class ScriptEntry:
    """One attention interval: [start, end) seconds plus a target description."""

    start: float
    end: float
    description: str

    def __post_init__(self) -> None:
        if self.start < 0:
            raise InvalidIntervalError(f"start must be >= 0, got {self.start}")
        if not self.start < self.end:
            raise InvalidIntervalError(
                f"start must precede end, got [{self.start}, {self.end})"
            )
        _check_description(self.description)

    def contains(self, t: float) -> bool:
        return self.start <= t < self.end


@dataclass(frozen=True)
class Script:
    """Ordered attention intervals; overlaps are permitted."""

    entries: tuple[ScriptEntry, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not self.entries:
            raise EmptyScriptError("script has no entries")
        ordered = tuple(sorted(self.entries, key=lambda e: (e.start, e.end)))
        object.__setattr__(self, "entries", ordered)

    def active_entries(self, t: float) -> list[int]:
        """Indices of entries whose half-open interval contains t."""
        return [i for i, e in enumerate(self.entries) if e.contains(t)]


def _parse_time(token: str) -> float:
    if ":" in token:
        minutes, seconds = token.split(":", 1)
        sec = float(seconds)
        if sec >= 60.0:
            raise ValueError(f"seconds field {seconds!r} must be < 60")
        return int(minutes) * 60.0 + sec
    return float(token)


def parse_roadmap(text: str) -> Script:
    """Parse a roadmap document into a validated Script."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE_RE.match(raw)
        if m is None:
            raise ScriptSyntaxError(
                lineno, 1, f"expected '<time> - <time> : <description>', got {line!r}"
            )
        try:
            start = _parse_time(m.group("start"))
        except ValueError as exc:
            raise ScriptSyntaxError(lineno, m.start("start") + 1, str(exc)) from exc
        try:
            end = _parse_time(m.group("end"))
        except ValueError as exc:
            raise ScriptSyntaxError(lineno, m.start("end") + 1, str(exc)) from exc
        if not start < end:
            raise InvalidIntervalError(
                f"line {lineno}: start {start} must precede end {end}"
            )
        entries.append(ScriptEntry(start, end, m.group("desc")))
    if not entries:
        raise EmptyScriptError("roadmap contains no entries")
    return Script(tuple(entries))


def _format_seconds(x: float) -> str:
    """Shortest decimal with at least one fractional digit."""
    if x == int(x):
        return f"{x:.1f}"
    s = repr(x)
    if "e" in s or "E" in s:
        s = f"{x:.12f}".rstrip("0")
    return s


def to_csv(script: Script) -> str:
    """Serialize a Script to its byte-deterministic CSV form (LF endings)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(CSV_HEADER)
    for e in script.entries:
        writer.writerow(
            [_format_seconds(e.start), _format_seconds(e.end), e.description]
        )
    return buf.getvalue()


def from_csv(doc: str) -> Script:
    """Parse the CSV interchange form back into a Script."""
    reader = csv.reader(io.StringIO(doc, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty document") from None
    if tuple(h.strip() for h in header[:3]) != CSV_HEADER:
        raise SchemaError(
            f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}"
        )
    if len(header) > 3:
        warnings.warn("ignoring extra CSV columns beyond the schema", stacklevel=2)
    entries = []
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) < 3:
            raise SchemaError(f"row {rownum}: expected 3 fields, got {len(row)}")
        if len(row) > 3:
            warnings.warn(f"row {rownum}: ignoring extra trailing columns", stacklevel=2)
        try:
            start = float(row[0])
            end = float(row[1])
        except ValueError as exc:
            raise SchemaError(f"row {rownum}: bad time value: {exc}") from exc
        try:
            entries.append(ScriptEntry(start, end, row[2]))
        except ScriptError as exc:
            raise type(exc)(f"row {rownum}: {exc}") from exc
    if not entries:
        raise EmptyScriptError("CSV contains no entries")
    return Script(tuple(entries))
