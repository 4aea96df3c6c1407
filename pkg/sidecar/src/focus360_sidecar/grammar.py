"""Mock-mode roadmap extraction.

Model mode would hand free text to an instruction-following model; mock
mode applies the renderer's deterministic roadmap grammar instead:

    <time> - <time> : <description>

with times ``SS``, ``SS.mmm``, ``MM:SS`` or ``MM:SS.mmm``, ``#`` comments
and blank lines skipped. Output is the renderer's CSV interchange schema
(header ``start_seconds,end_seconds,description``, LF endings), produced
byte-deterministically.
"""

from __future__ import annotations

import csv
import io
import re

CSV_HEADER = ("start_seconds", "end_seconds", "description")

_TIME_RE = r"(?:\d+:)?\d+(?:\.\d+)?"
_LINE_RE = re.compile(
    rf"^\s*(?P<start>{_TIME_RE})\s*-\s*(?P<end>{_TIME_RE})\s*:\s*(?P<desc>.*\S)\s*$"
)

MAX_DESCRIPTION_BYTES = 1024


class ExtractionError(ValueError):
    """Raised when no well-formed intervals can be extracted."""


def _parse_time(token: str) -> float:
    if ":" in token:
        minutes, seconds = token.split(":", 1)
        sec = float(seconds)
        if sec >= 60.0:
            raise ValueError(f"seconds field {seconds!r} must be < 60")
        return int(minutes) * 60.0 + sec
    return float(token)


def _check_description(desc: str) -> None:
    if len(desc.encode("utf-8")) > MAX_DESCRIPTION_BYTES:
        raise ValueError("description exceeds 1024 bytes")
    if any(ord(ch) < 0x20 or ord(ch) == 0x7F for ch in desc):
        raise ValueError("description contains control characters")


def extract_intervals(text: str) -> list[tuple[float, float, str]]:
    """Parse roadmap text into sorted (start, end, description) triples."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE_RE.match(raw)
        if m is None:
            raise ExtractionError(f"line {lineno}: not an interval line: {line!r}")
        try:
            start = _parse_time(m.group("start"))
            end = _parse_time(m.group("end"))
            _check_description(m.group("desc"))
        except ValueError as exc:
            raise ExtractionError(f"line {lineno}: {exc}") from exc
        if not 0 <= start < end:
            raise ExtractionError(
                f"line {lineno}: start {start} must be >= 0 and precede end {end}"
            )
        entries.append((start, end, m.group("desc")))
    if not entries:
        raise ExtractionError("no intervals found")
    return sorted(entries, key=lambda e: (e[0], e[1]))


def _format_seconds(x: float) -> str:
    # shortest decimal with at least one fractional digit
    if x == int(x):
        return f"{x:.1f}"
    s = repr(x)
    if "e" in s or "E" in s:
        s = f"{x:.12f}".rstrip("0")
    return s


def intervals_to_csv(entries: list[tuple[float, float, str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(CSV_HEADER)
    for start, end, desc in entries:
        writer.writerow([_format_seconds(start), _format_seconds(end), desc])
    return buf.getvalue()


def parse_to_csv(text: str) -> str:
    """Roadmap text to the CSV interchange form; raises ExtractionError."""
    return intervals_to_csv(extract_intervals(text))
