"""Line-oriented trace format.

One record per line: ``op u v w seq`` with ``op`` in ``{i, d}`` and ``w`` a
finite decimal.  Records with ``seq == 0`` form the initial graph; updates
carry ``seq >= 1``.  Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, TextIO, Union

from .graph import UpdateEvent, WeightedEdge


class TraceFormatError(ValueError):
    pass


def format_decimal(w: Fraction) -> str:
    """Shortest exact decimal for ``w``; refuses non-terminating expansions."""
    den = w.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        raise TraceFormatError(f"weight {w} has no finite decimal expansion")
    digits = max(twos, fives)
    scaled = w * 10**digits
    assert scaled.denominator == 1
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    if digits:
        s = s[:-digits] + "." + s[-digits:]
        s = s.rstrip("0").rstrip(".")
    return ("-" if w < 0 else "") + s


def parse_decimal(text: str) -> Fraction:
    try:
        d = Decimal(text)
    except Exception as exc:
        raise TraceFormatError(f"bad weight {text!r}") from exc
    if not d.is_finite():
        raise TraceFormatError(f"bad weight {text!r}")
    return Fraction(d)


def format_event(ev: UpdateEvent) -> str:
    e = ev.edge
    return f"{ev.kind} {e.u} {e.v} {format_decimal(e.w)} {ev.seq}"


def parse_event(line: str, lineno: int = 0) -> UpdateEvent:
    parts = line.split()
    if len(parts) != 5:
        raise TraceFormatError(f"line {lineno}: expected 5 fields, got {len(parts)}")
    op, u, v, w, seq = parts
    if op not in ("i", "d"):
        raise TraceFormatError(f"line {lineno}: unknown op {op!r}")
    try:
        edge = WeightedEdge(int(u), int(v), parse_decimal(w))
        return UpdateEvent(op, edge, int(seq))
    except ValueError as exc:
        raise TraceFormatError(f"line {lineno}: {exc}") from exc


def write_trace(events: Iterable[UpdateEvent], out: Union[str, Path, TextIO]) -> None:
    text = "".join(format_event(ev) + "\n" for ev in events)
    if isinstance(out, (str, Path)):
        Path(out).write_text(text)
    else:
        out.write(text)


def read_trace(src: Union[str, Path, TextIO]) -> list[UpdateEvent]:
    text = Path(src).read_text() if isinstance(src, (str, Path)) else src.read()
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        events.append(parse_event(line, lineno))
    return events


def split_initial(events: list[UpdateEvent]) -> tuple[list[UpdateEvent], list[UpdateEvent]]:
    """Split a trace into its ``seq == 0`` prefix and the update stream."""
    k = 0
    while k < len(events) and events[k].seq == 0:
        k += 1
    if any(ev.seq == 0 for ev in events[k:]):
        raise TraceFormatError("seq 0 records must precede all updates")
    return events[:k], events[k:]
