from __future__ import annotations

import io
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynmwm.graph import UpdateEvent
from dynmwm.trace import TraceFormatError, format_decimal, parse_decimal, read_trace, split_initial, write_trace

decimals = st.builds(lambda n, k: Fraction(n, 10**k), st.integers(1, 10**9), st.integers(0, 6))


@given(decimals)
def test_decimal_round_trip(w):
    assert parse_decimal(format_decimal(w)) == w


def test_decimal_formatting():
    assert format_decimal(Fraction(3, 2)) == "1.5"
    assert format_decimal(Fraction(100)) == "100"
    assert format_decimal(Fraction(1, 8)) == "0.125"
    with pytest.raises(TraceFormatError):
        format_decimal(Fraction(1, 3))


@given(st.lists(st.tuples(st.integers(0, 50), st.integers(51, 99), decimals, st.booleans()), max_size=30))
def test_trace_round_trip_is_bit_exact(rows):
    events = [UpdateEvent.insert(u, v, w, i) if ins else UpdateEvent.delete(u, v, w, i) for i, (u, v, w, ins) in enumerate(rows, 1)]
    buf = io.StringIO()
    write_trace(events, buf)
    again = read_trace(io.StringIO(buf.getvalue()))
    assert again == events
    buf2 = io.StringIO()
    write_trace(again, buf2)
    assert buf2.getvalue() == buf.getvalue()


def test_malformed_records():
    for line in ["x 1 2 3 1", "i 1 2 3", "i 1 1 3 1", "i 1 2 abc 1"]:
        with pytest.raises(TraceFormatError):
            read_trace(io.StringIO(line))


def test_split_initial():
    events = read_trace(io.StringIO("i 0 1 1 0\ni 1 2 2 0\n# comment\n\ni 2 3 1 1\n"))
    init, rest = split_initial(events)
    assert len(init) == 2 and len(rest) == 1
    with pytest.raises(TraceFormatError):
        split_initial(read_trace(io.StringIO("i 0 1 1 1\ni 1 2 1 0\n")))
