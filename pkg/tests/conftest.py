from __future__ import annotations

import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from dynmwm.graph import DynamicGraph

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

A, B, C, D = 0, 1, 2, 3


@pytest.fixture
def path4() -> DynamicGraph:
    """Path a-b-c-d with weights 1, 1, 3/2."""
    return DynamicGraph.from_triples([(A, B, 1), (B, C, 1), (C, D, Fraction(3, 2))])


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance_line():
    """Record the one-line verdict of an acceptance criterion."""

    def record(number: int, passed: bool, detail: str) -> None:
        ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
