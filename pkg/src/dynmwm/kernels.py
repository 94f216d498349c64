"""Backend selection for the hot kernels.

The compiled extension is used when it imported cleanly and
``DYNMWM_PURE_PYTHON`` is unset.  Inputs whose integer weights could
overflow int64 are always routed to the Python implementation, so callers
never need to care which backend is active.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import lcm
from typing import Sequence

from . import _pykernels

_INT64_SAFE = 1 << 62

try:
    if os.environ.get("DYNMWM_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels as _native  # type: ignore[attr-defined]
except ImportError:
    _native = None

BACKEND = "cython" if _native is not None else "python"


def scale_to_ints(weights: Sequence[Fraction]) -> list[int]:
    """Multiply by the common denominator; order is preserved exactly."""
    den = 1
    for w in weights:
        den = lcm(den, w.denominator)
    return [int(w * den) for w in weights]


def _fits(ints: Sequence[int]) -> bool:
    return sum(ints) < _INT64_SAFE


def mwm_bitmask(n: int, edges: list[tuple[int, int, int]], backend: str | None = None) -> tuple[int, list[int]]:
    """Exact MWM on ``n`` dense vertices; see :func:`_pykernels.mwm_bitmask`."""
    mod = _pick(backend, [w for _, _, w in edges])
    return mod.mwm_bitmask(n, list(edges))


def path_cycle_value(weights: list[int], cycle: bool, state: list[int], backend: str | None = None) -> int:
    mod = _pick(backend, weights)
    return mod.path_cycle_value(list(weights), cycle, list(state))


def path_cycle_lexmin(weights: list[int], cycle: bool, order: list[int], backend: str | None = None) -> tuple[int, list[int]]:
    mod = _pick(backend, weights)
    return mod.path_cycle_lexmin(list(weights), cycle, list(order))


def _pick(backend: str | None, ints: Sequence[int]):
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if _native is None:
            raise RuntimeError("compiled kernels are not available")
        return _native
    if _native is not None and _fits(ints):
        return _native
    return _pykernels
