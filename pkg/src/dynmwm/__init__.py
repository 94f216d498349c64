"""Dynamic approximate maximum weight matching via weight reduction."""

from __future__ import annotations

__version__ = "0.1.0"
