"""Multiplicative Rado numbers: exact counting, constructions and searches."""

from __future__ import annotations

__version__ = "0.1.0"
