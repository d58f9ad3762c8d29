"""Exception types shared across the package.

Everything raised deliberately by this package derives from RegenumError so
callers can catch one base class at CLI boundaries.
"""

from __future__ import annotations


class RegenumError(Exception):
    """Base class for all errors raised by this package."""


class InfeasibleSpecError(RegenumError):
    """A degree specification that cannot support the requested operation."""


class DegenerateOrderError(RegenumError):
    """Metric undefined at this order (ASPL needs at least two vertices)."""


class DisconnectedError(RegenumError):
    """Distance-based metric requested on a disconnected graph."""


class OrderMismatchError(RegenumError):
    """Two graphs of different orders where equal orders are required."""


class Graph6ParseError(RegenumError):
    """Malformed graph6 input. Carries the byte offset of the defect."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


class UnknownTaskError(RegenumError):
    """Task index outside the range produced by the split level."""


class OracleScaleError(RegenumError):
    """Reference counter invoked beyond the order it can verify."""


class JobMismatchError(RegenumError):
    """Checkpoint or partial results belong to a different job."""


class MissingDataError(RegenumError):
    """A report was requested from a result that never collected the data."""
