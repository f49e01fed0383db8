"""Exception hierarchy for group-phi.

Every error raised by the library derives from :class:`GroupPhiError`.
Input-validation errors also derive from :class:`ValueError` so callers can
catch them the usual way.
"""

from __future__ import annotations

from typing import Optional


class GroupPhiError(Exception):
    """Base class for all group-phi errors."""


class InputFormatError(GroupPhiError):
    """An input file could not be parsed or lacks required columns."""

    def __init__(self, message: str, path: Optional[str] = None) -> None:
        super().__init__(message)
        self.path: Optional[str] = path


# State model

class RaggedRows(GroupPhiError, ValueError):
    """Rows of a state matrix differ in length (or disagree with the labels)."""


class NonBinaryValue(GroupPhiError, ValueError):
    """A state matrix entry is not 0 or 1."""


class DuplicateLabel(GroupPhiError, ValueError):
    """Two nodes share a label."""


class TooFewSteps(GroupPhiError, ValueError):
    """A state matrix has fewer than two time steps."""


class InvalidPartition(GroupPhiError, ValueError):
    """Partition blocks overlap, are empty, or do not cover the node set."""


# Information measures

class TauOutOfRange(GroupPhiError, ValueError):
    """Time delay outside 1..T-1."""


class EmptySubset(GroupPhiError, ValueError):
    """A node subset is empty."""


class UnnormalizedDistribution(GroupPhiError, ValueError):
    """Probabilities do not sum to one."""


# Phi engine

class NodeCapExceeded(GroupPhiError, ValueError):
    """Too many nodes for exhaustive bipartition search."""


class AllBipartitionsDegenerate(GroupPhiError):
    """Every candidate bipartition had a zero normalization."""


class SingularCovariance(GroupPhiError):
    """A covariance matrix stayed singular after regularization."""


class ExhaustedNodes(GroupPhiError):
    """Stability correction dropped nodes until fewer than two remained."""


class NoValidResults(GroupPhiError):
    """No valid phi value was available to average."""


# Graph sampling

class InsufficientNodes(GroupPhiError, ValueError):
    """The graph has fewer nodes than the sampling goal."""


# Ingestion

class MisalignedTracks(GroupPhiError, ValueError):
    """Volume tracks differ in length or are empty."""


class NonPositiveThreshold(GroupPhiError, ValueError):
    """The volume threshold is not positive."""


class UnknownSpeaker(GroupPhiError, ValueError):
    """A chat line's speaker is not on the roster."""


class TooFewLines(GroupPhiError, ValueError):
    """A chat log has fewer than two lines."""


class UnsortedInput(GroupPhiError, ValueError):
    """Edit records are not sorted by timestamp."""


class TooFewEdits(GroupPhiError, ValueError):
    """A quality window has fewer than two edits."""


class EmptyNodeSet(GroupPhiError, ValueError):
    """No nodes were given for packet encoding."""


class NonPositiveDelta(GroupPhiError, ValueError):
    """The packet bin width is not positive."""


# Statistics

class LengthMismatch(GroupPhiError, ValueError):
    """Paired samples differ in length or are too short."""


class ZeroVariance(GroupPhiError, ValueError):
    """A sample has no variance."""


class EmptySample(GroupPhiError, ValueError):
    """A sample is empty."""


class RankDeficientDesign(GroupPhiError, ValueError):
    """The regression design is not full column rank."""


class BreakOutOfRange(GroupPhiError, ValueError):
    """The hardware break date does not split the date range."""
