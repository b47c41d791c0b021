"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ArtifactError(Exception):
    """Base class for all library errors."""


class DuplicateNode(ArtifactError):
    pass


class OrphanParent(ArtifactError):
    pass


class MultipleRoots(ArtifactError):
    pass


class UnknownNode(ArtifactError, KeyError):
    pass


class MissingMetadata(ArtifactError):
    pass


class PartialMap(ArtifactError):
    pass


class EscapesHorizon(ArtifactError):
    """An iterate or image left the frozen node set.

    ``progress`` records how far the computation got before escaping.
    """

    def __init__(self, message: str, progress: object = None):
        super().__init__(message)
        self.progress = progress


class OracleFailure(ArtifactError):
    pass


class HorizonTooSmall(ArtifactError):
    pass


class BadSigmaLength(ArtifactError):
    pass


class DuplicateString(ArtifactError):
    pass


class ComponentTooTall(ArtifactError):
    pass


class NoGrowingNode(ArtifactError):
    pass


class NoBranchingFound(ArtifactError):
    pass


class Undetermined(ArtifactError):
    pass


class AdversaryViolation(ArtifactError):
    pass


class ParseError(ArtifactError):
    """Malformed input file (tree, schedule, embedding or config)."""
