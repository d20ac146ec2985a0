"""Error types raised by dimer-forge operations."""

from __future__ import annotations


class DimerForgeError(ValueError):
    """Base class for every input or verification error raised by the package."""


class FormatError(DimerForgeError):
    """Raised when an input file does not follow the expected JSON layout."""


class BadRotation(DimerForgeError):
    """Raised when a rotation system is not a permutation of the darts."""


class NotBipartite(DimerForgeError):
    """Raised when an edge joins two vertices of the same color."""


class NonPositiveWeight(DimerForgeError):
    """Raised when an edge weight is zero or negative."""


class EulerMismatch(DimerForgeError):
    """Raised when V - E + F does not match the surface of the map."""


class Unbalanced(DimerForgeError):
    """Raised when black and white vertex counts differ."""


class TooLarge(DimerForgeError):
    """Raised when an exhaustive computation exceeds its size limit."""


class Singular(DimerForgeError):
    """Raised when a Kasteleyn matrix has zero determinant."""


class ZeroComponent(DimerForgeError):
    """Raised when a gauge vector or nullvector has a vanishing component."""


class BadDualRoot(DimerForgeError):
    """Raised when the requested dual root is not an outer face."""


class NotTGraph(DimerForgeError):
    """Raised when a segment family violates the T-graph closure conditions."""


class Overlapping(DimerForgeError):
    """Raised when two open segments intersect."""


class InvalidMarking(DimerForgeError):
    """Raised when a marked matching is not a marked perfect matching of the derived graph."""


class InvalidForest(DimerForgeError):
    """Raised when a directed edge set is not a rooted spanning forest."""


class DegeneratePolygon(DimerForgeError):
    """Raised when the target polygon would have fewer than three vertices."""


class NotClosed(DimerForgeError):
    """Raised when the integrated dual flow is inconsistent around a face."""


class NoRootReachable(DimerForgeError):
    """Raised when some interior vertex cannot reach a root."""


class NonGenericWeights(DimerForgeError):
    """Raised when weights fall on a non-generic locus the construction cannot handle."""


class RankDeficient(DimerForgeError):
    """Raised when the adjugate vanishes at a spectral root."""
