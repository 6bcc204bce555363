"""Exception hierarchy for the reconstruction toolkit.

Everything raised on purpose derives from :class:`ReconstructionError`, so
callers (CLI, service) can distinguish bad input from genuine bugs with a
single ``except`` clause.
"""

from __future__ import annotations


class ReconstructionError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ReconstructionError):
    """Input document is malformed (bad JSON, missing keys, ragged rows)."""


class DomainError(ReconstructionError):
    """Numeric content violates a domain constraint (e.g. entries outside [0, 1])."""


class EmptyTableError(ReconstructionError):
    """A statistics table has no rows or no columns."""


class SizeError(ReconstructionError):
    """Requested size is outside the supported range."""


class RankDeficiencyError(ReconstructionError):
    """A table or pairing has numerical rank zero; nothing to embed."""


class DimensionMismatchError(ReconstructionError):
    """Vector or matrix shapes are inconsistent with the ambient model."""


class WeightError(ReconstructionError):
    """Convex weights are negative or do not sum to one."""


class DegeneratePairingError(ReconstructionError):
    """Pairing matrix is singular or too ill-conditioned to invert."""


class NotAProjectionError(ReconstructionError):
    """An element required to be idempotent is not one within tolerance."""


class UnsupportedModelError(ReconstructionError):
    """The requested operation is not defined for this kind of model."""
