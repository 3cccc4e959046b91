"""Exception types raised across the package."""


class BosonOWFError(Exception):
    """Base class for all package errors."""


class DimensionError(BosonOWFError, ValueError):
    """A matrix has the wrong shape for the requested operation."""


class SizeLimitError(BosonOWFError, ValueError):
    """A problem exceeds the hard size limit of an algorithm."""


class BoundsError(BosonOWFError, IndexError):
    """An index or port lies outside its valid range."""


class ConfigurationError(BosonOWFError, ValueError):
    """A boson configuration is malformed for the given space."""


class CapacityError(BosonOWFError, ValueError):
    """An enumeration or integer result exceeds the configured capacity."""


class IntegrityError(BosonOWFError, ValueError):
    """A persisted file failed its checksum or unitarity check."""


class SourceError(BosonOWFError, RuntimeError):
    """A sampling oracle failed while feeding the MPB estimator."""


class EvaluationError(BosonOWFError, RuntimeError):
    """The one-way function could not be evaluated (retry cap exhausted)."""
