"""Exception types shared across the package."""


class BanachOrthoError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class DomainError(BanachOrthoError, ValueError):
    """Invalid input: wrong dimension, zero vector, non-finite entries."""

    exit_code = 2


class CapabilityError(BanachOrthoError):
    """The requested route is not available for this space kind."""

    exit_code = 3


class DiagnosticError(BanachOrthoError):
    """A sampler came back empty (no near-attaining pairs, empty band)."""

    exit_code = 4
