"""Exceptions and warning categories shared across the package."""

from __future__ import annotations


class InvalidEnvelopeError(ValueError):
    """Raised when a coupling envelope cannot be constructed or evaluated."""


class InvalidStateError(ValueError):
    """Raised when a two-photon state is malformed (for example zero norm)."""


class UnsupportedConfigurationError(ValueError):
    """Raised when an operation does not apply to the given coupling setup."""


class InvalidOverlapError(ValueError):
    """Raised when a gate overlap lies outside the closed unit disk."""


class UndefinedCorrelationError(ValueError):
    """Raised when a joint spectrum has no spectral spread on either axis."""


class EmptyPostselectionError(RuntimeError):
    """Raised when filter postselection leaves no amplitude to normalize."""


class IntegrationFailureError(RuntimeError):
    """Raised when the time-domain integrator loses norm beyond tolerance."""


class NotAsymptoticError(RuntimeError):
    """Raised when a trajectory is read out before scattering has completed."""


class TruncationError(RuntimeError):
    """Raised when a quadrature window cannot contain the integrand."""


class TruncationWarning(UserWarning):
    """Issued when a frequency grid clips a non-negligible envelope tail."""


class MarkovValidityWarning(UserWarning):
    """Issued when the coupling rate is too large compared to the emitter
    frequency for the flat-band approximation to be reliable."""
