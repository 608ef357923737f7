"""
Exception types raised by the simulator.
"""


class CrnSimError(Exception):
    """Base class for every error the simulator raises on purpose."""


class InvalidConfigError(CrnSimError, ValueError):
    """An experiment or generator parameter is missing, mistyped or out of range."""


class SpectrumDomainError(CrnSimError, ValueError):
    """A numeric input lies outside the domain of a spectrum quantity."""


class NoChannelError(CrnSimError):
    """A selector was asked to pick from an empty set of channels."""


class SimulationError(CrnSimError):
    """Internal inconsistency while running a dissemination."""


class InsufficientSamplesError(CrnSimError, ValueError):
    """A statistic needs more samples than were given."""
