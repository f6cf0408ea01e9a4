"""Exception types shared across the toolkit."""


class DbscaleError(Exception):
    """Base class for all toolkit errors."""


class OverflowGuard(DbscaleError):
    """Evaluation point exceeds the documented |Im z| guard."""


class RemovabilityViolation(DbscaleError):
    """A difference quotient does not actually have a removable singularity."""


class EmptySampleSet(DbscaleError):
    """Hermite-Biehler verification called with no sample points."""


class NonConvergence(DbscaleError):
    """An inner-product rule failed to meet its tolerance within budget."""


class StepTooCoarse(DbscaleError):
    """Zero scan step too wide: two sign changes inside one step."""


class SpectralPoint(DbscaleError):
    """Resolvent requested at (or numerically on top of) an eigenvalue."""


class LevelMismatch(DbscaleError):
    """A dual functional was paired at the wrong level of the scale."""


class EmptyDictionary(DbscaleError):
    """A dictionary-based lower bound needs at least one element."""


class DegenerateDenominator(DbscaleError):
    """A closed-form denominator vanished to working precision."""


class ConfigError(DbscaleError):
    """Invalid run configuration (CLI exit code 2)."""
