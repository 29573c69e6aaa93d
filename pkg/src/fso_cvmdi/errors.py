"""Exception hierarchy shared by all layers.

Exit-code mapping used by the CLI: ConfigError -> 2, ModelError -> 3,
NonConvergenceError -> 4.
"""
from __future__ import annotations


class FsoCvmdiError(Exception):
    """Base class for all package errors."""


class ConfigError(FsoCvmdiError):
    """Invalid or unparsable scenario configuration.

    Carries the full list of violations so a user can fix a config in one
    pass instead of one error at a time.
    """

    def __init__(self, violations: list[str] | str):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = violations
        super().__init__("; ".join(violations))


class ModelError(FsoCvmdiError):
    """A physical-model precondition failed (domain error, degenerate link)."""

    def __init__(self, message: str, stage: str = ""):
        self.stage = stage
        super().__init__(f"[{stage}] {message}" if stage else message)


class DegenerateLinkError(ModelError):
    """Link transmissivity too small for the fading parametrisation."""


class InsufficientStatisticsError(ModelError):
    """Worst-case estimate crossed zero; not enough samples to certify."""


class NonConvergenceError(FsoCvmdiError):
    """Quadrature did not reach the requested tolerance.

    The partial estimate and its error estimate are kept so callers can
    decide whether the partial answer is still useful.
    """

    def __init__(self, message: str, partial: float, error_estimate: float):
        self.partial = partial
        self.error_estimate = error_estimate
        super().__init__(f"{message} (partial={partial!r}, err={error_estimate!r})")
