"""Error taxonomy: validation failures (exit 2) vs numerical refusals (exit 3)."""

from __future__ import annotations


class ValidationError(ValueError):
    """A parameter or config value violates a model constraint.

    Messages quote the violated constraint, e.g. 'rho > 1' or 'p > 5d'.
    """


class RefusalError(RuntimeError):
    """A computation refuses to proceed rather than return a doubtful number."""


class NearResonanceError(RefusalError):
    """Shifted matrix too close to singular for a trustworthy resolvent."""


class ScaleOverflowError(RefusalError):
    """Integer scale recursion left the 64-bit range; use the log-domain ladder."""


class DeskScaleError(RefusalError):
    """Requested dense problem exceeds the desk-scale site budget."""


class HypothesisError(RefusalError):
    """A probabilistic bound's hypothesis fails for the requested parameters."""
