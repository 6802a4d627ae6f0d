"""Outage-probability results and the clamping policy shared by all evaluation routes."""

import math
from dataclasses import dataclass
from enum import Enum

__all__ = ["Method", "OutageResult", "ClampError", "clamp_probability", "CLAMP_TOLERANCE"]

# Rounding allowance for values nominally in [0, 1]; larger violations are bugs.
CLAMP_TOLERANCE = 1e-9


class Method(Enum):
    CLOSED_FORM = "closed_form"
    MONTE_CARLO = "monte_carlo"
    QUADRATURE = "quadrature"


class ClampError(ArithmeticError):
    """Raw probability fell outside [0, 1] by more than the rounding allowance."""


def clamp_probability(raw: float, tolerance: float = CLAMP_TOLERANCE) -> tuple[float, bool]:
    """Clamp a raw probability into [0, 1], flagging whether clamping occurred.

    Values outside the interval by more than `tolerance` raise ClampError
    instead of being silently repaired.
    """
    if not math.isfinite(raw):
        raise ClampError(f"probability is not finite: {raw!r}")
    if raw < 0.0:
        if raw < -tolerance:
            raise ClampError(f"probability {raw!r} is below 0 by more than {tolerance:g}")
        return 0.0, True
    if raw > 1.0:
        if raw > 1.0 + tolerance:
            raise ClampError(f"probability {raw!r} is above 1 by more than {tolerance:g}")
        return 1.0, True
    return raw, False


@dataclass(frozen=True)
class OutageResult:
    """A secrecy outage probability together with its provenance.

    trials and std_error are populated for Monte Carlo estimates only;
    clamped records whether the raw value was nudged back into [0, 1].
    """

    probability: float
    method: Method
    trials: int | None = None
    std_error: float | None = None
    clamped: bool = False

    def __post_init__(self):
        if not isinstance(self.method, Method):
            raise ValueError(f"method must be a Method, got {self.method!r}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {self.probability!r}")
        is_mc = self.method is Method.MONTE_CARLO
        if is_mc:
            if self.trials is None or self.std_error is None:
                raise ValueError("Monte Carlo results must carry trials and std_error")
            if self.trials < 1:
                raise ValueError(f"trials must be >= 1, got {self.trials}")
            if not self.std_error >= 0.0:
                raise ValueError(f"std_error must be >= 0, got {self.std_error!r}")
        elif self.trials is not None or self.std_error is not None:
            raise ValueError("trials/std_error are Monte Carlo-only fields")
