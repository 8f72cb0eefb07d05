"""
Domain errors.

Every failure the numerical layer can signal is a BirkhoffError subclass with a
stable machine code. The command line maps ``exit_code`` to the process status
and ``to_payload()`` to the error JSON written on stderr.
"""

from typing import Any, Dict, Optional


class BirkhoffError(RuntimeError):
    """Base class for numerical and usage failures."""

    code = "birkhoff_error"
    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_payload(self) -> Dict[str, Any]:
        return {
            "error": {
                "code": self.code,
                "message": self.message,
                "details": self.details,
            }
        }


class PhaseDegenerate(BirkhoffError):
    """The eigenvector phase chain cannot be fixed (overlap below tol_phase)."""

    code = "phase_degenerate"


class GapViolation(BirkhoffError):
    """A trusted gap is negative beyond tol_gap."""

    code = "gap_violation"


class NearPole(BirkhoffError):
    """Spectral parameter too close to a pole of the generating function."""

    code = "near_pole"


class NonPositiveKappa(BirkhoffError):
    code = "non_positive_kappa"


class ZeroDenominator(BirkhoffError):
    code = "zero_denominator"


class MissingGap(BirkhoffError):
    """A retained gap is closed, so the transfer matrix is undefined."""

    code = "missing_gap"


class RootInsideDisc(BirkhoffError):
    code = "root_inside_disc"


class BlowupDetected(BirkhoffError):
    code = "blowup_detected"


class StepTooLarge(BirkhoffError):
    code = "step_too_large"


class QuadratureNotConverged(BirkhoffError):
    code = "quadrature_not_converged"


class NoBracket(BirkhoffError):
    code = "no_bracket"


class TruncationInsufficient(BirkhoffError):
    """Geometric tail not below the limit at the largest allowed truncation."""

    code = "truncation_insufficient"


class IntervalTooShort(BirkhoffError):
    code = "interval_too_short"


class GridMismatch(BirkhoffError):
    code = "grid_mismatch"


class TailNotResolved(BirkhoffError):
    """Gap tail still significant at the last trusted index."""

    code = "tail_not_resolved"


class ConfigError(BirkhoffError):
    """Invalid experiment configuration."""

    code = "config_error"
    exit_code = 2
