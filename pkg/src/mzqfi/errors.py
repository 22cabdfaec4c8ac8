"""Exception and warning types shared across the package."""


class MzqfiError(Exception):
    """Base class for all package-specific errors."""


class ComputationIntegrityError(MzqfiError):
    """A quantity that must be real/non-negative carries residue beyond tolerance."""


class DegenerateFss(MzqfiError):
    """Total-photon-number variance is zero; two-parameter coefficients need the
    difference-difference limit path instead of the generic division."""


class NonPositiveFisher(MzqfiError):
    """A Cramer-Rao bound was requested for a non-positive Fisher information."""


class AllCoeffsZero(MzqfiError):
    """Every polynomial coefficient vanished; there is no equation to solve."""


class CutoffTooSmall(MzqfiError):
    """The Fock-space truncation loses too much norm for the requested use."""


class ConfigError(MzqfiError):
    """A scenario configuration is malformed; the message names the field."""


class VerificationFailure(MzqfiError):
    """One or more self-verification checks exceeded their tolerance."""


class TruncationWarning(UserWarning):
    """Truncated norm fell below 1 - 1e-10; moments may lose accuracy."""
