"""Quantum Fisher information of an unbalanced Mach-Zehnder interferometer.

Analytic Fisher matrix elements, single- and two-parameter QFIs and their
closed-form transmission optima for a catalog of pure two-mode input states,
cross-checked against a truncated Fock-space brute-force engine.
"""

from .errors import (
    AllCoeffsZero,
    ComputationIntegrityError,
    ConfigError,
    CutoffTooSmall,
    DegenerateFss,
    MzqfiError,
    NonPositiveFisher,
    TruncationWarning,
    VerificationFailure,
)
from .fisher_core import (
    Advantage,
    BundleKind,
    CoeffBundle,
    FisherMatrix,
    QfiBreakdown,
    QfiSelector,
    Transmission,
    coeff_bundle,
    fisher_matrix,
    no_advantage_classify,
    qcrb,
    qfi_all,
    qfi_curve,
)
from .optimizer import (
    OptimizationReport,
    QuarticCoeffs,
    grid_verify,
    optimize,
    optimize_2p,
    optimize_i,
    optimize_ii,
    solve_quartic,
)
from .shorthand import ShorthandCoeffs, shorthand_for, shorthand_from_moments
from .state_catalog import (
    Coherent,
    ComplexAmp,
    Fock,
    InputStateSpec,
    JointMoments,
    ModeMoments,
    SqueezeParam,
    SqueezedCoherent,
    SqueezedVacuum,
    Vacuum,
    coherent,
    fock,
    joint_moments,
    mode_moments,
    squeezed_coherent,
    squeezed_vacuum,
    tmsv,
    vacuum,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
