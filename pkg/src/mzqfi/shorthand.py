"""Reduction of two-mode moments to the coefficient bundle feeding every QFI.

All transmission-dependent Fisher expressions are polynomials in the beam
splitter variables with state-dependent scalar coefficients; this module is
the one place those scalars are computed from moments.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass

from .errors import ComputationIntegrityError
from .state_catalog import InputStateSpec, JointMoments, joint_moments

IMAG_RESIDUE_TOL = 1e-10


@dataclass(frozen=True)
class ShorthandCoeffs:
    """State-dependent scalars of the Fisher algebra.

    ``v_plus``/``v_minus`` are the sum/difference of the port photon-number
    variances, ``v_cov`` twice their covariance, ``a_coeff`` the balanced
    difference-difference coefficient, ``s_plus``/``s_minus`` the
    creation-number interference terms and ``p_coeff`` the bare beam overlap
    term.  For separable inputs ``v_cov`` is exactly zero.
    """

    v_plus: float
    v_minus: float
    v_cov: float
    a_coeff: float
    s_plus: float
    s_minus: float
    p_coeff: float

    @property
    def scale(self) -> float:
        """Magnitude reference for scaled zero tests."""
        return max(1.0, self.v_plus + self.v_cov, self.a_coeff)


def _as_real(value, scale: float, label: str) -> float:
    """Reduce a nominally real quantity to float, rejecting imaginary residue."""
    if isinstance(value, numbers.Real):
        return float(value)
    if abs(value.imag) > IMAG_RESIDUE_TOL * scale:
        raise ComputationIntegrityError(
            f"{label} must be real, found imaginary residue {value.imag:.3e}"
        )
    return float(value.real)


def shorthand_from_moments(j: JointMoments, separable: bool) -> ShorthandCoeffs:
    """Evaluate the coefficient bundle from joint moments.

    The same algebra serves both cases; the ``separable`` flag only selects
    the cross-moment source (for a separable input the photon-number
    covariance is identically zero and the stored cross moments are exact
    single-mode products).
    """
    residue_scale = max(1.0, abs(j.mean_n0) + abs(j.mean_n1), abs(j.var_n0) + abs(j.var_n1))
    mean_n0 = _as_real(j.mean_n0, residue_scale, "mean_n0")
    mean_n1 = _as_real(j.mean_n1, residue_scale, "mean_n1")
    var_n0 = _as_real(j.var_n0, residue_scale, "var_n0")
    var_n1 = _as_real(j.var_n1, residue_scale, "var_n1")

    v_plus = var_n0 + var_n1
    v_minus = var_n0 - var_n1
    if separable:
        v_cov = 0.0
        number_product = mean_n0 * mean_n1
    else:
        cov = _as_real(j.cov_n0n1, residue_scale, "cov_n0n1")
        v_cov = 2.0 * cov
        number_product = cov + mean_n0 * mean_n1

    cross = complex(j.cross_a0d_a1)
    cross2 = complex(j.cross_a0d2_a12)
    connected = number_product - abs(cross) ** 2 - (cross2 - cross * cross).real
    a_coeff = 4.0 * (mean_n0 + mean_n1 + 2.0 * connected)

    s_port0 = 4.0 * (complex(j.cross_a0d_n0_a1) - mean_n0 * cross).imag
    s_port1 = 4.0 * (complex(j.cross_a0_a1d_n1) - mean_n1 * cross.conjugate()).imag
    p_coeff = 4.0 * cross.imag

    return ShorthandCoeffs(
        v_plus=v_plus,
        v_minus=v_minus,
        v_cov=v_cov,
        a_coeff=a_coeff,
        s_plus=s_port0 + s_port1,
        s_minus=s_port0 - s_port1,
        p_coeff=p_coeff,
    )


def shorthand_for(spec: InputStateSpec) -> ShorthandCoeffs:
    """Coefficient bundle straight from an input spec."""
    return shorthand_from_moments(joint_moments(spec), spec.is_separable)
