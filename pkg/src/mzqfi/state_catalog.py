"""Two-mode input-state catalog and exact analytic moments.

States are declared per port (vacuum, coherent, Fock, squeezed vacuum,
squeezed coherent) or as a joint two-mode squeezed vacuum.  Every catalog
entry maps to the closed-form expectation values consumed by the Fisher
algebra: single-mode means/variances plus the cross moments that survive
in a two-mode setting.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from typing import Union

TAU = 2.0 * math.pi


def normalize_angle(phase: float) -> float:
    """Map an angle to the (-pi, pi] branch."""
    wrapped = math.fmod(phase, TAU)
    if wrapped > math.pi:
        wrapped -= TAU
    elif wrapped <= -math.pi:
        wrapped += TAU
    return wrapped


@dataclass(frozen=True)
class ComplexAmp:
    """Polar complex amplitude (coherent displacement)."""

    magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.magnitude < 0:
            raise ValueError(f"magnitude must be non-negative, got {self.magnitude}")
        object.__setattr__(self, "phase", normalize_angle(self.phase))

    @property
    def value(self) -> complex:
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class SqueezeParam:
    """Polar squeeze parameter: factor >= 0 and squeeze phase."""

    factor: float
    phase: float = 0.0

    def __post_init__(self):
        if self.factor < 0:
            raise ValueError(f"squeeze factor must be non-negative, got {self.factor}")
        object.__setattr__(self, "phase", normalize_angle(self.phase))


@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Coherent:
    amp: ComplexAmp


@dataclass(frozen=True)
class Fock:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f"Fock photon count must be a non-negative integer, got {self.n}")


@dataclass(frozen=True)
class SqueezedVacuum:
    squeeze: SqueezeParam


@dataclass(frozen=True)
class SqueezedCoherent:
    amp: ComplexAmp
    squeeze: SqueezeParam


PortState = Union[Vacuum, Coherent, Fock, SqueezedVacuum, SqueezedCoherent]


@dataclass(frozen=True)
class InputStateSpec:
    """Either a separable pair of port states or an entangled twin-beam state.

    Use the :meth:`separable` / :meth:`twin_beam` constructors; exactly one of
    the two forms is populated.
    """

    port0: PortState | None = None
    port1: PortState | None = None
    twin_beam_squeeze: SqueezeParam | None = None

    def __post_init__(self):
        ports_given = self.port0 is not None or self.port1 is not None
        if ports_given == (self.twin_beam_squeeze is not None):
            raise ValueError("exactly one of ports / twin-beam squeeze must be populated")
        if ports_given and (self.port0 is None or self.port1 is None):
            raise ValueError("a separable spec needs both port states")

    @classmethod
    def separable(cls, port0: PortState, port1: PortState) -> "InputStateSpec":
        return cls(port0=port0, port1=port1)

    @classmethod
    def twin_beam(cls, squeeze: SqueezeParam) -> "InputStateSpec":
        return cls(twin_beam_squeeze=squeeze)

    @property
    def is_separable(self) -> bool:
        return self.twin_beam_squeeze is None


def vacuum() -> Vacuum:
    return Vacuum()


def coherent(magnitude: float, phase: float = 0.0) -> Coherent:
    return Coherent(ComplexAmp(magnitude, phase))


def fock(n: int) -> Fock:
    return Fock(n)


def squeezed_vacuum(factor: float, phase: float = 0.0) -> SqueezedVacuum:
    return SqueezedVacuum(SqueezeParam(factor, phase))


def squeezed_coherent(
    magnitude: float, amp_phase: float, factor: float, squeeze_phase: float
) -> SqueezedCoherent:
    return SqueezedCoherent(ComplexAmp(magnitude, amp_phase), SqueezeParam(factor, squeeze_phase))


def tmsv(factor: float, phase: float = 0.0) -> InputStateSpec:
    return InputStateSpec.twin_beam(SqueezeParam(factor, phase))


@dataclass(frozen=True)
class ModeMoments:
    """Single-mode expectation values.

    ``cov_an`` is the connected creation/number moment
    <a^dag n> - <a^dag><n>; the field operator means are stored as complex
    numbers even when they vanish identically.
    """

    mean_a: complex
    mean_a2: complex
    mean_n: float
    var_n: float
    cov_an: complex

    def __post_init__(self):
        if not all(isinstance(x, numbers.Real) for x in (self.mean_n, self.var_n)):
            return  # imaginary residue is policed where the values are consumed
        tol = 1e-12 * max(1.0, self.mean_n)
        if self.var_n < -tol:
            raise ValueError(f"variance must be non-negative, got {self.var_n}")
        if abs(self.mean_a) ** 2 > self.mean_n + tol:
            raise ValueError("|<a>|^2 cannot exceed <n>")


@dataclass(frozen=True)
class JointMoments:
    """Two-mode expectation values feeding the Fisher algebra.

    The four complex fields are the only cross moments the formulas need:
    <a0^dag a1>, <(a0^dag)^2 a1^2>, <a0^dag n0 a1> and <a0 a1^dag n1>.
    For separable specs they factorize exactly into single-mode products.
    """

    mean_n0: float
    mean_n1: float
    var_n0: float
    var_n1: float
    cov_n0n1: float
    cross_a0d_a1: complex
    cross_a0d2_a12: complex
    cross_a0d_n0_a1: complex
    cross_a0_a1d_n1: complex

    def __post_init__(self):
        reals = (self.mean_n0, self.mean_n1, self.var_n0, self.var_n1, self.cov_n0n1)
        if not all(isinstance(x, numbers.Real) for x in reals):
            return  # imaginary residue is policed where the values are consumed
        tol = 1e-12 * max(1.0, self.mean_n0 + self.mean_n1)
        if self.var_n0 < -tol or self.var_n1 < -tol:
            raise ValueError("variances must be non-negative")
        bound = math.sqrt(max(self.var_n0, 0.0) * max(self.var_n1, 0.0))
        if abs(self.cov_n0n1) > bound + tol * (1.0 + bound):
            raise ValueError("photon-number covariance violates Cauchy-Schwarz")


def _gaussian_moments(alpha: complex, z: float, squeeze_phase: float) -> ModeMoments:
    # Displaced squeezed state D(alpha) S(z e^{i phi}) |0>; every Gaussian
    # catalog entry is the z->0 and/or alpha->0 special case of this formula.
    sh = math.sinh(z)
    sh2 = math.sinh(2.0 * z)
    ch2 = math.cosh(2.0 * z)
    phase = complex(math.cos(squeeze_phase), math.sin(squeeze_phase))
    mag2 = abs(alpha) ** 2
    mean_a2 = alpha * alpha - 0.5 * sh2 * phase
    mean_n = mag2 + sh * sh
    var_n = 0.5 * sh2 * sh2 + mag2 * ch2 - sh2 * (alpha * alpha * phase.conjugate()).real
    cov_an = alpha.conjugate() * sh * sh - 0.5 * alpha * sh2 * phase.conjugate()
    return ModeMoments(alpha, mean_a2, mean_n, var_n, cov_an)


def mode_moments(state: PortState) -> ModeMoments:
    """Exact analytic moments of a single catalog port state.

    Total on valid port states; Fock states are number eigenstates so every
    complex field is exactly zero.
    """
    if isinstance(state, Vacuum):
        return _gaussian_moments(0j, 0.0, 0.0)
    if isinstance(state, Coherent):
        return _gaussian_moments(state.amp.value, 0.0, 0.0)
    if isinstance(state, SqueezedVacuum):
        return _gaussian_moments(0j, state.squeeze.factor, state.squeeze.phase)
    if isinstance(state, SqueezedCoherent):
        return _gaussian_moments(state.amp.value, state.squeeze.factor, state.squeeze.phase)
    if isinstance(state, Fock):
        return ModeMoments(0j, 0j, float(state.n), 0.0, 0j)
    raise TypeError(f"unknown port state {state!r}")


def joint_moments(spec: InputStateSpec) -> JointMoments:
    """Two-mode moments of an input spec.

    Separable specs assemble cross moments as exact products of the per-port
    moments.  The twin-beam state carries all its correlation in the photon
    numbers: the per-mode means are sinh^2(r), variances and the number
    covariance are sinh^2(2r)/4, and every odd-per-mode cross moment vanishes
    (including <(a0^dag)^2 a1^2>, which pairs lowered against raised diagonal
    components).
    """
    if spec.is_separable:
        m0 = mode_moments(spec.port0)
        m1 = mode_moments(spec.port1)
        a0d_n0 = m0.cov_an + m0.mean_a.conjugate() * m0.mean_n
        a1d_n1 = m1.cov_an + m1.mean_a.conjugate() * m1.mean_n
        return JointMoments(
            mean_n0=m0.mean_n,
            mean_n1=m1.mean_n,
            var_n0=m0.var_n,
            var_n1=m1.var_n,
            cov_n0n1=0.0,
            cross_a0d_a1=m0.mean_a.conjugate() * m1.mean_a,
            cross_a0d2_a12=m0.mean_a2.conjugate() * m1.mean_a2,
            cross_a0d_n0_a1=a0d_n0 * m1.mean_a,
            cross_a0_a1d_n1=m0.mean_a * a1d_n1,
        )
    r = spec.twin_beam_squeeze.factor
    s2 = math.sinh(r) ** 2
    v = math.sinh(2.0 * r) ** 2 / 4.0
    return JointMoments(
        mean_n0=s2,
        mean_n1=s2,
        var_n0=v,
        var_n1=v,
        cov_n0n1=v,
        cross_a0d_a1=0j,
        cross_a0d2_a12=0j,
        cross_a0d_n0_a1=0j,
        cross_a0_a1d_n1=0j,
    )
