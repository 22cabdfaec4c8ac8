"""Brute-force two-mode Fock-space engine.

Builds truncated state vectors from closed-form amplitude expansions, applies
beam-splitter and phase unitaries exactly (the beam splitter block-by-block
inside each fixed total-photon-number sector), and recomputes every moment and
Fisher quantity from first principles.  This module is the ground truth the
analytic formulas are tested against; it is deliberately limited to modest
cutoffs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import CutoffTooSmall, TruncationWarning
from .state_catalog import (
    Coherent,
    Fock,
    InputStateSpec,
    JointMoments,
    ModeMoments,
    PortState,
    SqueezedCoherent,
    SqueezedVacuum,
    Vacuum,
    mode_moments,
)

NORM_GATE = 0.99
NORM_WARN = 1.0 - 1e-10


@dataclass(frozen=True, eq=False)
class FockVector:
    """Two-mode state truncated at ``cutoff`` photons per mode.

    ``amplitudes[n0, n1]`` is the coefficient of the number state with n0
    photons in mode 0 and n1 in mode 1; after a beam splitter the axes read as
    the upper (axis 0) and lower (axis 1) arm modes.
    """

    cutoff: int
    amplitudes: np.ndarray
    truncated_norm: float


@dataclass(frozen=True, eq=False)
class SectorBlock:
    """Explicit beam-splitter unitary restricted to one total-N sector."""

    total_n: int
    matrix: np.ndarray


def bs_angle(t: float) -> float:
    """Mixing angle of a beam splitter with (real) transmission ``t``."""
    return 2.0 * math.acos(min(1.0, max(0.0, t)))


def _gaussian_port_amplitudes(alpha: complex, z: float, squeeze_phase: float, cutoff: int) -> np.ndarray:
    """Fock amplitudes of a displaced squeezed state (coherent/vacuum as z, alpha -> 0).

    Uses the three-term recurrence implied by the displaced annihilation
    condition (cosh z * a + e^{i phi} sinh z * a^dag) |psi> = (cosh z * alpha
    + e^{i phi} sinh z * alpha^*) |psi>, seeded with the closed-form overlap
    with the vacuum.
    """
    mu = math.cosh(z)
    nu = math.sinh(z) * complex(math.cos(squeeze_phase), math.sin(squeeze_phase))
    amps = np.zeros(cutoff + 1, dtype=complex)
    c0 = np.exp(-0.5 * abs(alpha) ** 2 - (nu / (2.0 * mu)) * alpha.conjugate() ** 2) / math.sqrt(mu)
    amps[0] = c0
    if cutoff == 0:
        return amps
    drive = mu * alpha + nu * alpha.conjugate()
    amps[1] = drive * amps[0] / mu
    for n in range(1, cutoff):
        amps[n + 1] = (drive * amps[n] - nu * math.sqrt(n) * amps[n - 1]) / (mu * math.sqrt(n + 1))
    return amps


def _port_amplitudes(state: PortState, cutoff: int) -> np.ndarray:
    if isinstance(state, Fock):
        amps = np.zeros(cutoff + 1, dtype=complex)
        if state.n > cutoff:
            raise CutoffTooSmall(f"Fock state |{state.n}> needs cutoff >= {state.n}")
        amps[state.n] = 1.0
        return amps
    if isinstance(state, Vacuum):
        return _gaussian_port_amplitudes(0j, 0.0, 0.0, cutoff)
    if isinstance(state, Coherent):
        return _gaussian_port_amplitudes(state.amp.value, 0.0, 0.0, cutoff)
    if isinstance(state, SqueezedVacuum):
        return _gaussian_port_amplitudes(0j, state.squeeze.factor, state.squeeze.phase, cutoff)
    if isinstance(state, SqueezedCoherent):
        return _gaussian_port_amplitudes(
            state.amp.value, state.squeeze.factor, state.squeeze.phase, cutoff
        )
    raise TypeError(f"unknown port state {state!r}")


# Photon-number tail weight kept below ~e^-31 per port so that even the
# N^2-weighted second moments of incompletely covered sectors stay under 1e-9.
_TAIL_NATS = 31.0


def _port_tail_cutoff(state: PortState) -> int:
    """Photons needed to push one port's number tail below ~e^-31.

    Squeezed components decay geometrically in the photon number (ratio
    tanh z per photon), far slower than the sub-Gaussian mean + 8 sigma rule,
    so they get an explicit geometric-tail term on top of it.
    """
    if isinstance(state, Fock):
        return state.n
    m = mode_moments(state)
    bound = math.ceil(m.mean_n + 8.0 * math.sqrt(max(m.var_n, 0.0)) + 10.0)
    z = 0.0
    mag = abs(m.mean_a)
    if isinstance(state, (SqueezedVacuum, SqueezedCoherent)):
        z = state.squeeze.factor
    if z > 0.0:
        geometric = _TAIL_NATS / -math.log(math.tanh(z))
        bound = max(bound, math.ceil(geometric + mag * mag + 8.0 * mag + 12.0))
    return bound


def default_cutoff(spec: InputStateSpec) -> int:
    """Cutoff covering the *total* photon-number tail of the input state.

    Per-port tail cutoffs are summed so that every total-N sector with
    non-negligible weight lies completely inside the grid: the beam splitter
    rotates each sector within the grid, so sectors that stick out past a
    corner would otherwise be rotated on a clipped block.  The truncated-norm
    gate downstream remains the check of record.
    """
    if spec.is_separable:
        return max(20, _port_tail_cutoff(spec.port0) + _port_tail_cutoff(spec.port1))
    r = spec.twin_beam_squeeze.factor
    q = math.tanh(r) ** 2
    if q <= 0.0:
        return 20
    # Twin-beam weight sits on (n, n); sector N = 2n demands twice the
    # geometric tail bound of the per-mode marginal.
    per_mode = math.ceil(
        math.log(math.exp(-_TAIL_NATS) * (1.0 - q) * math.cosh(r) ** 2) / math.log(q)
    )
    return max(20, 2 * per_mode)


def build_state(spec: InputStateSpec, cutoff: int) -> FockVector:
    """Truncated Fock expansion of an input spec.

    Raises :class:`CutoffTooSmall` when less than 99% of the norm survives;
    attaches a :class:`TruncationWarning` when the loss exceeds 1e-10.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    if spec.is_separable:
        amps = np.outer(_port_amplitudes(spec.port0, cutoff), _port_amplitudes(spec.port1, cutoff))
    else:
        sq = spec.twin_beam_squeeze
        r, theta = sq.factor, sq.phase
        ratio = -math.tanh(r) * complex(math.cos(theta), math.sin(theta))
        diag = ratio ** np.arange(cutoff + 1) / math.cosh(r)
        amps = np.diag(diag)
    norm = float(np.sum(np.abs(amps) ** 2))
    if norm < NORM_GATE:
        raise CutoffTooSmall(f"truncated norm {norm:.6f} < {NORM_GATE} at cutoff {cutoff}")
    if norm < NORM_WARN:
        warnings.warn(
            f"truncated norm {norm:.15f} below {NORM_WARN}", TruncationWarning, stacklevel=2
        )
    return FockVector(cutoff, amps, norm)


@lru_cache(maxsize=4096)
def _sector_eigh(total_n: int, kmin: int, kmax: int):
    # J_x restricted to the states |k, N-k| with kmin <= k <= kmax is a real
    # symmetric tridiagonal matrix with zero diagonal.
    ks = np.arange(kmin, kmax)
    off = 0.5 * np.sqrt((ks + 1.0) * (total_n - ks))
    w, v = eigh_tridiagonal(np.zeros(kmax - kmin + 1), off)
    return w, v


def sector_block(total_n: int, theta: float, cutoff: int) -> SectorBlock:
    """Explicit e^{i theta J_x} on the (possibly truncated) total-N sector."""
    kmin, kmax = max(0, total_n - cutoff), min(total_n, cutoff)
    if kmax == kmin:
        return SectorBlock(total_n, np.ones((1, 1), dtype=complex))
    w, v = _sector_eigh(total_n, kmin, kmax)
    u = (v * np.exp(1j * theta * w)) @ v.T
    return SectorBlock(total_n, u)


def apply_bs(state: FockVector, theta: float) -> FockVector:
    """Apply the beam-splitter unitary e^{i theta J_x} sector by sector.

    J_x commutes with the total photon number, so the unitary never mixes
    different total-N sectors; each sector is exponentiated through the
    spectral decomposition of its real symmetric tridiagonal block.
    """
    c = state.cutoff
    amps = state.amplitudes.copy()
    for total_n in range(1, 2 * c + 1):
        kmin, kmax = max(0, total_n - c), min(total_n, c)
        if kmax == kmin:
            continue
        ks = np.arange(kmin, kmax + 1)
        w, v = _sector_eigh(total_n, kmin, kmax)
        vec = amps[ks, total_n - ks]
        amps[ks, total_n - ks] = v @ (np.exp(1j * theta * w) * (v.T @ vec))
    return FockVector(c, amps, state.truncated_norm)


def apply_phases(state: FockVector, phi1: float, phi2: float) -> FockVector:
    """Phase shifts on the interferometer arms.

    Axis 0 of the amplitude grid is the upper arm (receives phi1), axis 1 the
    lower arm (receives phi2); each amplitude picks up
    e^{-i (phi1 n_upper + phi2 n_lower)}.
    """
    n = np.arange(state.cutoff + 1)
    factor = np.exp(-1j * phi1 * n)[:, None] * np.exp(-1j * phi2 * n)[None, :]
    return FockVector(state.cutoff, state.amplitudes * factor, state.truncated_norm)


def _number_weights(state: FockVector):
    w = np.abs(state.amplitudes) ** 2 / state.truncated_norm
    n = np.arange(state.cutoff + 1, dtype=float)
    return w, n[:, None], n[None, :]


def oracle_fisher(state_after_bs: FockVector):
    """Fisher matrix elements from diagonal operators on the amplitude grid.

    The generators are exactly diagonal in the post-beam-splitter number
    basis (total N/2 for the sum phase, J_z for the difference), so no
    differentiation is involved.
    """
    from .fisher_core import FisherMatrix

    w, n0, n1 = _number_weights(state_after_bs)
    total = n0 + n1
    jz = 0.5 * (n0 - n1)
    mean_n = float((w * total).sum())
    mean_jz = float((w * jz).sum())
    f_ss = float((w * total**2).sum()) - mean_n**2
    f_dd = 4.0 * (float((w * jz**2).sum()) - mean_jz**2)
    f_sd = 2.0 * (float((w * total * jz).sum()) - mean_n * mean_jz)
    return FisherMatrix(max(f_ss, 0.0), max(f_dd, 0.0), f_sd)


def oracle_single_phase_qfi(state_after_bs: FockVector) -> tuple[float, float]:
    """(lower-arm, upper-arm) single-phase QFIs, 4 * variance of the arm number.

    Computed directly from the arm-number marginals, independently of the
    Fisher-matrix combination they must equal.
    """
    w, n0, n1 = _number_weights(state_after_bs)
    var_lower = float((w * n1**2).sum()) - float((w * n1).sum()) ** 2
    var_upper = float((w * n0**2).sum()) - float((w * n0).sum()) ** 2
    return 4.0 * max(var_lower, 0.0), 4.0 * max(var_upper, 0.0)


def _require_norm(state: FockVector):
    if state.truncated_norm < NORM_WARN:
        raise CutoffTooSmall(
            f"truncated norm {state.truncated_norm:.15f} < {NORM_WARN}; raise the cutoff"
        )


def oracle_mode_moments(state: PortState, cutoff: int) -> ModeMoments:
    """Single-mode moments recomputed by explicit ladder-operator action."""
    vec = _port_amplitudes(state, cutoff)
    norm = float(np.sum(np.abs(vec) ** 2))
    if norm < NORM_WARN:
        raise CutoffTooSmall(f"truncated norm {norm:.15f} < {NORM_WARN}")
    n = np.arange(cutoff + 1, dtype=float)
    root = np.sqrt(n[1:])
    w = np.abs(vec) ** 2 / norm
    mean_n = float((w * n).sum())
    var_n = float((w * n**2).sum()) - mean_n**2
    mean_a = complex(np.sum(vec[:-1].conjugate() * root * vec[1:])) / norm
    root2 = np.sqrt(n[2:] * (n[2:] - 1.0))
    mean_a2 = complex(np.sum(vec[:-2].conjugate() * root2 * vec[2:])) / norm
    # <a^dag n>: pair amp[k+1] against n-weighted amp[k]
    adag_n = complex(np.sum(vec[1:].conjugate() * root * n[:-1] * vec[:-1])) / norm
    return ModeMoments(mean_a, mean_a2, mean_n, max(var_n, 0.0), adag_n - mean_a.conjugate() * mean_n)


def oracle_moments(spec: InputStateSpec, cutoff: int) -> JointMoments:
    """Joint moments recomputed by explicit ladder-operator action on the grid."""
    state = build_state(spec, cutoff)
    _require_norm(state)
    amp = state.amplitudes
    norm = state.truncated_norm
    c = state.cutoff
    w, n0, n1 = _number_weights(state)
    mean_n0 = float((w * n0).sum())
    mean_n1 = float((w * n1).sum())
    var_n0 = float((w * n0**2).sum()) - mean_n0**2
    var_n1 = float((w * n1**2).sum()) - mean_n1**2
    cov = float((w * n0 * n1).sum()) - mean_n0 * mean_n1

    up = np.sqrt(np.arange(1.0, c + 1.0))
    pair1 = up[:, None] * up[None, :]  # sqrt((i+1) j) at [i, j-1]
    cross_a0d_a1 = complex(np.sum(amp[1:, :-1].conjugate() * pair1 * amp[:-1, 1:])) / norm
    i_mid = np.arange(0.0, c)[:, None]
    cross_a0d_n0_a1 = (
        complex(np.sum(amp[1:, :-1].conjugate() * pair1 * i_mid * amp[:-1, 1:])) / norm
    )
    j_mid = np.arange(0.0, c)[None, :]
    cross_a0_a1d_n1 = (
        complex(np.sum(amp[:-1, 1:].conjugate() * pair1 * j_mid * amp[1:, :-1])) / norm
    )
    up2 = np.sqrt(np.arange(1.0, c) * np.arange(2.0, c + 1.0))
    pair2 = up2[:, None] * up2[None, :]
    cross_a0d2_a12 = complex(np.sum(amp[2:, :-2].conjugate() * pair2 * amp[:-2, 2:])) / norm

    return JointMoments(
        mean_n0=mean_n0,
        mean_n1=mean_n1,
        var_n0=max(var_n0, 0.0),
        var_n1=max(var_n1, 0.0),
        cov_n0n1=cov,
        cross_a0d_a1=cross_a0d_a1,
        cross_a0d2_a12=cross_a0d2_a12,
        cross_a0d_n0_a1=cross_a0d_n0_a1,
        cross_a0_a1d_n1=cross_a0_a1d_n1,
    )


def full_mzi_fisher(
    spec: InputStateSpec,
    t: float,
    t_prime: float,
    phi1: float = 0.0,
    phi2: float = 0.0,
    cutoff: int | None = None,
    step: float = 1e-5,
):
    """Fisher matrix of the full interferometer (second beam splitter included).

    The output state is differentiated numerically with respect to the sum and
    difference phases (central differences); unlike :func:`oracle_fisher`
    nothing here relies on the second beam splitter dropping out.
    """
    from .fisher_core import FisherMatrix

    if cutoff is None:
        cutoff = default_cutoff(spec)
    after_bs1 = apply_bs(build_state(spec, cutoff), bs_angle(t))
    theta2 = bs_angle(t_prime)

    def output(phi_s: float, phi_d: float) -> np.ndarray:
        shifted = apply_phases(after_bs1, 0.5 * (phi_s + phi_d), 0.5 * (phi_s - phi_d))
        return apply_bs(shifted, theta2).amplitudes.ravel()

    s0, d0 = phi1 + phi2, phi1 - phi2
    psi0 = output(s0, d0)
    ds = (output(s0 + step, d0) - output(s0 - step, d0)) / (2.0 * step)
    dd = (output(s0, d0 + step) - output(s0, d0 - step)) / (2.0 * step)

    def element(left: np.ndarray, right: np.ndarray) -> float:
        direct = np.vdot(left, right)
        gauge = np.vdot(left, psi0) * np.vdot(psi0, right)
        return 4.0 * float((direct - gauge).real)

    return FisherMatrix(
        max(element(ds, ds), 0.0), max(element(dd, dd), 0.0), element(ds, dd)
    )


def bs2_invariance_check(
    spec: InputStateSpec,
    t: float,
    t_prime_list,
    phi1: float = 0.0,
    phi2: float = 0.0,
    cutoff: int | None = None,
) -> float:
    """Maximum spread of any Fisher matrix element across second-BS choices.

    A value at numerical-derivative noise level demonstrates that the second
    beam splitter cannot change any of the Fisher quantities.
    """
    triples = [
        full_mzi_fisher(spec, t, tp, phi1, phi2, cutoff=cutoff) for tp in t_prime_list
    ]
    deviation = 0.0
    for pick in (lambda f: f.f_ss, lambda f: f.f_dd, lambda f: f.f_sd):
        values = [pick(f) for f in triples]
        deviation = max(deviation, max(values) - min(values))
    return deviation
