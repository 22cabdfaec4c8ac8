"""Fisher matrix elements, the three QFIs and their polynomial coefficients.

Everything here is an explicit function of the first beam splitter's (real)
transmission t in [0, 1]; with chi = t*sqrt(1-t^2) and d = 2t^2 - 1 the
matrix elements read

    F_ss = v_plus + v_cov                                  (t-independent)
    F_dd = b + chi^2 (a - 4b) - 2 chi d s_plus,  b = v_plus - v_cov
    F_sd = d v_minus - chi (p + s_minus)

and the QFIs follow as F_2p = F_dd - F_sd^2/F_ss (with the F_ss -> 0 limit
F_dd), F_i = F_ss + F_dd -/+ 2 F_sd for the lower/upper-arm single-phase
conventions, and F_ii = F_dd.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ComputationIntegrityError, DegenerateFss, NonPositiveFisher
from .shorthand import ShorthandCoeffs

EPS_ZERO = 1e-12


class QfiSelector(str, Enum):
    """Which QFI a sweep or optimization targets."""

    TWO_PARAM = "2p"
    ASYM = "i"
    ASYM_UPPER = "i_upper"
    SYM = "ii"


class BundleKind(str, Enum):
    TWO_PARAM = "two_param"
    ASYM = "asym"
    SYM = "sym"


@dataclass(frozen=True)
class Transmission:
    """Real first-beam-splitter transmission, reflection fixed to i*sqrt(1-t^2)."""

    t: float

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"transmission must lie in [0, 1], got {self.t}")

    @property
    def tr_abs(self) -> float:
        """|TR| = t sqrt(1 - t^2), in [0, 1/2]."""
        return self.t * math.sqrt(1.0 - self.t * self.t)

    @property
    def balance(self) -> float:
        """|T|^2 - |R|^2 = 2t^2 - 1."""
        return 2.0 * self.t * self.t - 1.0

    @classmethod
    def balanced(cls) -> "Transmission":
        return cls(math.sqrt(0.5))


@dataclass(frozen=True)
class FisherMatrix:
    """Sum/difference phase Fisher matrix (the sd element is its off-diagonal)."""

    f_ss: float
    f_dd: float
    f_sd: float

    def __post_init__(self):
        scale = max(1.0, self.f_ss, self.f_dd)
        if self.f_ss < -1e-10 * scale or self.f_dd < -1e-10 * scale:
            raise ComputationIntegrityError("diagonal Fisher elements must be non-negative")
        if self.f_ss * self.f_dd - self.f_sd**2 < -1e-9 * scale * scale:
            raise ComputationIntegrityError("Fisher matrix lost positive semidefiniteness")


@dataclass(frozen=True)
class QfiBreakdown:
    """All QFIs of one state at one transmission."""

    f_2p: float
    f_i: float
    f_i_upper: float
    f_ii: float
    matrix: FisherMatrix


@dataclass(frozen=True)
class CoeffBundle:
    """Polynomial coefficients of one QFI in the beam splitter variables.

    Three coefficients (two-parameter and symmetric forms) drive
    c0 + c1 chi^2 + c2 chi d; the asymmetric form appends + c3 d + c4 chi.
    """

    kind: BundleKind
    coeffs: tuple[float, ...]

    def evaluate(self, t):
        """Evaluate the polynomial form at t (scalar or array)."""
        t = np.asarray(t, dtype=float)
        chi = t * np.sqrt(1.0 - t * t)
        d = 2.0 * t * t - 1.0
        c = self.coeffs
        value = c[0] + c[1] * chi * chi + c[2] * chi * d
        if self.kind is BundleKind.ASYM:
            value = value + c[3] * d + c[4] * chi
        return value if value.ndim else float(value)


def _t_value(t) -> float:
    return t.t if isinstance(t, Transmission) else float(t)


def _profile(sh: ShorthandCoeffs, ts: np.ndarray):
    """Vectorized matrix elements and QFIs over an array of transmissions."""
    chi = ts * np.sqrt(np.clip(1.0 - ts * ts, 0.0, None))
    d = 2.0 * ts * ts - 1.0
    b = sh.v_plus - sh.v_cov
    f_ss = sh.v_plus + sh.v_cov
    f_dd = b + chi * chi * (sh.a_coeff - 4.0 * b) - 2.0 * chi * d * sh.s_plus
    f_sd = d * sh.v_minus - chi * (sh.p_coeff + sh.s_minus)
    if f_ss > EPS_ZERO * sh.scale:
        f_2p = f_dd - f_sd * f_sd / f_ss
    else:
        # Vanishing total-photon-number variance forces F_sd = 0 as well; the
        # 0/0 limit of the two-parameter QFI is F_dd itself.
        f_2p = f_dd.copy()
    f_i = f_ss + f_dd - 2.0 * f_sd
    f_i_upper = f_ss + f_dd + 2.0 * f_sd
    return f_ss, f_dd, f_sd, f_2p, f_i, f_i_upper


def qfi_curve(sh: ShorthandCoeffs, ts, selector: QfiSelector) -> np.ndarray:
    """One QFI evaluated over an array of transmissions."""
    ts = np.asarray(ts, dtype=float)
    _, f_dd, _, f_2p, f_i, f_i_upper = _profile(sh, ts)
    if selector is QfiSelector.TWO_PARAM:
        return f_2p
    if selector is QfiSelector.ASYM:
        return f_i
    if selector is QfiSelector.ASYM_UPPER:
        return f_i_upper
    return f_dd


def fisher_matrix(sh: ShorthandCoeffs, t) -> FisherMatrix:
    """Fisher matrix elements at one transmission."""
    ts = np.array([_t_value(Transmission(_t_value(t)))])
    f_ss, f_dd, f_sd, *_ = _profile(sh, ts)
    if f_dd[0] < -1e-10 * sh.scale:
        raise ComputationIntegrityError(f"F_dd = {f_dd[0]:.3e} below zero beyond tolerance")
    return FisherMatrix(float(f_ss), float(f_dd[0]), float(f_sd[0]))


def qfi_all(sh: ShorthandCoeffs, t) -> QfiBreakdown:
    """All QFIs of one state at one transmission."""
    matrix = fisher_matrix(sh, t)
    ts = np.array([_t_value(Transmission(_t_value(t)))])
    _, _, _, f_2p, f_i, f_i_upper = _profile(sh, ts)
    if f_2p[0] < -1e-9 * sh.scale:
        raise ComputationIntegrityError(f"F_2p = {f_2p[0]:.3e} below zero beyond tolerance")
    return QfiBreakdown(
        f_2p=max(float(f_2p[0]), 0.0),
        f_i=float(f_i[0]),
        f_i_upper=float(f_i_upper[0]),
        f_ii=matrix.f_dd,
        matrix=matrix,
    )


def coeff_bundle(sh: ShorthandCoeffs, kind: BundleKind) -> CoeffBundle:
    """Polynomial coefficients of the selected QFI.

    The two-parameter coefficients divide by F_ss; when that variance is zero
    at scaled tolerance a :class:`DegenerateFss` is raised and callers must
    take the difference-difference limit (:func:`two_param_limit_bundle`).
    """
    b = sh.v_plus - sh.v_cov
    cross = sh.p_coeff + sh.s_minus
    if kind is BundleKind.ASYM:
        return CoeffBundle(
            kind,
            (2.0 * sh.v_plus, sh.a_coeff - 4.0 * b, -2.0 * sh.s_plus, -2.0 * sh.v_minus, 2.0 * cross),
        )
    if kind is BundleKind.SYM:
        return CoeffBundle(kind, (b, sh.a_coeff - 4.0 * b, -2.0 * sh.s_plus))
    f_ss = sh.v_plus + sh.v_cov
    if f_ss <= EPS_ZERO * sh.scale:
        raise DegenerateFss("total photon-number variance vanishes")
    return CoeffBundle(
        kind,
        (
            b - sh.v_minus**2 / f_ss,
            sh.a_coeff - 4.0 * b + (4.0 * sh.v_minus**2 - cross**2) / f_ss,
            2.0 * (-sh.s_plus + cross * sh.v_minus / f_ss),
        ),
    )


def two_param_limit_bundle(sh: ShorthandCoeffs) -> CoeffBundle:
    """Two-parameter coefficients in the vanishing-F_ss limit (pure F_dd)."""
    b = sh.v_plus - sh.v_cov
    return CoeffBundle(BundleKind.TWO_PARAM, (b, sh.a_coeff - 4.0 * b, -2.0 * sh.s_plus))


def qcrb(f: float, repetitions: int = 1) -> float:
    """Phase-sensitivity lower bound 1/sqrt(repetitions * f)."""
    if not isinstance(repetitions, int) or repetitions < 1:
        raise ValueError(f"repetitions must be a positive integer, got {repetitions}")
    if f <= 0.0:
        raise NonPositiveFisher(f"Fisher information must be positive, got {f}")
    return 1.0 / math.sqrt(repetitions * f)


class Advantage(Enum):
    """Whether an external phase reference can help at any transmission."""

    NONE_FOR_FI = "none_for_fi"
    NONE_FOR_FII = "none_for_fii"
    NEITHER = "neither"


def no_advantage_classify(sh: ShorthandCoeffs) -> Advantage:
    """Classify the input state's no-advantage conditions.

    The asymmetric conditions imply the symmetric ones, so NONE_FOR_FI is
    reported whenever it holds even though NONE_FOR_FII then holds too.
    """
    tol = EPS_ZERO * sh.scale
    sym = abs(sh.v_minus) <= tol and abs(sh.s_minus + sh.p_coeff) <= tol
    if sym and abs(sh.v_plus + sh.v_cov) <= tol:
        return Advantage.NONE_FOR_FI
    if sym:
        return Advantage.NONE_FOR_FII
    return Advantage.NEITHER
