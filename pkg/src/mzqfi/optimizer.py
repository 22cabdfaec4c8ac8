"""Closed-form maximization of each QFI over the first-BS transmission.

Each optimizer walks the analytic case tree for its coefficient bundle to
produce a branch label and candidate transmissions, then evaluates the actual
QFI at every candidate plus {0, 1/sqrt(2), 1} and returns the argmax: the
branch supplies the label, the evaluation supplies the guarantee.  A dense
grid scan is provided as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AllCoeffsZero, DegenerateFss
from .fisher_core import (
    EPS_ZERO,
    BundleKind,
    CoeffBundle,
    QfiSelector,
    coeff_bundle,
    qfi_curve,
    two_param_limit_bundle,
)
from .shorthand import ShorthandCoeffs

BALANCED_T = math.sqrt(0.5)
_STANDARD_CANDIDATES = (0.0, BALANCED_T, 1.0)


@dataclass(frozen=True)
class OptimizationReport:
    """Outcome of one QFI maximization.

    ``t_opt`` is ``None`` when the QFI is constant and the transmission is
    irrelevant; otherwise it attains ``f_max`` among ``candidates``.
    """

    t_opt: float | None
    f_max: float
    case_label: str
    candidates: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class QuarticCoeffs:
    """Coefficients a4 x^4 + a3 x^3 + a2 x^2 + a1 x + a0 of the stationarity equation."""

    a4: float
    a3: float
    a2: float
    a1: float
    a0: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a4, self.a3, self.a2, self.a1, self.a0], dtype=float)


def solve_quartic(q: QuarticCoeffs) -> list[float]:
    """All real roots in [-1, 1], polished to 1e-10 absolute accuracy.

    Degree degeneration (vanishing leading coefficients) cascades to the
    cubic/quadratic/linear problem.  Roots come from the companion matrix and
    are refined by Newton steps on the exact polynomial; any candidate whose
    polished residual stays above 1e-9 relative to the coefficient scale is
    discarded as a spurious eigenvalue.
    """
    coeffs = q.as_array()
    scale = float(np.max(np.abs(coeffs)))
    if scale == 0.0:
        raise AllCoeffsZero("all quartic coefficients vanish")
    work = coeffs / scale
    significant = np.nonzero(np.abs(work) > 1e-14)[0]
    work = work[significant[0] :]
    if work.size <= 1:
        return []
    raw = np.roots(work)
    candidates = [float(r.real) for r in raw if abs(r.imag) <= 1e-6 * (1.0 + abs(r.real))]

    deriv = np.polyder(work)
    roots: list[float] = []
    for x in candidates:
        for _ in range(80):
            fx = float(np.polyval(work, x))
            fpx = float(np.polyval(deriv, x))
            if fpx == 0.0:
                break
            step = fx / fpx
            x -= step
            if abs(step) <= 1e-16 * (1.0 + abs(x)):
                break
        if abs(x) > 1.0 + 1e-8:
            continue
        x = min(1.0, max(-1.0, x))
        if abs(float(np.polyval(work, x))) > 1e-9:
            continue
        if not any(abs(x - seen) <= 1e-8 for seen in roots):
            roots.append(x)
    return sorted(roots)


def _argmax_report(
    sh: ShorthandCoeffs,
    selector: QfiSelector,
    analytic: list[float],
    label: str,
    irrelevant: bool = False,
) -> OptimizationReport:
    """Evaluate analytic candidates plus the standard trio and take the argmax.

    Candidates are ordered analytic-first so that exact ties resolve to the
    branch's own prediction.
    """
    ts: list[float] = []
    for cand in list(analytic) + list(_STANDARD_CANDIDATES):
        if not math.isfinite(cand):
            continue
        cand = min(1.0, max(0.0, cand))
        if not any(abs(cand - seen) <= 1e-15 for seen in ts):
            ts.append(cand)
    values = qfi_curve(sh, np.array(ts), selector)
    best = 0
    for i in range(1, len(ts)):
        if values[i] > values[best]:
            best = i
    candidates = tuple((ts[i], float(values[i])) for i in range(len(ts)))
    return OptimizationReport(
        t_opt=None if irrelevant else ts[best],
        f_max=float(values[best]),
        case_label=label,
        candidates=candidates,
    )


def _optimize_three_term(
    sh: ShorthandCoeffs, bundle: CoeffBundle, selector: QfiSelector, prefix: str
) -> OptimizationReport:
    """Shared case analysis for the three-coefficient (2p / symmetric) forms."""
    c0, c1, c2 = bundle.coeffs
    tol = EPS_ZERO * sh.scale
    if abs(c1) <= tol and abs(c2) <= tol:
        return _argmax_report(sh, selector, [], f"{prefix}.Irrelevant", irrelevant=True)
    if abs(c2) <= tol:
        if c1 > 0.0:
            return _argmax_report(sh, selector, [BALANCED_T], f"{prefix}.C1PosC2Zero")
        return _argmax_report(sh, selector, [0.0, 1.0], f"{prefix}.C1NegC2Zero")
    # General case: stationary |TR|^2 = 1/8 +/- |c1| / (8 sqrt(c1^2 + 4 c2^2));
    # the predicted optimum comes first, its three sign mirrors ride along as
    # cheap insurance against branch-boundary misclassification.
    norm = math.sqrt(c1 * c1 + 4.0 * c2 * c2)
    sgn_c1 = 0.0 if abs(c1) <= tol else math.copysign(1.0, c1)
    sgn_c2 = math.copysign(1.0, c2)
    inner_opt = math.sqrt(max(0.0, 0.5 - sgn_c1 * abs(c1) / (2.0 * norm)))
    inner_alt = math.sqrt(max(0.0, 0.5 + sgn_c1 * abs(c1) / (2.0 * norm)))
    analytic = [
        math.sqrt(0.5 * (1.0 + sgn_c2 * inner_opt)),
        math.sqrt(0.5 * (1.0 - sgn_c2 * inner_opt)),
        math.sqrt(0.5 * (1.0 + sgn_c2 * inner_alt)),
        math.sqrt(0.5 * (1.0 - sgn_c2 * inner_alt)),
    ]
    return _argmax_report(sh, selector, analytic, f"{prefix}.General")


def optimize_2p(sh: ShorthandCoeffs) -> OptimizationReport:
    """Maximize the two-parameter QFI over the transmission."""
    try:
        bundle = coeff_bundle(sh, BundleKind.TWO_PARAM)
        prefix = "TwoParam"
    except DegenerateFss:
        bundle = two_param_limit_bundle(sh)
        prefix = "TwoParam.FssZero"
    return _optimize_three_term(sh, bundle, QfiSelector.TWO_PARAM, prefix)


def optimize_ii(sh: ShorthandCoeffs) -> OptimizationReport:
    """Maximize the symmetric single-parameter QFI (same form, double-primed coefficients)."""
    bundle = coeff_bundle(sh, BundleKind.SYM)
    return _optimize_three_term(sh, bundle, QfiSelector.SYM, "Sym")


def _quartic_candidates(c1: float, c2: float, c3: float, c4: float) -> list[float]:
    """Transmissions solving the general stationarity quartic in chi = |TR|."""
    q = QuarticCoeffs(
        a4=16.0 * (c1 * c1 + 4.0 * c2 * c2),
        a3=16.0 * (4.0 * c2 * c3 + c1 * c4),
        a2=4.0 * (4.0 * c3 * c3 - 4.0 * c2 * c2 - c1 * c1 + c4 * c4),
        a1=-4.0 * (2.0 * c2 * c3 + c1 * c4),
        a0=c2 * c2 - c4 * c4,
    )
    ts: list[float] = []
    for chi in solve_quartic(q):
        if not -1e-9 <= chi <= 0.5 + 1e-9:
            continue
        chi = min(0.5, max(0.0, chi))
        # chi fixes |TR| but not which of |T| > |R| / |T| < |R| holds; both
        # are kept and the evaluation step discards the wrong one.
        root = math.sqrt(max(0.0, 1.0 - 4.0 * chi * chi))
        ts.append(math.sqrt(0.5 * (1.0 + root)))
        ts.append(math.sqrt(0.5 * (1.0 - root)))
    return ts


def optimize_i(sh: ShorthandCoeffs) -> OptimizationReport:
    """Maximize the asymmetric single-parameter QFI over the transmission."""
    bundle = coeff_bundle(sh, BundleKind.ASYM)
    _, c1, c2, c3, c4 = bundle.coeffs
    tol = EPS_ZERO * sh.scale
    sel = QfiSelector.ASYM

    if abs(c2) <= tol and abs(c4) <= tol:
        if abs(c3) <= tol:
            if abs(c1) <= tol:
                return _argmax_report(sh, sel, [], "Asym.Irrelevant", irrelevant=True)
            if c1 > 0.0:
                return _argmax_report(sh, sel, [BALANCED_T], "Asym.C1PosC3Zero")
            return _argmax_report(sh, sel, [0.0, 1.0], "Asym.C1NegC3Zero")
        lo = c1 - 2.0 * c3  # >= 0 iff the t=1 side admits the interior optimum
        hi = c1 + 2.0 * c3  # >= 0 iff the t=0 side does
        if c1 > tol and lo >= -tol and hi >= -tol:
            t_sq = min(1.0, max(0.0, 0.5 + c3 / c1))
            return _argmax_report(sh, sel, [math.sqrt(t_sq)], "Asym.Interior")
        if lo >= -tol and hi < -tol:
            return _argmax_report(sh, sel, [0.0], "Asym.DegenerateT0")
        if lo < -tol and hi >= -tol:
            return _argmax_report(sh, sel, [1.0], "Asym.DegenerateT1")
        primary = 0.0 if c3 < 0.0 else 1.0
        return _argmax_report(sh, sel, [primary, 1.0 - primary], "Asym.DegenerateEndpoints")

    if abs(c1) <= tol and abs(c2) <= tol:
        if c4 > tol:
            t_sq = 0.5 + c3 / math.sqrt(4.0 * c3 * c3 + c4 * c4)
            return _argmax_report(
                sh, sel, [math.sqrt(min(1.0, max(0.0, t_sq)))], "Asym.MixedInterior"
            )
        primary = 0.0 if c3 < 0.0 else 1.0
        return _argmax_report(sh, sel, [primary, 1.0 - primary], "Asym.MixedDegenerate")

    return _argmax_report(sh, sel, _quartic_candidates(c1, c2, c3, c4), "Asym.GeneralQuartic")


def grid_verify(
    sh: ShorthandCoeffs, selector: QfiSelector, points: int = 100_000
) -> tuple[float, float]:
    """Dense uniform scan over t in [0, 1]; the independent optimum check.

    The scan stays evaluation-only (no case analysis), but the returned
    maximum is sharpened by rescanning ever narrower brackets around the best
    grid point: near t -> 1 the QFI's slope in t diverges like
    1/sqrt(1 - t^2), so a uniform grid alone cannot certify edge-hugging
    optima to the accuracy this check is used at.
    """
    if points < 1000:
        raise ValueError(f"grid scan needs at least 1000 points, got {points}")
    ts = np.linspace(0.0, 1.0, points)
    values = qfi_curve(sh, ts, selector)
    best = int(np.argmax(values))
    lo = ts[max(0, best - 1)]
    hi = ts[min(points - 1, best + 1)]
    t_best, f_best = float(ts[best]), float(values[best])
    for _ in range(5):
        local_ts = np.linspace(lo, hi, 401)
        local_values = qfi_curve(sh, local_ts, selector)
        i = int(np.argmax(local_values))
        if local_values[i] > f_best:
            t_best, f_best = float(local_ts[i]), float(local_values[i])
        lo = local_ts[max(0, i - 1)]
        hi = local_ts[min(400, i + 1)]
    return t_best, f_best


def optimize(sh: ShorthandCoeffs, selector: QfiSelector) -> OptimizationReport:
    """Dispatch to the optimizer matching a QFI selector.

    The upper-arm convention flips the sign of the sum-difference matrix
    element, which amounts to negating v_minus, s_minus and p_coeff; the
    asymmetric case analysis then applies unchanged.
    """
    if selector is QfiSelector.TWO_PARAM:
        return optimize_2p(sh)
    if selector is QfiSelector.ASYM:
        return optimize_i(sh)
    if selector is QfiSelector.SYM:
        return optimize_ii(sh)
    flipped = ShorthandCoeffs(
        v_plus=sh.v_plus,
        v_minus=-sh.v_minus,
        v_cov=sh.v_cov,
        a_coeff=sh.a_coeff,
        s_plus=sh.s_plus,
        s_minus=-sh.s_minus,
        p_coeff=-sh.p_coeff,
    )
    report = optimize_i(flipped)
    return OptimizationReport(
        t_opt=report.t_opt,
        f_max=report.f_max,
        case_label=report.case_label.replace("Asym.", "AsymUpper."),
        candidates=report.candidates,
    )
