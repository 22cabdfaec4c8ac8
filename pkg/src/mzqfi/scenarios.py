"""Scenario configs and the runners behind the service endpoints and CLI.

A scenario names an input state, optional phase-matching overrides, a
transmission sweep and the QFIs of interest.  Runners are deterministic:
identical configs produce identical output bytes, with all run metadata
confined to '#' comment lines ahead of the CSV header.
"""

from __future__ import annotations

import json
import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError
from .fisher_core import QfiSelector, qcrb, qfi_curve
from .optimizer import OptimizationReport, grid_verify, optimize
from .shorthand import ShorthandCoeffs, shorthand_for
from .state_catalog import (
    ComplexAmp,
    Coherent,
    Fock,
    InputStateSpec,
    SqueezeParam,
    SqueezedCoherent,
    SqueezedVacuum,
    Vacuum,
)

SCHEMA_VERSION = 1

SELECTOR_ORDER = (
    QfiSelector.TWO_PARAM,
    QfiSelector.ASYM,
    QfiSelector.ASYM_UPPER,
    QfiSelector.SYM,
)
_COLUMN_NAMES = {
    QfiSelector.TWO_PARAM: "f_2p",
    QfiSelector.ASYM: "f_i",
    QfiSelector.ASYM_UPPER: "f_i_upper",
    QfiSelector.SYM: "f_ii",
}
_QCRB_NAMES = {
    QfiSelector.TWO_PARAM: "qcrb_2p",
    QfiSelector.ASYM: "qcrb_i",
    QfiSelector.ASYM_UPPER: "qcrb_i_upper",
    QfiSelector.SYM: "qcrb_ii",
}

# Phase fields a PMC block may override, all in the active angle units.
PMC_KEYS = (
    "port0_amp_phase",
    "port1_amp_phase",
    "port0_squeeze_phase",
    "port1_squeeze_phase",
    "twin_beam_phase",
)


class PortModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["vacuum", "coherent", "fock", "squeezed_vacuum", "squeezed_coherent"]
    magnitude: Optional[float] = Field(None, ge=0.0, description="coherent amplitude |alpha|")
    phase: float = Field(0.0, description="coherent amplitude phase")
    n: Optional[int] = Field(None, ge=0, description="Fock photon count")
    squeeze_factor: Optional[float] = Field(None, ge=0.0)
    squeeze_phase: float = 0.0

    @model_validator(mode="after")
    def _check_fields(self):
        needs = {
            "vacuum": (),
            "coherent": ("magnitude",),
            "fock": ("n",),
            "squeezed_vacuum": ("squeeze_factor",),
            "squeezed_coherent": ("magnitude", "squeeze_factor"),
        }[self.type]
        for name in needs:
            if getattr(self, name) is None:
                raise ValueError(f"port type {self.type!r} requires field {name!r}")
        return self


class StateModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["separable", "tmsv"]
    port0: Optional[PortModel] = None
    port1: Optional[PortModel] = None
    squeeze_factor: Optional[float] = Field(None, ge=0.0, description="twin-beam squeeze")
    squeeze_phase: float = 0.0

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind == "separable":
            if self.port0 is None or self.port1 is None:
                raise ValueError("separable state requires port0 and port1")
        elif self.squeeze_factor is None:
            raise ValueError("tmsv state requires squeeze_factor")
        return self


class SweepModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t_min: float = Field(0.0, ge=0.0, le=1.0)
    t_max: float = Field(1.0, ge=0.0, le=1.0)
    points: int = Field(201, ge=2)

    @model_validator(mode="after")
    def _check_order(self):
        if self.t_min > self.t_max:
            raise ValueError("t_min must not exceed t_max")
        return self


class OracleModel(BaseModel):
    """Optional cross-checks attached to a run: dense-grid optimum deltas and,
    when a cutoff is given, brute-force Fisher comparisons at chosen t values."""

    model_config = ConfigDict(extra="forbid")

    cutoff: Optional[int] = Field(None, ge=1)
    t_values: list[float] = Field(default_factory=list)
    grid_points: int = Field(100_000, ge=1000)


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: int = SCHEMA_VERSION
    units: Literal["radians", "pi"] = "radians"
    state: StateModel
    pmc: Optional[dict[str, float]] = None
    sweep: SweepModel = Field(default_factory=SweepModel)
    qfis: list[Literal["2p", "i", "i_upper", "ii"]] = Field(
        default_factory=lambda: ["2p", "i", "ii"]
    )
    repetitions: int = Field(1, ge=1)
    oracle: Optional[OracleModel] = None

    @model_validator(mode="after")
    def _check(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {self.schema_version}")
        if not self.qfis:
            raise ValueError("qfis must select at least one QFI")
        if self.pmc:
            unknown = sorted(set(self.pmc) - set(PMC_KEYS))
            if unknown:
                raise ValueError(f"unknown pmc keys {unknown}; allowed: {list(PMC_KEYS)}")
        return self

    def selectors(self) -> list[QfiSelector]:
        chosen = {QfiSelector(q) for q in self.qfis}
        return [s for s in SELECTOR_ORDER if s in chosen]


def parse_config(data) -> ScenarioConfig:
    """Validate raw config data, mapping validation problems to ConfigError."""
    try:
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        return ScenarioConfig.model_validate(data)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    except ValidationError as exc:
        issues = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(issues) from exc


def _angle(value: float, units: str) -> float:
    return value * math.pi if units == "pi" else value


def _build_port(port: PortModel, amp_phase: float, squeeze_phase: float):
    if port.type == "vacuum":
        return Vacuum()
    if port.type == "fock":
        return Fock(port.n)
    if port.type == "coherent":
        return Coherent(ComplexAmp(port.magnitude, amp_phase))
    if port.type == "squeezed_vacuum":
        return SqueezedVacuum(SqueezeParam(port.squeeze_factor, squeeze_phase))
    return SqueezedCoherent(
        ComplexAmp(port.magnitude, amp_phase), SqueezeParam(port.squeeze_factor, squeeze_phase)
    )


def build_spec(config: ScenarioConfig) -> InputStateSpec:
    """Resolve a config (including PMC overrides and angle units) to a state spec."""
    pmc = config.pmc or {}
    units = config.units

    def resolved(key: str, fallback: float) -> float:
        return _angle(pmc[key], units) if key in pmc else _angle(fallback, units)

    state = config.state
    if state.kind == "tmsv":
        return InputStateSpec.twin_beam(
            SqueezeParam(state.squeeze_factor, resolved("twin_beam_phase", state.squeeze_phase))
        )
    port0 = _build_port(
        state.port0,
        resolved("port0_amp_phase", state.port0.phase),
        resolved("port0_squeeze_phase", state.port0.squeeze_phase),
    )
    port1 = _build_port(
        state.port1,
        resolved("port1_amp_phase", state.port1.phase),
        resolved("port1_squeeze_phase", state.port1.squeeze_phase),
    )
    return InputStateSpec.separable(port0, port1)


def canonical_config_json(config: ScenarioConfig) -> str:
    return json.dumps(config.model_dump(exclude_none=True), sort_keys=True, separators=(",", ":"))


def _fmt(x: float) -> str:
    return format(x, ".17g")


class SweepResult(BaseModel):
    columns: list[str]
    rows: list[list[Optional[float]]]  # non-finite entries (QCRB at zero QFI) are null
    csv: str


def run_sweep(config: ScenarioConfig) -> SweepResult:
    """Deterministic QFI/QCRB table over the configured transmission range."""
    spec = build_spec(config)
    sh = shorthand_for(spec)
    selectors = config.selectors()
    ts = np.linspace(config.sweep.t_min, config.sweep.t_max, config.sweep.points)
    columns = ["t"]
    data = [ts]
    for sel in selectors:
        values = qfi_curve(sh, ts, sel)
        bounds = np.where(
            values > 0.0, 1.0 / np.sqrt(config.repetitions * np.clip(values, 1e-300, None)), np.inf
        )
        columns += [_COLUMN_NAMES[sel], _QCRB_NAMES[sel]]
        data += [values, bounds]

    meta = [
        "# mzqfi sweep",
        f"# schema_version={SCHEMA_VERSION}",
        f"# config={canonical_config_json(config)}",
    ]
    if config.oracle is not None and config.oracle.cutoff is not None and config.oracle.t_values:
        meta.append(f"# oracle_max_rel_deviation={_fmt(_oracle_deviation(spec, sh, config.oracle))}")
    lines = meta + [",".join(columns)]
    for i in range(len(ts)):
        lines.append(",".join(_fmt(col[i]) for col in data))
    rows = [
        [float(col[i]) if math.isfinite(col[i]) else None for col in data]
        for i in range(len(ts))
    ]
    return SweepResult(columns=columns, rows=rows, csv="\n".join(lines) + "\n")


def _oracle_deviation(spec: InputStateSpec, sh: ShorthandCoeffs, oracle: OracleModel) -> float:
    """Worst relative disagreement between analytic and brute-force Fisher elements."""
    from . import fock_oracle
    from .fisher_core import fisher_matrix

    base = fock_oracle.build_state(spec, oracle.cutoff)
    worst = 0.0
    for t in oracle.t_values:
        rotated = fock_oracle.apply_bs(base, fock_oracle.bs_angle(t))
        brute = fock_oracle.oracle_fisher(rotated)
        analytic = fisher_matrix(sh, t)
        for name in ("f_ss", "f_dd", "f_sd"):
            a, b = getattr(analytic, name), getattr(brute, name)
            worst = max(worst, abs(a - b) / max(1.0, abs(a), abs(b)))
    return worst


class ReportModel(BaseModel):
    qfi: str
    t_opt: Optional[float]
    f_max: float
    case_label: str
    qcrb: Optional[float]
    candidates: list[tuple[float, float]]
    grid_t: Optional[float] = None
    grid_f: Optional[float] = None
    grid_f_delta: Optional[float] = None
    oracle_max_rel_deviation: Optional[float] = None


def _report_model(
    config: ScenarioConfig,
    spec: InputStateSpec,
    sh: ShorthandCoeffs,
    sel: QfiSelector,
    report: OptimizationReport,
) -> ReportModel:
    bound = qcrb(report.f_max, config.repetitions) if report.f_max > 0.0 else None
    model = ReportModel(
        qfi=sel.value,
        t_opt=report.t_opt,
        f_max=report.f_max,
        case_label=report.case_label,
        qcrb=bound,
        candidates=[(t, f) for t, f in report.candidates],
    )
    if config.oracle is not None:
        grid_t, grid_f = grid_verify(sh, sel, config.oracle.grid_points)
        model.grid_t = grid_t
        model.grid_f = grid_f
        model.grid_f_delta = abs(report.f_max - grid_f)
        if config.oracle.cutoff is not None and config.oracle.t_values:
            model.oracle_max_rel_deviation = _oracle_deviation(spec, sh, config.oracle)
    return model


class OptimizeResult(BaseModel):
    reports: list[ReportModel]
    config: str


def run_optimize(config: ScenarioConfig) -> OptimizeResult:
    """Closed-form optimum for each selected QFI, with optional verification deltas."""
    spec = build_spec(config)
    sh = shorthand_for(spec)
    reports = [
        _report_model(config, spec, sh, sel, optimize(sh, sel)) for sel in config.selectors()
    ]
    return OptimizeResult(reports=reports, config=canonical_config_json(config))


class FigureFile(BaseModel):
    filename: str
    content: str


def _scenario(state: StateModel, pmc: dict[str, float] | None = None) -> ScenarioConfig:
    return ScenarioConfig(units="pi", state=state, pmc=pmc, qfis=["2p", "i", "ii"])


def _sep(port0: PortModel, port1: PortModel) -> StateModel:
    return StateModel(kind="separable", port0=port0, port1=port1)


def _figure_curves(figure: int, beta_values: list[float] | None):
    """Caption-parameter scenarios per figure: list of (curve label, config).

    Figures 1-3 are schematics; data figures run 4 through 13.  The second
    coherent amplitude of the squeezed-coherent pair figures is exposed as a
    parameter so alternative caption readings regenerate without code changes.
    """
    coh = lambda mag, phase=0.0: PortModel(type="coherent", magnitude=mag, phase=phase)  # noqa: E731
    sqv = lambda r, phase=0.0: PortModel(type="squeezed_vacuum", squeeze_factor=r, squeeze_phase=phase)  # noqa: E731
    sqc = lambda mag, z: PortModel(type="squeezed_coherent", magnitude=mag, squeeze_factor=z)  # noqa: E731
    fockp = lambda n: PortModel(type="fock", n=n)  # noqa: E731
    vac = PortModel(type="vacuum")

    # Amplitude phases default to zero; the PMC dict carries the squeeze-phase
    # assignments (in units of pi) that realize each caption's matching
    # condition relative to those zero amplitude phases.
    pmc1 = {"port0_squeeze_phase": 0.0, "port1_squeeze_phase": 1.0, "port0_amp_phase": 0.0}
    pmc2 = {"port0_squeeze_phase": 0.0, "port1_squeeze_phase": 0.0, "port0_amp_phase": 0.0}
    pmc3 = {"port0_squeeze_phase": 0.0, "port1_squeeze_phase": 1.0, "port0_amp_phase": -0.5}

    if figure == 4:
        r = 1.9
        state = _sep(sqv(r), coh(math.sinh(2 * r) / math.sqrt(2.0)))
        return [("", _scenario(state, {"port0_squeeze_phase": 0.0}))]
    if figure in (5, 6):
        pmcs = (0.0, 0.15) if figure == 5 else (0.3, 0.5)
        return [
            (
                f"pmc{value:.2f}pi",
                _scenario(
                    _sep(vac, sqc(10.0, 0.6)), {"port1_squeeze_phase": -value}
                ),
            )
            for value in pmcs
        ]
    if figure == 7:
        return [
            (f"z{z}", _scenario(_sep(sqv(1.0), sqc(1000.0, z)), {"port0_squeeze_phase": 0.0, "port1_squeeze_phase": 1.0}))
            for z in (0.1, 0.6)
        ]
    if figure in (8, 9, 10):
        defaults = {8: [20.0, 500.0], 9: [20.0, 250.0], 10: [0.0, 20.0, 250.0]}
        betas = beta_values if beta_values is not None else defaults[figure]
        pmc = {8: pmc1, 9: pmc2, 10: pmc3}[figure]
        curves = []
        for beta in betas:
            port0 = PortModel(type="squeezed_coherent", magnitude=beta, squeeze_factor=1.0)
            curves.append((f"beta{beta:g}", _scenario(_sep(port0, sqc(1000.0, 0.6)), pmc)))
        return curves
    if figure == 11:
        return [
            (f"n{n}", _scenario(_sep(fockp(n), coh(1000.0))))
            for n in (0, 1, 2)
        ]
    if figure == 12:
        return [
            ("fock1", _scenario(_sep(fockp(1), coh(1000.0)))),
            ("sqzvac", _scenario(_sep(sqv(0.88), coh(1000.0)), {"port0_squeeze_phase": 0.0})),
        ]
    if figure == 13:
        r = 2.0
        tmsv_state = StateModel(kind="tmsv", squeeze_factor=r)
        coh_state = _sep(sqv(r), coh(math.sinh(r)))
        return [
            ("tmsv", _scenario(tmsv_state)),
            ("cohsqzvac", _scenario(coh_state, {"port0_squeeze_phase": 0.0})),
        ]
    raise ConfigError(f"figure must be in 4..13, got {figure}")


def run_figure(figure: int, beta_values: list[float] | None = None) -> list[FigureFile]:
    """One CSV per plotted curve, caption parameters baked in."""
    files: list[FigureFile] = []
    for label, config in _figure_curves(figure, beta_values):
        spec = build_spec(config)
        sh = shorthand_for(spec)
        ts = np.linspace(0.0, 1.0, config.sweep.points)
        for sel in config.selectors():
            values = qfi_curve(sh, ts, sel)
            name = _COLUMN_NAMES[sel]
            stem = f"fig{figure:02d}_{label + '_' if label else ''}{name}"
            lines = [
                f"# mzqfi figure {figure}",
                f"# curve={label or 'main'}:{name}",
                f"# config={canonical_config_json(config)}",
                f"t,{name}",
            ]
            lines += [f"{_fmt(ts[i])},{_fmt(values[i])}" for i in range(len(ts))]
            files.append(FigureFile(filename=f"{stem}.csv", content="\n".join(lines) + "\n"))
    return files
