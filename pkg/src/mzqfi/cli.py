"""Command-line client for the scenario service.

Subcommands mirror the service endpoints: ``sweep``, ``optimize``, ``figure``
and ``verify``.  By default the service layer runs in-process; pass
``--server URL`` to talk to a running instance over HTTP instead.  Exit codes:
0 success, 1 configuration error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .errors import ConfigError
from .scenarios import (
    OptimizeResult,
    SweepResult,
    parse_config,
    run_figure,
    run_optimize,
    run_sweep,
)
from .verification import VerifyReport, run_verify

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VERIFY = 2


class _RemoteService:
    """Thin HTTP client mapping the endpoint payloads 1:1."""

    def __init__(self, base_url: str):
        self._client = httpx.Client(base_url=base_url, timeout=600.0)

    def _post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        if response.status_code == 422:
            raise ConfigError(json.dumps(response.json().get("detail")))
        response.raise_for_status()
        return response.json()

    def sweep(self, config_data: dict) -> SweepResult:
        return SweepResult.model_validate(self._post("/sweep", config_data))

    def optimize(self, config_data: dict) -> OptimizeResult:
        return OptimizeResult.model_validate(self._post("/optimize", config_data))

    def figure(self, figure: int, beta_values=None) -> list[dict]:
        return self._post("/figure", {"figure": figure, "beta_values": beta_values})["files"]

    def verify(self, level: str) -> VerifyReport:
        return VerifyReport.model_validate(self._post("/verify", {"level": level}))


class _LocalService:
    """Same surface as the remote client, served by the in-process runners."""

    def sweep(self, config_data: dict) -> SweepResult:
        return run_sweep(parse_config(config_data))

    def optimize(self, config_data: dict) -> OptimizeResult:
        return run_optimize(parse_config(config_data))

    def figure(self, figure: int, beta_values=None) -> list[dict]:
        return [f.model_dump() for f in run_figure(figure, beta_values)]

    def verify(self, level: str) -> VerifyReport:
        return run_verify(level)


def _service(args):
    return _RemoteService(args.server) if args.server else _LocalService()


def _load_config(path: str) -> dict:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def _out_dir(args) -> Path:
    out = Path(args.out) if args.out else Path.cwd()
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_sweep(args) -> int:
    result = _service(args).sweep(_load_config(args.config))
    target = _out_dir(args) / "sweep.csv"
    target.write_text(result.csv)
    print(f"wrote {target} ({len(result.rows)} rows)")
    return EXIT_OK


def _cmd_optimize(args) -> int:
    result = _service(args).optimize(_load_config(args.config))
    for report in result.reports:
        t_text = "irrelevant" if report.t_opt is None else f"{report.t_opt:.12g}"
        line = f"{report.qfi}: t_opt={t_text} f_max={report.f_max:.12g} [{report.case_label}]"
        if report.qcrb is not None:
            line += f" qcrb={report.qcrb:.12g}"
        if report.grid_f_delta is not None:
            line += f" grid_f_delta={report.grid_f_delta:.3e}"
        if report.oracle_max_rel_deviation is not None:
            line += f" oracle_dev={report.oracle_max_rel_deviation:.3e}"
        print(line)
    if args.out:
        target = _out_dir(args) / "optimize.json"
        target.write_text(result.model_dump_json(indent=2) + "\n")
        print(f"wrote {target}")
    return EXIT_OK


def _cmd_figure(args) -> int:
    files = _service(args).figure(args.figure, args.beta)
    out = _out_dir(args)
    for item in files:
        target = out / item["filename"]
        target.write_text(item["content"])
        print(f"wrote {target}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = _service(args).verify(args.level)
    for line in report.text_lines():
        print(line)
    if args.out:
        target = _out_dir(args) / "verify.json"
        target.write_text(report.model_dump_json(indent=2) + "\n")
        print(f"wrote {target}")
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mzqfi",
        description="Quantum Fisher information of an unbalanced Mach-Zehnder interferometer",
    )
    parser.add_argument("--server", help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="QFI/QCRB table over a transmission range")
    p_sweep.add_argument("--config", required=True, help="scenario config JSON path")
    p_sweep.add_argument("--out", help="output directory (default: cwd)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_opt = sub.add_parser("optimize", help="closed-form optimal transmission per QFI")
    p_opt.add_argument("--config", required=True, help="scenario config JSON path")
    p_opt.add_argument("--out", help="directory for optimize.json (default: print only)")
    p_opt.set_defaults(func=_cmd_optimize)

    p_fig = sub.add_parser("figure", help="regenerate a data figure's curve files")
    p_fig.add_argument("--figure", type=int, required=True, help="figure id, 4..13")
    p_fig.add_argument(
        "--beta", type=float, nargs="*", default=None,
        help="override the second coherent amplitude list (figures 8-10)",
    )
    p_fig.add_argument("--out", help="output directory (default: cwd)")
    p_fig.set_defaults(func=_cmd_figure)

    p_ver = sub.add_parser("verify", help="run the self-verification suite")
    p_ver.add_argument("--level", choices=["quick", "full"], default="quick")
    p_ver.add_argument("--out", help="directory for verify.json (default: print only)")
    p_ver.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except httpx.HTTPError as exc:
        print(f"service error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
