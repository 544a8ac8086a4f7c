"""Command-line front end: parameter sweeps, validation runs and ROC tables."""

from __future__ import annotations

import argparse
import cmath
import csv
import json
import sys
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import DimensionCapError, ScenarioError, TruncationError
from .scenarios import COMPLEX_PARAMS, KIND_PARAMS, PARAM_NAMES, DetectionScenario, Kind, ScenarioParams, build
from .snr import equivalent_snr, relative_error, roc_point
from .validation import PROFILES, analytic_snr, run_validate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

SWEEP_COLUMNS = ("param", "value", "snr_analytic", "snr_numeric", "rel_error", "leakage_h0", "leakage_h1")
ROC_COLUMNS = ("m", "threshold", "q0", "qd")
ENGINES = ("analytic", "numeric", "both")


class UsageError(Exception):
    pass


class ResourceError(Exception):
    pass


# ---------------------------------------------------------------------------
# scenario files


def _parse_value(name: str, value):
    if isinstance(value, dict):
        if set(value) != {"re", "im"}:
            raise UsageError(f"complex parameter {name} must be an object with keys 're' and 'im'")
        return complex(float(value["re"]), float(value["im"]))
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise UsageError(f"parameter {name} must be a number or a {{re, im}} object")
    return float(value)


def scenario_from_dict(data: dict) -> DetectionScenario:
    """Build a scenario from ``{"kind": ..., "params": {...}, "cutoff": ...}``."""
    if not isinstance(data, dict) or "kind" not in data:
        raise UsageError("scenario must be an object with a 'kind' field")
    unknown = set(data) - {"kind", "params", "cutoff"}
    if unknown:
        raise UsageError(f"unknown scenario fields: {', '.join(sorted(unknown))}")
    params = data.get("params", {}) or {}
    bad = [name for name in params if name not in PARAM_NAMES]
    if bad:
        raise UsageError(f"unknown parameters: {', '.join(bad)}")
    values = {name: _parse_value(name, v) for name, v in params.items()}
    cutoff = data.get("cutoff")
    if cutoff is not None and (isinstance(cutoff, bool) or not isinstance(cutoff, int)):
        raise UsageError("cutoff must be an integer")
    try:
        return DetectionScenario(data["kind"], ScenarioParams(**values), cutoff)
    except ScenarioError as exc:
        raise UsageError(str(exc)) from None


def scenario_to_dict(scenario: DetectionScenario) -> dict:
    params = {}
    for name, value in scenario.params.given().items():
        if isinstance(value, complex):
            params[name] = {"re": value.real, "im": value.imag}
        else:
            params[name] = value
    out = {"kind": scenario.kind.value, "params": params}
    if scenario.cutoff is not None:
        out["cutoff"] = scenario.cutoff
    return out


def load_scenario(path: str) -> DetectionScenario:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None
    return scenario_from_dict(data)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepSpec:
    scenario: DetectionScenario
    sweep_param: str
    start: float
    stop: float
    steps: int
    engine: str = "both"

    def __post_init__(self):
        if self.sweep_param not in PARAM_NAMES:
            raise UsageError(f"unknown parameter {self.sweep_param!r}")
        required, optional = KIND_PARAMS[self.scenario.kind]
        if self.sweep_param not in required and self.sweep_param not in optional:
            raise UsageError(f"{self.scenario.kind.value} does not use {self.sweep_param}")
        if self.steps < 2:
            raise UsageError("steps must be at least 2")
        if self.start > self.stop:
            raise UsageError("--from must not exceed --to")
        if self.engine not in ENGINES:
            raise UsageError(f"engine must be one of {', '.join(ENGINES)}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)

    def scenario_at(self, value: float) -> DetectionScenario:
        """The scenario with the swept field set; complex fields keep their phase."""
        if self.sweep_param in COMPLEX_PARAMS:
            current = getattr(self.scenario.params, self.sweep_param)
            value = cmath.rect(value, cmath.phase(current))
        try:
            return self.scenario.with_params(**{self.sweep_param: value})
        except ScenarioError as exc:
            raise UsageError(f"{self.sweep_param}={value}: {exc}") from None


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def run_sweep(spec: SweepSpec) -> list[list[str]]:
    """One CSV row per sweep point, in sweep order."""
    rows = []
    for value in spec.values():
        scenario = spec.scenario_at(float(value))
        analytic = numeric = rel = leak0 = leak1 = None
        if spec.engine in ("analytic", "both"):
            try:
                analytic = analytic_snr(scenario)
            except ValueError as exc:
                raise UsageError(f"{spec.sweep_param}={value}: {exc}") from None
        if spec.engine in ("numeric", "both"):
            try:
                report = equivalent_snr(build(scenario))
            except (DimensionCapError, TruncationError) as exc:
                raise ResourceError(f"{spec.sweep_param}={value}: {exc}") from None
            except ValueError as exc:
                # oversized working space for the state expansion
                raise ResourceError(f"{spec.sweep_param}={value}: {exc}") from None
            numeric, leak0, leak1 = report.snr_numeric, report.leakage_h0, report.leakage_h1
            if analytic is not None:
                rel = relative_error(numeric, analytic)
        rows.append([spec.sweep_param, _fmt(value), _fmt(analytic), _fmt(numeric), _fmt(rel), _fmt(leak0), _fmt(leak1)])
    return rows


def write_csv(stream, header: Iterable[str], rows: Iterable[Iterable[str]]):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


# ---------------------------------------------------------------------------
# ROC tables


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}") from None


def run_roc(d_squared: float, m_list: list[int], thresholds: list[float]) -> list[list[str]]:
    rows = []
    for m in m_list:
        for x in thresholds:
            try:
                p = roc_point(d_squared, m, x)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            rows.append([str(m), _fmt(x), _fmt(p.q0), _fmt(p.qd)])
    return rows


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sqzradar", description="Squeezed-light laser radar SNR tools")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="sweep one scenario parameter and emit CSV")
    sweep.add_argument("--config", required=True, help="scenario JSON file")
    sweep.add_argument("--param", required=True, help="ScenarioParams field to sweep")
    sweep.add_argument("--from", dest="start", type=float, required=True)
    sweep.add_argument("--to", dest="stop", type=float, required=True)
    sweep.add_argument("--steps", type=int, required=True)
    sweep.add_argument("--engine", choices=ENGINES, default="both")
    sweep.add_argument("--out", help="output CSV file (default: standard output)")

    validate = sub.add_parser("validate", help="cross-check Fock-space results against closed forms")
    validate.add_argument("--profile", choices=sorted(PROFILES), default="default")

    roc = sub.add_parser("roc", help="false-alarm and detection probabilities")
    roc.add_argument("--d2", type=float, required=True, help="equivalent SNR D^2 per interval")
    roc.add_argument("--m", required=True, help="comma-separated interval counts")
    roc.add_argument("--thresholds", required=True, help="comma-separated thresholds")
    roc.add_argument("--out", help="output CSV file (default: standard output)")

    scenario = sub.add_parser("scenario", help="scenario catalogue")
    scenario.add_argument("action", choices=["list"])
    return parser


def _emit(out: Optional[str], header, rows):
    if out is None:
        write_csv(sys.stdout, header, rows)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            write_csv(fh, header, rows)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def _list_scenarios():
    for kind in Kind:
        required, optional = KIND_PARAMS[kind]
        opt = ", ".join(f"{k}={v}" for k, v in optional.items())
        print(f"{kind.value}: requires {', '.join(required)}; optional {opt}")


def main(argv: Optional[list[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "sweep":
            spec = SweepSpec(load_scenario(args.config), args.param, args.start, args.stop, args.steps, args.engine)
            _emit(args.out, SWEEP_COLUMNS, run_sweep(spec))
        elif args.command == "validate":
            summary = run_validate(args.profile)
            for line in summary.lines():
                print(line, file=sys.stderr)
            return EXIT_OK if summary.passed else EXIT_VALIDATION
        elif args.command == "roc":
            _emit(args.out, ROC_COLUMNS, run_roc(args.d2, _int_list(args.m), _float_list(args.thresholds)))
        else:
            _list_scenarios()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    return EXIT_OK


def main_entry():
    sys.exit(main())
