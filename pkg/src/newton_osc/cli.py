"""newton-osc: analyze a phase, fit decay rates, estimate sublevel volumes.

Exit codes: 0 success, 1 malformed input, 2 degenerate phase, 3 invalid
exponents, 4 a numeric check did not pass (fail or flagged).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__, experiments
from .decay import (
    DecayEstimate,
    ExponentError,
    ExponentTuple,
    decay_to_sublevel,
    predict,
    validate_hypotheses,
)
from .newton import GeometryError, from_phase
from .nondeg import DegeneratePhaseError, check_nondegenerate
from .phase import Phase, PhaseError

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_EXPONENTS, EXIT_NUMERIC = 0, 1, 2, 3, 4

DEFAULT_RANGES = {
    "sharpness": (2.0**4, 2.0**12),
    "off-diagonal": (2.0**4, 2.0**12),
    "fixed-f": (2.0**4, 2.0**10),
    "dyadic-sum": (2.0**6, 2.0**20),
}


class InputError(Exception):
    pass


def _load_phase(source) -> Phase:
    if isinstance(source, dict):
        return Phase.from_dict(source)
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"--phase: cannot read {path}: {exc.strerror}") from None
    try:
        return Phase.from_json(text)
    except PhaseError as exc:
        raise InputError(f"--phase: {exc}") from None


def _parse_exponents(text: str, d: int) -> ExponentTuple:
    try:
        p = ExponentTuple.parse(text)
    except ExponentError as exc:
        raise InputError(f"--exponents: {exc}") from None
    if p.d != d:
        raise InputError(f"--exponents: expected {d} entries, got {p.d}")
    return p


def analyze(phase: Phase, p: ExponentTuple) -> tuple[dict, int, DecayEstimate | None]:
    """Geometry, nondegeneracy, hypotheses and prediction as a report body."""
    poly = from_phase(phase)
    report = {"phase": str(phase), "polyhedron": poly.to_dict()}
    verdict = check_nondegenerate(phase)
    report["nondegeneracy"] = verdict.to_dict()
    hyp = validate_hypotheses(p)
    report["hypotheses"] = hyp.to_dict()
    delta, point = poly.newton_distance(p.direction) if hyp.direction_positive else (None, None)
    if delta is not None:
        report["newton_distance"] = {
            "direction": [str(a) for a in p.direction],
            "delta": str(delta),
            "boundary_point": [str(a) for a in point.coords],
            "codim": point.codim,
        }
    if not verdict.nondegenerate:
        report["status"] = "degenerate"
        return report, EXIT_DEGENERATE, None
    try:
        est = predict(phase, p, verdict=verdict, poly=poly)
    except ExponentError as exc:
        report["status"] = "invalid-exponents"
        report["diagnostics"] = {"message": "neither hypothesis", **exc.diagnostics}
        return report, EXIT_EXPONENTS, None
    report["estimate"] = est.to_dict()
    report["sublevel_bound"] = decay_to_sublevel(est).to_dict()
    report["status"] = "ok"
    return report, EXIT_OK, est


def _numeric_exit(section: dict) -> int:
    return EXIT_OK if section.get("status") == "pass" else EXIT_NUMERIC


def run(inputs: dict) -> tuple[dict, int]:
    """Execute a report's inputs block; the same inputs give the same report."""
    command = inputs["command"]
    phase = _load_phase(inputs["phase"])
    report: dict = {"inputs": inputs}
    if command == "sublevel":
        p = ExponentTuple([math.inf] * phase.dim)
    else:
        p = _parse_exponents(inputs["exponents"], phase.dim)
    body, code, est = analyze(phase, p)
    report.update(body)
    if code != EXIT_OK or command == "analyze":
        return report, code
    if command == "decay-fit":
        mode = inputs["mode"]
        lambdas = experiments.lambda_grid(inputs["lambda_min"], inputs["lambda_max"])
        if len(lambdas) < 4:
            raise InputError("--lambda-min/--lambda-max: need at least 4 dyadic values")
        if mode == "sharpness":
            section = experiments.sharpness_experiment(phase, p, lambdas)
        elif mode == "fixed-f":
            section = experiments.fixed_f_experiment(phase, p, lambdas)
        elif mode == "dyadic-sum":
            section = experiments.dyadic_experiment(phase, p, lambdas)
        elif mode == "off-diagonal":
            section = experiments.off_diagonal_experiment(lambdas, d=phase.dim)
        else:
            raise InputError(f"--mode: unknown mode {mode!r}")
        section["predicted_log_power"] = est.log_power
        report["numeric"] = {mode: section}
        return report, _numeric_exit(section)
    if command == "sublevel":
        lo, hi = inputs["eps_min"], inputs["eps_max"]
        if not 0 < lo < hi < 1:
            raise InputError("--eps-min/--eps-max: need 0 < eps_min < eps_max < 1")
        eps = sorted(experiments.lambda_grid(lo, hi), reverse=True)
        if len(eps) < 4:
            raise InputError("--eps-min/--eps-max: need at least 4 dyadic values")
        section = experiments.sublevel_experiment(phase, eps, inputs["samples"], inputs["seed"])
        report["numeric"] = {"sublevel": section}
        return report, _numeric_exit(section)
    raise InputError(f"unknown command {command!r}")


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _emit(report: dict, out: str | None) -> None:
    text = dumps(report)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _summary(report: dict) -> str:
    parts = [f"status: {report.get('status')}"]
    est = report.get("estimate")
    if est:
        parts.append(
            f"regime {est['regime']}, rate {est['rate']}, log power {est['log_power']}, delta {est['delta']}"
        )
    for name, sec in report.get("numeric", {}).items():
        fit = sec.get("fit") or {}
        parts.append(f"{name}: {sec['status']} (fitted rate {fit.get('rate', float('nan')):.4f})")
    return "; ".join(parts)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="newton-osc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="geometry, nondegeneracy and decay prediction")
    a.add_argument("--phase", required=True, help="phase JSON file")
    a.add_argument("--exponents", required=True, help='comma list of "p/q", decimals or "inf"')
    a.add_argument("--out", help="report file (default stdout)")

    f = sub.add_parser("decay-fit", help="numeric decay experiment and rate fit")
    f.add_argument("--phase", required=True)
    f.add_argument("--exponents", required=True)
    f.add_argument("--mode", required=True, choices=sorted(DEFAULT_RANGES))
    f.add_argument("--lambda-min", type=float)
    f.add_argument("--lambda-max", type=float)
    f.add_argument("--out")

    s = sub.add_parser("sublevel", help="Monte Carlo sublevel volumes and exponent fit")
    s.add_argument("--phase", required=True)
    s.add_argument("--eps-min", type=float, default=2.0**-12)
    s.add_argument("--eps-max", type=float, default=2.0**-4)
    s.add_argument("--samples", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")

    r = sub.add_parser("rerun", help="re-run a report from its inputs block")
    r.add_argument("report", help="existing report JSON")
    r.add_argument("--out")
    return ap


def _inputs_from_args(args) -> dict:
    phase = _load_phase(args.phase).to_dict()
    if args.command == "analyze":
        return {"command": "analyze", "phase": phase, "exponents": args.exponents}
    if args.command == "decay-fit":
        lo, hi = DEFAULT_RANGES[args.mode]
        return {
            "command": "decay-fit",
            "phase": phase,
            "exponents": args.exponents,
            "mode": args.mode,
            "lambda_min": args.lambda_min if args.lambda_min is not None else lo,
            "lambda_max": args.lambda_max if args.lambda_max is not None else hi,
        }
    if args.samples < 1:
        raise InputError("--samples: must be positive")
    return {
        "command": "sublevel",
        "phase": phase,
        "eps_min": args.eps_min,
        "eps_max": args.eps_max,
        "samples": args.samples,
        "seed": args.seed,
    }


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "rerun":
            try:
                old = json.loads(Path(args.report).read_text(encoding="utf-8"))
                inputs = old["inputs"]
            except (OSError, ValueError, KeyError, TypeError) as exc:
                raise InputError(f"report: no usable inputs block ({exc})") from None
        else:
            inputs = _inputs_from_args(args)
        report, code = run(inputs)
    except (InputError, PhaseError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ExponentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXPONENTS
    except DegeneratePhaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    _emit(report, args.out)
    print(_summary(report), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
