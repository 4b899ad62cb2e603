"""Command-line front end.

    remote-prep exact --target 0.5,0.5,0.5,0.5
    remote-prep simulate --target 0.5,0+0.5j,0.5,0+0.5j --a 0.6 --c 0.6 --trials 100000 --seed 42
    remote-prep sweep --step 0.1 --format csv --out sweep.csv

Reports go to stdout (or ``--out``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from remote_prep.analysis import closed_form_success, exact_branch_report, monte_carlo, trial_uniforms
from remote_prep.protocol import (
    INPUT_TOL,
    RENORM_TOL,
    AuxOutcome,
    ChannelPair,
    DegenerateBranchError,
    Outcome,
    TargetState,
    ValidationError,
    run_protocol,
    validate_target,
)
from remote_prep.qstate import StateVector

MODES = ("run", "exact", "simulate", "sweep", "validate")
EPR_COEFF = 1 / math.sqrt(2)


@dataclass(frozen=True)
class RunConfig:
    mode: str
    target: Optional[tuple[complex, complex, complex, complex]]
    a: float = EPR_COEFF
    c: float = EPR_COEFF
    trials: int = 10000
    seed: int = 0
    forced_outcome: Optional[Outcome] = None
    forced_aux: Optional[AuxOutcome] = None
    step: float = 0.1
    output_format: str = "json"
    output_path: Optional[Path] = None

    @property
    def channel(self) -> ChannelPair:
        return ChannelPair.from_ac(self.a, self.c)

    @property
    def target_state(self) -> TargetState:
        return validate_target(*self.target)


def parse_complex(text: str) -> complex:
    try:
        value = complex(text.strip().replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed complex literal {text!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise argparse.ArgumentTypeError(f"non-finite complex literal {text!r}")
    return value


def parse_target(text: str) -> tuple[complex, complex, complex, complex]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"--target needs 4 comma-separated values, got {len(parts)}")
    return tuple(parse_complex(p) for p in parts)


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return value


def _trials(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("trials must be non-negative")
    return value


def _step(text: str) -> float:
    value = float(text)
    if not 0 < value <= EPR_COEFF:
        raise argparse.ArgumentTypeError("step must lie in (0, 1/sqrt(2)]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="remote-prep",
        description="Simulate remote preparation of a two-qubit state over two entangled pairs.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--target", type=parse_target, help="alpha,beta,gamma,delta as complex literals (e.g. 0.5,0+0.5j,0.5,0+0.5j)")
    common.add_argument("--a", type=float, default=EPR_COEFF, help="pair (1,2) coefficient, 0 <= a <= 1/sqrt(2)")
    common.add_argument("--c", type=float, default=EPR_COEFF, help="pair (3,4) coefficient, 0 <= c <= 1/sqrt(2)")
    common.add_argument("--trials", type=_trials, default=None)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--forced-outcome", choices=[o.slug for o in Outcome])
    common.add_argument("--forced-aux", type=int, choices=[0, 1])
    common.add_argument("--step", type=_step, default=0.1, help="grid step for sweep")
    common.add_argument("--format", dest="output_format", choices=["json", "csv"], default="json")
    common.add_argument("--out", dest="output_path", type=Path)
    common.add_argument("--target-file", type=Path, help="validate: file holding the target (text or JSON)")
    sub = parser.add_subparsers(dest="mode", required=True)
    helps = {
        "run": "trace a single protocol run",
        "exact": "exact branch probabilities and success rate",
        "simulate": "seeded Monte Carlo estimate of the success rate",
        "sweep": "success rate over an (a, c) grid",
        "validate": "check a target against the input constraints",
    }
    for mode in MODES:
        sub.add_parser(mode, parents=[common], help=helps[mode])
    return parser


def read_target_file(path: Path) -> tuple[complex, complex, complex, complex]:
    """Either a JSON document ``{"target": [[re, im], ...]}`` / ``[[re, im], ...]``
    or a single line of comma-separated complex literals."""
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        return parse_target(text.strip())
    values = doc["target"] if isinstance(doc, dict) else doc
    if len(values) != 4:
        raise argparse.ArgumentTypeError("target file must hold 4 coefficients")
    return tuple(complex(*v) if isinstance(v, list) else complex(v) for v in values)


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    target = ns.target
    if ns.mode == "validate":
        if ns.target_file is not None:
            try:
                target = read_target_file(ns.target_file)
            except (OSError, KeyError, TypeError, ValueError) as exc:
                parser.error(f"cannot read target file {ns.target_file}: {exc}")
        if target is None:
            parser.error("validate needs --target or --target-file")
    elif target is None and not (ns.mode == "sweep" and not ns.trials):
        parser.error(f"{ns.mode} needs --target")
    trials = ns.trials
    if trials is None:
        trials = 0 if ns.mode == "sweep" else 10000
    if ns.mode == "simulate" and trials < 1:
        parser.error("simulate needs --trials >= 1")
    config = RunConfig(
        mode=ns.mode,
        target=target,
        a=ns.a,
        c=ns.c,
        trials=trials,
        seed=ns.seed,
        forced_outcome=None if ns.forced_outcome is None else Outcome.from_slug(ns.forced_outcome),
        forced_aux=None if ns.forced_aux is None else AuxOutcome(ns.forced_aux),
        step=ns.step,
        output_format=ns.output_format,
        output_path=ns.output_path,
    )
    try:
        config.channel
        if ns.a < 0 or ns.c < 0:
            raise ValidationError("a-c-range", "a and c must be non-negative")
        if target is not None and ns.mode != "validate":
            config.target_state
    except ValidationError as exc:
        parser.error(str(exc))
    return config


# --- report building --------------------------------------------------------


def _cplx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _state(s: StateVector) -> list[list[float]]:
    return [_cplx(z) for z in s.amps]


def _channel(ch: ChannelPair) -> dict:
    return {"a": ch.a, "b": ch.b, "c": ch.c, "d": ch.d}


def _inputs(config: RunConfig) -> dict:
    out = {"channel": _channel(config.channel)}
    if config.target is not None:
        out["target"] = [_cplx(z) for z in config.target]
    return out


def _run(config: RunConfig) -> dict:
    u0, u1 = trial_uniforms(config.seed, 0, 1)[0]
    res = run_protocol(
        config.target_state,
        config.channel,
        alice=config.forced_outcome if config.forced_outcome is not None else float(u0),
        aux=config.forced_aux if config.forced_aux is not None else float(u1),
    )
    return {
        "alice_outcome": res.alice_outcome.slug,
        "message_bits": res.alice_outcome.bits,
        "alice_probability": res.alice_probability,
        "corrected": res.corrected,
        "aux_outcome": None if res.aux_outcome is None else int(res.aux_outcome),
        "aux_probability": res.aux_probability,
        "final_bob_state": _state(res.final_bob_state),
        "fidelity_to_target": res.fidelity_to_target,
        "success": res.success,
        "trace_probability": res.probability,
    }


def _exact(config: RunConfig) -> dict:
    report = exact_branch_report(config.target_state, config.channel)
    return {
        "branch_probabilities": {o.slug: p for o, p in report.probabilities.items()},
        "branch_success": {o.slug: p for o, p in report.success.items()},
        "total_success": report.total_success,
        "closed_form": closed_form_success(config.channel),
    }


def _simulate(config: RunConfig) -> dict:
    summary = monte_carlo(config.target_state, config.channel, config.trials, config.seed)
    return {
        "trials": summary.trials,
        "successes": summary.successes,
        "estimated_rate": summary.estimated_rate,
        "standard_error": summary.standard_error,
        "seed": summary.seed,
        "closed_form": closed_form_success(config.channel),
    }


def sweep_grid(step: float) -> list[float]:
    n = int(math.floor(EPR_COEFF / step + 1e-9))
    return [round(k * step, 12) for k in range(n + 1)]


def _sweep(config: RunConfig) -> list[dict]:
    rows = []
    target = config.target_state if config.trials else None
    for a in sweep_grid(config.step):
        for c in sweep_grid(config.step):
            ch = ChannelPair.from_ac(a, c)
            row = {"a": a, "c": c, "closed_form": closed_form_success(ch)}
            if config.trials:
                summary = monte_carlo(target, ch, config.trials, config.seed)
                row["mc_rate"] = summary.estimated_rate
                row["mc_stderr"] = summary.standard_error
            row["trials"] = config.trials
            row["seed"] = config.seed
            rows.append(row)
    return rows


def validation_report(raw: Sequence[complex]) -> dict:
    """Every target constraint with its measured value and verdict."""
    alpha, beta, gamma, delta = (complex(z) for z in raw)
    norm_sq = sum(abs(z) ** 2 for z in (alpha, beta, gamma, delta))
    checks = {
        "alpha-real": {"value": alpha.imag, "ok": abs(alpha.imag) <= INPUT_TOL},
        "gamma-real": {"value": gamma.imag, "ok": abs(gamma.imag) <= INPUT_TOL},
        "normalization": {"value": norm_sq, "ok": abs(norm_sq - 1.0) <= RENORM_TOL},
    }
    scale = 1 / math.sqrt(norm_sq) if norm_sq > 0 else 0.0
    overlap = (beta * scale).conjugate() * (delta * scale)
    checks["beta-delta-real"] = {"value": overlap.imag, "ok": abs(overlap.imag) <= INPUT_TOL}
    return {"constraints": checks, "valid": all(c["ok"] for c in checks.values())}


def execute(config: RunConfig) -> tuple[int, dict]:
    """Compute the report for ``config``; returns (exit status, report)."""
    if config.mode == "validate":
        results = validation_report(config.target)
        report = {"mode": "validate", "inputs": {"target": [_cplx(z) for z in config.target]}, "results": results}
        return (0 if results["valid"] else 1), report
    handlers = {"run": _run, "exact": _exact, "simulate": _simulate, "sweep": _sweep}
    inputs = _inputs(config)
    if config.mode in ("run", "simulate", "sweep"):
        inputs["seed"] = config.seed
    if config.mode in ("simulate", "sweep"):
        inputs["trials"] = config.trials
    if config.mode == "run":
        inputs["forced_outcome"] = None if config.forced_outcome is None else config.forced_outcome.slug
        inputs["forced_aux"] = None if config.forced_aux is None else int(config.forced_aux)
    if config.mode == "sweep":
        inputs["step"] = config.step
    return 0, {"mode": config.mode, "inputs": inputs, "results": handlers[config.mode](config)}


def dump_json(report: dict) -> str:
    # repr-based float output is the shortest round-trip form
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _flatten(prefix: str, value, out: dict) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else key, value[key], out)
    elif isinstance(value, list):
        out[prefix] = json.dumps(value)
    else:
        out[prefix] = value


def dump_csv(report: dict) -> str:
    buf = io.StringIO()
    if report["mode"] == "sweep":
        rows = report["results"]
    else:
        flat: dict = {}
        _flatten("", report["results"], flat)
        rows = [flat]
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def main(argv: Optional[Sequence[str]] = None) -> int:
    config = parse_args(argv)
    try:
        status, report = execute(config)
    except DegenerateBranchError as exc:
        print(f"remote-prep: {exc}", file=sys.stderr)
        return 1
    if status:
        failed = [k for k, v in report["results"]["constraints"].items() if not v["ok"]]
        print(f"remote-prep: target violates {', '.join(failed)}", file=sys.stderr)
    text = dump_csv(report) if config.output_format == "csv" else dump_json(report)
    if config.output_path is None:
        sys.stdout.write(text)
        return status
    try:
        config.output_path.write_text(text)
    except OSError as exc:
        print(f"remote-prep: cannot write {config.output_path}: {exc}", file=sys.stderr)
        return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
