"""Command-line front end.

Exit status: 0 on success, 1 on validation errors (including bad usage),
2 on I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .behavior import (
    ALGEBRAIC_BOUND,
    BELL_BOUND,
    CLASSIFY_TOL,
    TSIRELSON_BOUND,
    Behavior,
    chsh_value,
    classify,
    correlation_array,
    correlations,
    no_signaling_check,
    signed_combination,
    signed_combination_array,
)
from .commcomplexity import curve_to_csv, curve_to_json, default_grid, success_curve
from .errors import ValidationError
from .linalg import spectral_norm
from .lhv import LhvModel, classical_max, lhv_probability_tables, lhv_to_behavior
from .quantum import (
    SINGLET,
    QuantumStrategy,
    chat_batch,
    identity_residual_batch,
    optimize_settings,
    quantum_behavior,
    random_settings,
    spectral_report,
    state_from_json,
)
from .superquantum import X_CC, pr_box
from .surface import BASE_MODELS, SurfaceSpec, surface, surface_to_csv, surface_to_json

DEFAULT_SEED = 0
DEFAULT_TRIALS = 10_000
DEFAULT_FORMAT = "csv"


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{message}\n{self.format_usage()}")


def _fmt_bound(x: float) -> str:
    return f"{x:.10f}".rstrip("0").rstrip(".")


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_json(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# -- subcommands ----------------------------------------------------------


def load_model(data: dict[str, Any]) -> tuple[str, Behavior, QuantumStrategy | None]:
    if not isinstance(data, dict):
        raise ValidationError("model file must hold a JSON object")
    keys = set(data)
    if "probs" in keys:
        return "behavior", Behavior.from_json(data), None
    if "weights" in keys or "responses" in keys:
        return "lhv", lhv_to_behavior(LhvModel.from_json(data)), None
    if "state" in keys:
        strategy = QuantumStrategy.from_json(data)
        return "quantum", quantum_behavior(strategy), strategy
    raise ValidationError(f"cannot tell what kind of model has keys {sorted(keys)}")


def cmd_eval(args: argparse.Namespace) -> str:
    kind, behavior, strategy = load_model(_load_json(args.model))
    signed = signed_combination(behavior)
    report = classify(abs(signed), tol=args.classify_tol)
    ns = no_signaling_check(behavior)
    result: dict[str, Any] = {
        "model": kind,
        "chsh_signed": signed,
        "correlations": correlations(behavior).E.tolist(),
        "no_signaling": ns.passed,
        **report.to_json(),
    }
    if strategy is not None:
        result["spectral"] = spectral_report(strategy).to_json()
    if args.format == "json":
        return _dumps(result)
    lines = [
        f"model: {kind}",
        f"value: {report.value:.17g}",
        f"signed: {signed:.17g}",
        f"regime: {report.regime}",
        f"no_signaling: {'pass' if ns.passed else 'fail'}",
    ]
    lines += [f"margin_{k}: {v:.17g}" for k, v in report.margins.items()]
    if strategy is not None:
        lines += [f"{k}: {v:.17g}" for k, v in result["spectral"].items()]
    return "\n".join(lines) + "\n"


def certify_rows(seed: int = DEFAULT_SEED, samples: int = DEFAULT_TRIALS) -> list[dict[str, Any]]:
    rng = np.random.default_rng(seed)
    rows = []

    cmax, argmax = classical_max()
    k = 8
    w = rng.dirichlet(np.ones(k), size=samples)
    A = rng.choice([1.0, -1.0], size=(samples, k, 2))
    B = rng.choice([1.0, -1.0], size=(samples, k, 2))
    lhv_max = float(np.max(np.abs(signed_combination_array(correlation_array(lhv_probability_tables(w, A, B))))))
    rows.append(
        {
            "check": "classical (16 deterministic strategies)",
            "bound": BELL_BOUND,
            "observed": float(cmax),
            "detail": f"{len(argmax)} maximizers; max over {samples} random LHV models = {lhv_max:.12f}",
            "passed": cmax == 2 and lhv_max <= BELL_BOUND + 1e-12,
        }
    )

    s = random_settings(rng, samples)
    norms = spectral_norm(chat_batch(s[:, 0], s[:, 1], s[:, 2], s[:, 3]))
    opt = optimize_settings(SINGLET, seed=seed)
    rows.append(
        {
            "check": "quantum (spectral norm of CHSH operator)",
            "bound": TSIRELSON_BOUND,
            "observed": opt.value,
            "detail": f"max norm over {samples} random settings = {float(np.max(norms)):.12f}",
            "passed": bool(np.max(norms) <= TSIRELSON_BOUND + 1e-9) and abs(opt.value - TSIRELSON_BOUND) <= 1e-6,
        }
    )

    res = identity_residual_batch(s[:, 0], s[:, 1], s[:, 2], s[:, 3])
    rows.append(
        {
            "check": "operator identity C^2 = 4 - [A,A'][B,B']",
            "bound": 8.0,
            "observed": float(spectral_report(QuantumStrategy(SINGLET, opt.settings)).chat_norm ** 2),
            "detail": f"max residual over {samples} settings = {float(np.max(res)):.3e}",
            "passed": bool(np.max(res) < 1e-12),
        }
    )

    pr = pr_box()
    ns = no_signaling_check(pr)
    rows.append(
        {
            "check": "super-quantum (PR box)",
            "bound": ALGEBRAIC_BOUND,
            "observed": chsh_value(pr),
            "detail": f"no-signaling {'pass' if ns.passed else 'fail'}; X_cc = {X_CC:.10f}",
            "passed": chsh_value(pr) == 4.0 and ns.passed,
        }
    )
    return rows


def cmd_certify(args: argparse.Namespace) -> str:
    rows = certify_rows(args.seed, args.samples)
    if args.format == "json":
        return _dumps({"rows": rows, "passed": all(r["passed"] for r in rows)})
    head = f"{'check':<44} {'bound':<14} {'observed':<20} status  detail"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(
            f"{r['check']:<44} {_fmt_bound(r['bound']):<14} {r['observed']:<20.15g} "
            f"{'pass' if r['passed'] else 'FAIL':<7} {r['detail']}"
        )
    return "\n".join(lines) + "\n"


def cmd_optimize(args: argparse.Namespace) -> str:
    data = _load_json(args.state)
    if isinstance(data, dict):
        extra = set(data) - {"state", "settings"}
        if extra or "state" not in data:
            raise ValidationError("state file needs a 'state' key (and optionally 'settings')")
        data = data["state"]
    state = state_from_json(data)
    res = optimize_settings(state, seed=args.seed)
    strategy = QuantumStrategy(state, res.settings)
    out = strategy.to_json()
    out.update(value=res.value, grid_value=res.grid_value, converged=res.converged)
    return _dumps(out)


def cmd_surface(args: argparse.Namespace) -> str:
    spec = SurfaceSpec(args.theta_steps, args.q_steps, args.base, args.output)
    surf = surface(spec)
    return _dumps(surface_to_json(surf)) if args.format == "json" else surface_to_csv(surf)


def cmd_vandam(args: argparse.Namespace) -> str:
    if args.x_grid:
        try:
            grid = [float(v) for v in args.x_grid.split(",") if v.strip()]
        except ValueError:
            raise ValidationError(f"bad --x-grid {args.x_grid!r}") from None
    else:
        grid = default_grid(args.x_points)
    rows = success_curve(args.n, grid, args.trials, args.seed)
    return _dumps(curve_to_json(rows)) if args.format == "json" else curve_to_csv(rows)


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="chshlab", description="CHSH correlation laboratory.", formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file whose keys set defaults for the subcommand flags")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name: str, help: str, func) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, formatter_class=fmt)
        p.set_defaults(func=func)
        p.add_argument("--format", choices=["csv", "json"], default=DEFAULT_FORMAT, help="output format")
        p.add_argument("--output", default=None, help="write here instead of stdout")
        return p

    p = add("eval", "load a model JSON and report its CHSH value", cmd_eval)
    p.add_argument("model", help="behavior, LHV model or quantum strategy JSON")
    p.add_argument("--classify-tol", type=float, default=CLASSIFY_TOL, help="tie tolerance at 2 and 2*sqrt(2)")

    p = add("certify", "check the 2 / 2*sqrt(2) / 4 bounds", cmd_certify)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed")
    p.add_argument("--samples", type=int, default=DEFAULT_TRIALS, help="random models / settings per check")

    p = add("optimize", "maximize CHSH over settings for a two-qubit state", cmd_optimize)
    p.add_argument("state", help="JSON with 'state': four [re, im] pairs")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for the restart perturbations")

    p = add("surface", "two-knob CHSH surface as CSV", cmd_surface)
    p.add_argument("--theta-steps", type=int, default=181, help="grid points for theta on [0, pi]")
    p.add_argument("--q-steps", type=int, default=101, help="grid points for the PR weight q on [0, 1]")
    p.add_argument("--base", choices=BASE_MODELS, default="quantum-singlet", help="behavior at q = 0")

    p = add("vandam", "inner-product protocol success versus box strength", cmd_vandam)
    p.add_argument("--n", type=int, default=8, help="input length / number of boxes")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="protocol runs per X value")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed")
    p.add_argument("--x-points", type=int, default=21, help="evenly spaced X values on [0, 4]")
    p.add_argument("--x-grid", default=None, help="comma-separated X values (overrides --x-points)")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    config = _load_json(known.config)
    if not isinstance(config, dict):
        raise ValidationError("config file must hold a JSON object")
    command = next((a for a in rest if not a.startswith("-")), None)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    if command not in subparsers.choices:
        raise UsageError(f"config given but no valid subcommand\n{parser.format_usage()}")
    target = subparsers.choices[command]
    allowed = {a.dest for a in target._actions} - {"help", "func"}
    unknown = {k.replace("-", "_") for k in config} - allowed
    if unknown:
        raise ValidationError(f"unknown config keys for '{command}': {sorted(unknown)}")
    target.set_defaults(**{k.replace("-", "_"): v for k, v in config.items()})


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError(parser.format_usage())
        text = args.func(args)
        _emit(text, args.output)
    except OSError as exc:
        print(f"chshlab: I/O error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"chshlab: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
