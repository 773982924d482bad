"""Command-line front end.

Subcommands mirror the engine's three stages: configure a game from a
JSON file, derive/certify strategies (solve, explore), and report
(evaluate, sweep, accuracy). Every run with file outputs also writes a
run manifest (<first-output>.manifest.json, emitted last) listing the
artifacts; outputs are byte-stable for a fixed seed.

Set EQFORGE_ORACLE_TIMEOUT_MS to override the external-oracle timeout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace

from . import __version__
from ._kernels import BACKEND
from .advisor import ExternalAdvisor, explore
from .errors import ConfigError, EqforgeError
from .game import GameConfig, load_config
from .oracle import evaluate, monotonicity_report, open_oracle
from .scenario import (
    ALLOWED_TARGETS,
    PerturbationSpec,
    evaluate_profiles,
    generate_scenarios,
    write_report_csv,
    write_summary_json,
)
from .solver import (
    DEFAULT_BUDGET,
    Grid,
    enumerate_equilibria,
    nash_certificate,
    run_dynamics,
)

ENV_TIMEOUT = "EQFORGE_ORACLE_TIMEOUT_MS"


def _parse_counts(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise ConfigError("profile", f"expected comma-separated integers, got {text!r}")


def _parse_labeled(text: str) -> tuple[str, tuple[int, ...]]:
    if "=" not in text:
        raise ConfigError("profile", f"expected LABEL=h,m1,..., got {text!r}")
    label, counts = text.split("=", 1)
    return label.strip(), _parse_counts(counts)


def _parse_range(text: str) -> list[int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("range", f"expected START:STOP:STEP, got {text!r}")
    try:
        start, stop, step = (int(p) for p in parts)
    except ValueError:
        raise ConfigError("range", f"expected integers in START:STOP:STEP, got {text!r}")
    if step < 1 or stop < start:
        raise ConfigError("range", "need STEP >= 1 and STOP >= START")
    return list(range(start, stop + 1, step))


def _load(args) -> GameConfig:
    config = load_config(args.config)
    env = os.environ.get(ENV_TIMEOUT)
    if env and config.oracle.kind == "external":
        try:
            timeout_ms = int(env)
        except ValueError:
            raise ConfigError(ENV_TIMEOUT, f"must be an integer, got {env!r}")
        config = replace(config, oracle=replace(config.oracle, timeout_ms=timeout_ms))
    return config


def _grid(args, config: GameConfig) -> Grid:
    step = getattr(args, "grid_step", None)
    return Grid(step if step is not None else config.grid_step)


def _make_advisor(spec: str):
    """'heuristic' or 'external:CMD' -> explore()'s advisor argument."""
    if spec == "heuristic":
        return "heuristic", None
    if spec.startswith("external:"):
        command = spec[len("external:") :]
        if not command:
            raise ConfigError("advisor", "external advisor needs a command")
        advisor = ExternalAdvisor(command)
        return advisor, advisor
    raise ConfigError("advisor", f"expected 'heuristic' or 'external:CMD', got {spec!r}")


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _cell(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


class _Manifest:
    """Collects resolved parameters and artifact paths for one run."""

    def __init__(self, command: str, argv: list[str], args):
        self.command = command
        self.argv = argv
        self.config_path = getattr(args, "config", None)
        self.seed = getattr(args, "seed", 0)
        self.parameters: dict = {}
        self.outputs: list[str] = []
        self.started = time.monotonic()

    def emit(self) -> None:
        if not self.outputs:
            return
        path = self.outputs[0] + ".manifest.json"
        payload = {
            "tool": "eqforge",
            "version": __version__,
            "kernel": BACKEND,
            "command": self.command,
            "argv": self.argv,
            "config": self.config_path,
            "seed": self.seed,
            "parameters": self.parameters,
            "outputs": self.outputs,
            "duration_s": round(time.monotonic() - self.started, 6),
        }
        _write_json(path, payload)


def _outcome_dict(outcome) -> dict:
    return {
        "profile": list(outcome.profile),
        "accuracy": outcome.accuracy,
        "costs": list(outcome.costs),
        "utilities": list(outcome.utilities),
    }


def _explore_trace_rows(trace, n_players):
    header = (
        ["step", "source"]
        + [f"c_{i}" for i in range(n_players)]
        + ["accuracy"]
        + [f"u_{i}" for i in range(n_players)]
    )
    rows = []
    for idx, step in enumerate(trace.steps):
        cells = [str(idx), step.source]
        cells += [str(c) for c in step.profile]
        cells += [_cell(step.outcome.accuracy)]
        cells += [_cell(u) for u in step.outcome.utilities]
        rows.append(cells)
    return header, rows


def _dynamics_trace_rows(trace, n_players):
    header = (
        ["step", "mover"]
        + [f"c_{i}" for i in range(n_players)]
        + ["accuracy"]
        + [f"u_{i}" for i in range(n_players)]
    )
    rows = []
    for idx, step in enumerate(trace.steps):
        cells = [str(idx), "" if step.mover is None else str(step.mover)]
        cells += [str(c) for c in step.profile]
        cells += [_cell(step.outcome.accuracy)]
        cells += [_cell(u) for u in step.outcome.utilities]
        rows.append(cells)
    return header, rows


def _cmd_accuracy(args, manifest: _Manifest) -> int:
    config = _load(args)
    manifest.parameters["profiles"] = [list(p) for p in args.profile]
    with open_oracle(config) as oracle:
        outcomes = [
            _outcome_dict(evaluate(config, counts, args.seed, oracle=oracle))
            for counts in args.profile
        ]
    payload = {"label": config.label, "seed": args.seed, "outcomes": outcomes}
    if args.out:
        _write_json(args.out, payload)
        manifest.outputs.append(args.out)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def _cmd_solve(args, manifest: _Manifest) -> int:
    config = _load(args)
    grid = _grid(args, config)
    manifest.parameters.update(
        {"method": args.method, "grid_step": grid.step, "budget": args.budget}
    )
    if args.method == "enumerate":
        equilibria = enumerate_equilibria(
            config, grid, args.seed, budget=args.budget, jobs=args.jobs
        )
        payload = {
            "label": config.label,
            "grid_step": grid.step,
            "count": len(equilibria),
            "equilibria": [list(p) for p in equilibria],
        }
    elif args.method == "best-response":
        start = args.init[0] if args.init else tuple([0] * config.n_players)
        trace = run_dynamics(
            config, start, grid, args.max_rounds, args.tolerance, args.seed
        )
        payload = {
            "label": config.label,
            "grid_step": grid.step,
            "start": list(start),
            "status": trace.status,
            "final": list(trace.final),
            "moves": len(trace.steps) - 1,
        }
        if trace.status == "converged":
            cert = nash_certificate(config, trace.final, grid, args.seed)
            payload["certificate"] = cert.to_dict()
        if args.trace:
            header, rows = _dynamics_trace_rows(trace, config.n_players)
            _write_csv(args.trace, header, rows)
            manifest.outputs.append(args.trace)
    else:  # advisor
        return _run_explore(args, manifest, config, grid)
    if args.out:
        _write_json(args.out, payload)
        manifest.outputs.append(args.out)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def _run_explore(args, manifest: _Manifest, config=None, grid=None) -> int:
    config = config or _load(args)
    grid = grid or _grid(args, config)
    if not args.init:
        raise ConfigError("init", "explore needs at least one --init profile")
    advisor, session = _make_advisor(args.advisor)
    manifest.parameters.update(
        {
            "advisor": args.advisor,
            "init": [list(p) for p in args.init],
            "max_steps": args.max_steps,
            "tolerance": args.tolerance,
            "grid_step": grid.step,
        }
    )
    try:
        trace, final, certificate = explore(
            config,
            advisor,
            args.init,
            max_steps=args.max_steps,
            eps=args.tolerance,
            seed=args.seed,
            grid=grid,
        )
    finally:
        if session is not None:
            session.close()
    payload = {
        "label": config.label,
        "status": trace.status,
        "steps": len(trace.steps),
        "final": None if final is None else list(final),
        "certificate": None if certificate is None else certificate.to_dict(),
    }
    if trace.error:
        payload["error"] = trace.error
    if args.trace:
        header, rows = _explore_trace_rows(trace, config.n_players)
        _write_csv(args.trace, header, rows)
        manifest.outputs.append(args.trace)
    if args.out:
        _write_json(args.out, payload)
        manifest.outputs.append(args.out)
    elif not args.trace:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    if trace.status == "oracle_error":
        raise EqforgeError(f"exploration aborted: {trace.error}")
    return 0


def _cmd_evaluate(args, manifest: _Manifest) -> int:
    config = _load(args)
    if args.resolve:
        raise ConfigError(
            "resolve", "re-solving each scenario for its own equilibrium is reserved for future work"
        )
    profiles = [("baseline", args.baseline)]
    profiles += [_parse_labeled(p) for p in args.profile]
    targets = (
        tuple(t.strip() for t in args.targets.split(","))
        if args.targets
        else ALLOWED_TARGETS
    )
    spec = PerturbationSpec(
        delta=args.delta, targets=targets, count=args.scenarios, seed=args.seed
    )
    manifest.parameters.update(
        {
            "scenarios": args.scenarios,
            "delta": args.delta,
            "targets": list(targets),
            "profiles": {label: list(p) for label, p in profiles},
        }
    )
    scenario_list = generate_scenarios(config, spec)
    report = evaluate_profiles(profiles, scenario_list, args.seed)
    write_report_csv(report, args.out)
    manifest.outputs.append(args.out)
    summary_path = args.summary or _sidecar(args.out, ".summary.json")
    write_summary_json(report, summary_path)
    manifest.outputs.append(summary_path)
    return 0


def _cmd_sweep(args, manifest: _Manifest) -> int:
    config = _load(args)
    counts = _parse_range(args.range)
    seeds = (
        [int(s) for s in args.seeds.split(",")] if args.seeds else [args.seed]
    )
    manifest.parameters.update(
        {"player": args.player, "range": args.range, "seeds": seeds, "fixed": list(args.fixed)}
    )
    report = monotonicity_report(config, args.player, args.fixed, counts, seeds)
    rows = [[str(c), _cell(acc)] for c, acc in report.rows]
    _write_csv(args.out, ["count", "mean_accuracy"], rows)
    manifest.outputs.append(args.out)
    summary_path = _sidecar(args.out, ".summary.json")
    _write_json(
        summary_path,
        {
            "player": report.player,
            "non_increasing": report.non_increasing,
            "eps_mono": report.eps_mono,
        },
    )
    manifest.outputs.append(summary_path)
    return 0


def _sidecar(path: str, suffix: str) -> str:
    root, ext = os.path.splitext(path)
    return (root if ext else path) + suffix


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqforge",
        description="Equilibrium engine for data-contribution games.",
    )
    parser.add_argument("--version", action="version", version=f"eqforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=True):
        p.add_argument("--config", required=True, help="game config JSON file")
        p.add_argument("--seed", type=int, default=0, help="run seed (default 0)")
        if grid:
            p.add_argument(
                "--grid-step",
                type=int,
                default=None,
                help="deviation grid step (default: config grid_step)",
            )

    p = sub.add_parser("accuracy", help="evaluate profiles against the payoff oracle")
    common(p, grid=False)
    p.add_argument(
        "--profile",
        type=_parse_counts,
        action="append",
        required=True,
        metavar="h,m1,...",
        help="profile to evaluate (repeatable)",
    )
    p.add_argument("--out", help="write outcomes JSON here instead of stdout")
    p.set_defaults(func=_cmd_accuracy)

    p = sub.add_parser("solve", help="derive equilibria on the count grid")
    common(p)
    p.add_argument(
        "--method",
        choices=("enumerate", "best-response", "advisor"),
        default="enumerate",
    )
    p.add_argument(
        "--budget",
        type=int,
        default=DEFAULT_BUDGET,
        help=f"max profiles an enumeration may scan (default {DEFAULT_BUDGET})",
    )
    p.add_argument("--jobs", type=int, default=None, help="worker processes for scans")
    p.add_argument(
        "--init",
        type=_parse_counts,
        action="append",
        default=None,
        metavar="h,m1,...",
        help="start profile(s); best-response uses the first",
    )
    p.add_argument("--max-rounds", type=int, default=200, help="best-response rounds cap")
    p.add_argument("--max-steps", type=int, default=200, help="advisor evaluation cap")
    p.add_argument(
        "--advisor", default="heuristic", help="'heuristic' or 'external:CMD'"
    )
    p.add_argument("--tolerance", type=float, default=1e-4, help="convergence tolerance")
    p.add_argument("--trace", help="write the walk as CSV here")
    p.add_argument("--out", help="write result JSON here instead of stdout")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("explore", help="advisor-guided exploration of the game")
    common(p)
    p.add_argument(
        "--advisor", default="heuristic", help="'heuristic' or 'external:CMD'"
    )
    p.add_argument(
        "--init",
        type=_parse_counts,
        action="append",
        required=True,
        metavar="h,m1,...",
        help="initial exploration profile (repeatable)",
    )
    p.add_argument(
        "--max-steps", type=int, default=200, help="total evaluation cap (default 200)"
    )
    p.add_argument(
        "--tolerance",
        type=float,
        default=1e-4,
        help="utility steadiness threshold (default 1e-4)",
    )
    p.add_argument("--trace", help="write the exploration trace CSV here")
    p.add_argument("--out", help="write final profile + certificate JSON here")
    p.set_defaults(func=_run_explore)

    p = sub.add_parser("evaluate", help="robustness of profiles across perturbed games")
    common(p, grid=False)
    p.add_argument(
        "--baseline",
        type=_parse_counts,
        required=True,
        metavar="h,m1,...",
        help="baseline profile every other profile is scored against",
    )
    p.add_argument(
        "--profile",
        type=str,
        action="append",
        default=[],
        metavar="LABEL=h,m1,...",
        help="labeled focal profile (repeatable)",
    )
    p.add_argument("--scenarios", type=int, default=100, help="number of perturbed games")
    p.add_argument("--delta", type=float, default=0.05, help="relative perturbation size")
    p.add_argument(
        "--targets",
        default=None,
        help=f"comma list from {{{','.join(ALLOWED_TARGETS)}}} (default: all)",
    )
    p.add_argument("--out", required=True, help="report CSV path (summary JSON sidecar)")
    p.add_argument("--summary", default=None, help="summary JSON path override")
    p.add_argument(
        "--resolve",
        action="store_true",
        help="re-solve each scenario for its own equilibrium (reserved, unimplemented)",
    )
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep", help="accuracy trend along one player's count")
    common(p, grid=False)
    p.add_argument("--player", type=int, required=True, help="malicious player id to sweep")
    p.add_argument("--range", required=True, metavar="START:STOP:STEP")
    p.add_argument(
        "--fixed",
        type=_parse_counts,
        required=True,
        metavar="h,m1,...",
        help="profile holding the other players' counts",
    )
    p.add_argument("--seeds", default=None, help="comma list of seeds to average over")
    p.add_argument("--out", required=True, help="sweep CSV path")
    p.set_defaults(func=_cmd_sweep)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = _Manifest(args.command, list(argv), args)
    try:
        code = args.func(args, manifest)
    except EqforgeError as exc:
        print(f"eqforge: {exc}", file=sys.stderr)
        return 1
    manifest.emit()
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
