"""Perturbed game scenarios and robustness evaluation.

New scenarios are built by multiplying selected accuracy-surface and
cost parameters by independent factors drawn uniformly from
[1-delta, 1+delta]. Factors come from a counter-based generator keyed by
(seed, scenario id, parameter name), so scenario lists and reports are
byte-stable for a fixed spec.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from typing import Sequence

from .errors import ConfigError, OracleError, ProfileError
from .game import BuiltinAccuracyParams, GameConfig, check_profile
from .oracle import evaluate, open_oracle

ALLOWED_TARGETS = ("a_max", "kappa", "lambda", "poison_weight", "unit_cost")


@dataclass(frozen=True)
class PerturbationSpec:
    """How many scenarios to draw and which parameters to shake."""

    delta: float
    targets: tuple[str, ...] = ALLOWED_TARGETS
    count: int = 1
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 <= self.delta < 1.0:
            raise ConfigError("delta", "must be in [0, 1)")
        if self.count < 1:
            raise ConfigError("count", "must be >= 1")
        if not self.targets:
            raise ConfigError("targets", "must be non-empty")
        for t in self.targets:
            if t not in ALLOWED_TARGETS:
                raise ConfigError("targets", f"unknown target {t!r}")


def _factor(seed: int, scenario_id: int, name: str, delta: float) -> float:
    """Deterministic multiplier in [1-delta, 1+delta]."""
    digest = hashlib.sha256(f"{seed}:{scenario_id}:{name}".encode()).digest()
    u = int.from_bytes(digest[:8], "big") / 2.0**64
    return 1.0 + delta * (2.0 * u - 1.0)


def generate_scenarios(base: GameConfig, spec: PerturbationSpec) -> list[GameConfig]:
    """K perturbed copies of a builtin-oracle game.

    a_max is clamped into (floor, 1] and lambda into [0, 1] so every
    scenario still satisfies the type invariants.
    """
    spec.validate()
    if base.oracle.kind != "builtin":
        raise ConfigError(
            "oracle", "scenario generation needs the builtin oracle; perturb external oracles via seeds"
        )
    out = []
    params = base.oracle.params
    for k in range(spec.count):
        a_max, kappa, lam = params.a_max, params.kappa, params.lam
        if "a_max" in spec.targets:
            a_max = a_max * _factor(spec.seed, k, "a_max", spec.delta)
            a_max = min(1.0, max(a_max, params.floor + 1e-12))
        if "kappa" in spec.targets:
            kappa = kappa * _factor(spec.seed, k, "kappa", spec.delta)
        if "lambda" in spec.targets:
            lam = lam * _factor(spec.seed, k, "lambda", spec.delta)
            lam = min(1.0, max(0.0, lam))
        players = []
        for p in base.players:
            unit_cost = p.unit_cost
            poison_weight = p.poison_weight
            if "unit_cost" in spec.targets:
                unit_cost = unit_cost * _factor(spec.seed, k, f"unit_cost[{p.id}]", spec.delta)
            if "poison_weight" in spec.targets and not p.is_honest:
                poison_weight = poison_weight * _factor(
                    spec.seed, k, f"poison_weight[{p.id}]", spec.delta
                )
            players.append(replace(p, unit_cost=unit_cost, poison_weight=poison_weight))
        new_params = BuiltinAccuracyParams(
            a_max=a_max, kappa=kappa, lam=lam, floor=params.floor
        )
        new_params.validate()
        out.append(
            replace(
                base,
                players=tuple(players),
                oracle=replace(base.oracle, params=new_params),
                label=f"{base.label}#{k}" if base.label else f"scenario#{k}",
            )
        )
    return out


@dataclass(frozen=True)
class RobustnessRow:
    scenario: int
    profile_label: str
    accuracy: float
    utilities: tuple[float, ...]


@dataclass(frozen=True)
class RobustnessReport:
    """Cross product of profiles x scenarios plus dominance fractions.

    ``dominance[label][i]`` is the share of scenarios in which profile
    ``label`` gives player i at least the baseline profile's utility.
    """

    rows: tuple[RobustnessRow, ...]
    dominance: dict[str, tuple[float, ...]]
    baseline_label: str
    n_scenarios: int
    n_players: int

    def to_summary_dict(self) -> dict:
        return {
            "baseline": self.baseline_label,
            "scenarios": self.n_scenarios,
            "dominance": {
                label: list(fractions) for label, fractions in sorted(self.dominance.items())
            },
        }


def evaluate_profiles(
    profiles: Sequence[tuple[str, Sequence[int]]],
    scenarios: Sequence[GameConfig],
    seed: int = 0,
    *,
    baseline_label: str = "baseline",
) -> RobustnessReport:
    """Evaluate labeled profiles across scenarios, in (scenario, profile)
    order, and score each against the baseline-labeled profile."""
    if not profiles:
        raise ProfileError("no profiles to evaluate")
    if not scenarios:
        raise ProfileError("no scenarios to evaluate against")
    labels = [label for label, _ in profiles]
    if len(set(labels)) != len(labels):
        raise ProfileError("profile labels must be unique")
    if baseline_label not in labels:
        raise ProfileError(f"no profile labeled {baseline_label!r}")

    rows = []
    per_scenario: dict[tuple[int, str], tuple[float, ...]] = {}
    for s_id, scenario in enumerate(scenarios):
        with open_oracle(scenario) as oracle:
            for label, counts in profiles:
                counts = check_profile(scenario, counts)
                try:
                    outcome = evaluate(scenario, counts, seed, oracle=oracle)
                except OracleError as exc:
                    raise type(exc)(
                        f"at scenario {s_id}, profile {label!r}: {exc}"
                    ) from exc
                rows.append(
                    RobustnessRow(
                        scenario=s_id,
                        profile_label=label,
                        accuracy=outcome.accuracy,
                        utilities=outcome.utilities,
                    )
                )
                per_scenario[(s_id, label)] = outcome.utilities

    n_players = scenarios[0].n_players
    n_scenarios = len(scenarios)
    dominance = {}
    for label in labels:
        wins = [0] * n_players
        for s_id in range(n_scenarios):
            focal = per_scenario[(s_id, label)]
            base = per_scenario[(s_id, baseline_label)]
            for i in range(n_players):
                if focal[i] >= base[i]:
                    wins[i] += 1
        dominance[label] = tuple(w / n_scenarios for w in wins)
    return RobustnessReport(
        rows=tuple(rows),
        dominance=dominance,
        baseline_label=baseline_label,
        n_scenarios=n_scenarios,
        n_players=n_players,
    )


def write_report_csv(report: RobustnessReport, path) -> None:
    """Emit the row table as CSV: scenario,profile,accuracy,u_0,u_1,..."""
    header = ["scenario", "profile", "accuracy"] + [
        f"u_{i}" for i in range(report.n_players)
    ]
    lines = [",".join(header)]
    for row in report.rows:
        cells = [str(row.scenario), row.profile_label, repr(row.accuracy)]
        cells += [repr(u) for u in row.utilities]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_summary_json(report: RobustnessReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(report.to_summary_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
