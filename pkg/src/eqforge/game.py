"""Domain types for the data-contribution game.

A game couples one honest contributor with one or more poisoning
contributors. Every player independently picks how many samples to
contribute (an integer in [0, cap]); a payoff oracle maps the resulting
profile to model accuracy; utilities trade accuracy against per-sample
cost: the honest player earns ``accuracy - cost``, each malicious player
earns ``-accuracy - cost``.

All types are frozen values and safe to share across workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import ConfigError, ProfileError

HONEST = "honest"
MALICIOUS = "malicious"

#: Per-sample costs of the reference three-player scenario (honest
#: collector plus two synthetic-data attackers with different generators).
DEFAULT_COSTS = (0.0005, 0.0007, 0.0008)
DEFAULT_CAP = 300


@dataclass(frozen=True)
class PlayerSpec:
    """One contributor: role, per-sample cost, cap and poison weight."""

    id: int
    role: str
    unit_cost: float
    cap: int
    poison_weight: float = 0.0

    @property
    def is_honest(self) -> bool:
        return self.role == HONEST


@dataclass(frozen=True)
class BuiltinAccuracyParams:
    """Knobs of the built-in parametric accuracy surface.

    ``a_max`` is the clean-data ceiling, ``kappa`` the learning-curve
    scale in samples, ``lam`` the poison severity, ``floor`` the
    chance-level accuracy returned for an empty dataset.
    """

    a_max: float = 0.98
    kappa: float = 25.0
    lam: float = 0.6
    floor: float = 0.5

    def validate(self, where: str = "oracle.params") -> None:
        for name in ("a_max", "kappa", "lam", "floor"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or value != value:
                raise ConfigError(f"{where}.{name}", "must be a finite number")
        if not 0.0 < self.a_max <= 1.0:
            raise ConfigError(f"{where}.a_max", "must be in (0, 1]")
        if self.kappa <= 0.0:
            raise ConfigError(f"{where}.kappa", "must be > 0")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError(f"{where}.lambda", "must be in [0, 1]")
        if not 0.0 <= self.floor < 1.0:
            raise ConfigError(f"{where}.floor", "must be in [0, 1)")
        if self.floor >= self.a_max:
            raise ConfigError(f"{where}.floor", "must be below a_max")


@dataclass(frozen=True)
class OracleBinding:
    """How accuracy is obtained: built-in closed form or external process.

    Exactly one of ``params``/``command`` is set. ``cache`` memoizes
    replies by (profile, seed); the built-in model ignores the seed.
    """

    kind: str = "builtin"
    params: BuiltinAccuracyParams | None = field(default_factory=BuiltinAccuracyParams)
    command: str | None = None
    timeout_ms: int = 10000
    cache: bool = True

    def validate(self, where: str = "oracle") -> None:
        if self.kind == "builtin":
            if self.params is None or self.command is not None:
                raise ConfigError(where, "builtin binding takes params, not a command")
            self.params.validate(f"{where}.params")
        elif self.kind == "external":
            if not self.command or self.params is not None:
                raise ConfigError(where, "external binding takes a command, not params")
            if self.timeout_ms <= 0:
                raise ConfigError(f"{where}.timeout_ms", "must be > 0")
        else:
            raise ConfigError(f"{where}.kind", f"unknown oracle kind {self.kind!r}")


@dataclass(frozen=True)
class GameConfig:
    """A fully validated game: ordered players (honest first) plus oracle."""

    players: tuple[PlayerSpec, ...]
    oracle: OracleBinding = field(default_factory=OracleBinding)
    grid_step: int = 1
    label: str = ""

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def caps(self) -> tuple[int, ...]:
        return tuple(p.cap for p in self.players)

    @property
    def unit_costs(self) -> tuple[float, ...]:
        return tuple(p.unit_cost for p in self.players)

    @property
    def poison_weights(self) -> tuple[float, ...]:
        return tuple(p.poison_weight for p in self.players)

    def describe(self) -> dict:
        """JSON-ready summary used by the advisor protocol and manifests."""
        return {
            "label": self.label,
            "grid_step": self.grid_step,
            "oracle": self.oracle.kind,
            "players": [
                {
                    "id": p.id,
                    "role": p.role,
                    "unit_cost": p.unit_cost,
                    "cap": p.cap,
                    "poison_weight": p.poison_weight,
                }
                for p in self.players
            ],
        }


@dataclass(frozen=True)
class Outcome:
    """Evaluation of one profile: accuracy, per-player costs and utilities."""

    accuracy: float
    costs: tuple[float, ...]
    utilities: tuple[float, ...]
    profile: tuple[int, ...]


def check_profile(config: GameConfig, counts: Sequence[int]) -> tuple[int, ...]:
    """Validate a strategy profile against the game and return it as a tuple."""
    counts = tuple(counts)
    if len(counts) != config.n_players:
        raise ProfileError(
            f"profile has {len(counts)} counts, game has {config.n_players} players"
        )
    for i, (c, p) in enumerate(zip(counts, config.players)):
        if not isinstance(c, int) or isinstance(c, bool):
            raise ProfileError(f"count for player {i} must be an integer, got {c!r}")
        if c < 0:
            raise ProfileError(f"count for player {i} must be >= 0, got {c}")
        if c > p.cap:
            raise ProfileError(f"count {c} for player {i} exceeds cap {p.cap}")
    return counts


def utilities(
    config: GameConfig, counts: Sequence[int], accuracy: float
) -> tuple[float, ...]:
    """Per-player utilities of a profile at a given accuracy.

    Honest player: ``accuracy - unit_cost * count``. Malicious players:
    ``-accuracy - unit_cost * count``. Pure function of its inputs.
    """
    counts = check_profile(config, counts)
    if not 0.0 <= accuracy <= 1.0:
        raise ProfileError(f"accuracy must be in [0, 1], got {accuracy}")
    out = []
    for p, c in zip(config.players, counts):
        cost = p.unit_cost * c
        out.append(accuracy - cost if p.is_honest else -accuracy - cost)
    return tuple(out)


def player_costs(config: GameConfig, counts: Sequence[int]) -> tuple[float, ...]:
    return tuple(p.unit_cost * c for p, c in zip(config.players, counts))


def _require(raw: dict, key: str, where: str):
    if key not in raw:
        raise ConfigError(where, f"missing required field {key!r}")
    return raw[key]


def _parse_player(raw, index: int) -> PlayerSpec:
    where = f"players[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(where, "must be an object")
    role = _require(raw, "role", where)
    if role not in (HONEST, MALICIOUS):
        raise ConfigError(f"{where}.role", f"must be 'honest' or 'malicious', got {role!r}")
    unit_cost = _require(raw, "unit_cost", where)
    if not isinstance(unit_cost, (int, float)) or unit_cost < 0:
        raise ConfigError(f"{where}.unit_cost", "must be a number >= 0")
    cap = _require(raw, "cap", where)
    if not isinstance(cap, int) or isinstance(cap, bool) or cap < 0:
        raise ConfigError(f"{where}.cap", "must be an integer >= 0")
    default_weight = 0.0 if role == HONEST else 1.0
    poison_weight = raw.get("poison_weight", default_weight)
    if not isinstance(poison_weight, (int, float)) or poison_weight < 0:
        raise ConfigError(f"{where}.poison_weight", "must be a number >= 0")
    if role == HONEST and poison_weight != 0:
        raise ConfigError(f"{where}.poison_weight", "must be 0 for the honest player")
    return PlayerSpec(
        id=index,
        role=role,
        unit_cost=float(unit_cost),
        cap=cap,
        poison_weight=float(poison_weight),
    )


def _parse_oracle(raw) -> OracleBinding:
    if raw is None:
        return OracleBinding()
    if not isinstance(raw, dict):
        raise ConfigError("oracle", "must be an object")
    kind = raw.get("kind", "builtin")
    cache = raw.get("cache", True)
    if not isinstance(cache, bool):
        raise ConfigError("oracle.cache", "must be a boolean")
    if kind == "builtin":
        params_raw = raw.get("params", {})
        if not isinstance(params_raw, dict):
            raise ConfigError("oracle.params", "must be an object")
        defaults = BuiltinAccuracyParams()
        params = BuiltinAccuracyParams(
            a_max=params_raw.get("a_max", defaults.a_max),
            kappa=params_raw.get("kappa", defaults.kappa),
            lam=params_raw.get("lambda", defaults.lam),
            floor=params_raw.get("floor", defaults.floor),
        )
        binding = OracleBinding(kind="builtin", params=params, cache=cache)
    elif kind == "external":
        command = raw.get("command")
        if not command or not isinstance(command, str):
            raise ConfigError("oracle.command", "external oracle needs a command string")
        timeout_ms = raw.get("timeout_ms", 10000)
        if not isinstance(timeout_ms, int) or timeout_ms <= 0:
            raise ConfigError("oracle.timeout_ms", "must be an integer > 0")
        binding = OracleBinding(
            kind="external", params=None, command=command, timeout_ms=timeout_ms, cache=cache
        )
    else:
        raise ConfigError("oracle.kind", f"unknown oracle kind {kind!r}")
    binding.validate()
    return binding


def validate_config(raw: dict) -> GameConfig:
    """Turn a parsed config document into a validated GameConfig.

    Reorders players so the honest one comes first and reassigns ids
    0..n-1 in that order. Rejects documents with anything other than
    exactly one honest player.
    """
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a JSON object")
    players_raw = _require(raw, "players", "")
    if not isinstance(players_raw, list) or not players_raw:
        raise ConfigError("players", "must be a non-empty array")
    players = [_parse_player(p, i) for i, p in enumerate(players_raw)]
    honest = [p for p in players if p.is_honest]
    if len(honest) != 1:
        raise ConfigError("players", f"exactly one honest player required, got {len(honest)}")
    if len(players) < 2:
        raise ConfigError("players", "at least 2 players required")
    ordered = honest + [p for p in players if not p.is_honest]
    ordered = tuple(replace(p, id=i) for i, p in enumerate(ordered))

    grid_step = raw.get("grid_step", 1)
    if not isinstance(grid_step, int) or isinstance(grid_step, bool) or grid_step < 1:
        raise ConfigError("grid_step", "must be an integer >= 1")
    max_step = min(max(p.cap, 1) for p in ordered)
    if grid_step > max_step:
        raise ConfigError("grid_step", f"must be <= {max_step} for these caps")

    label = raw.get("label", "")
    if not isinstance(label, str):
        raise ConfigError("label", "must be a string")

    return GameConfig(
        players=ordered,
        oracle=_parse_oracle(raw.get("oracle")),
        grid_step=grid_step,
        label=label,
    )


def load_config(path) -> GameConfig:
    """Read and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
    return validate_config(raw)


def default_config(label: str = "default") -> GameConfig:
    """The reference three-player game: caps 300, default builtin oracle."""
    return validate_config(
        {
            "label": label,
            "grid_step": 1,
            "players": [
                {"role": HONEST, "unit_cost": DEFAULT_COSTS[0], "cap": DEFAULT_CAP},
                {"role": MALICIOUS, "unit_cost": DEFAULT_COSTS[1], "cap": DEFAULT_CAP},
                {"role": MALICIOUS, "unit_cost": DEFAULT_COSTS[2], "cap": DEFAULT_CAP},
            ],
        }
    )
