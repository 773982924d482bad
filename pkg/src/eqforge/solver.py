"""Equilibrium machinery: best responses, certificates, enumeration,
best-response dynamics.

All operations work over a count grid: player i may pick any multiple of
``step`` in [0, cap_i], and the cap itself is always admissible. Ties in
best responses break toward the smaller count so results are stable.

Games bound to the built-in oracle route exhaustive scans through the
compiled kernel; external oracles take the generic path, which issues one
protocol query per evaluated profile.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import prod
from typing import Sequence

from . import _kernels
from .errors import BudgetExceededError, OracleError, ProfileError
from .game import GameConfig, Outcome, check_profile
from .oracle import evaluate, open_oracle

DEFAULT_EPS_GAIN = 1e-9
DEFAULT_BUDGET = 10_000_000

# below this many profile evaluations a process pool costs more than it saves
_PARALLEL_THRESHOLD = 200_000


@dataclass(frozen=True)
class Grid:
    """Deviation grid: multiples of ``step`` within each player's cap."""

    step: int = 1

    def __post_init__(self):
        if self.step < 1:
            raise ProfileError(f"grid step must be >= 1, got {self.step}")

    def admissible(self, cap: int) -> list[int]:
        """Counts player with this cap may choose; includes 0 and the cap."""
        counts = list(range(0, cap + 1, self.step))
        if counts[-1] != cap:
            counts.append(cap)
        return counts

    def contains(self, count: int, cap: int) -> bool:
        return 0 <= count <= cap and (count % self.step == 0 or count == cap)


@dataclass(frozen=True)
class NashCertificate:
    """Per-player best unilateral deviation gains over a grid.

    ``is_equilibrium`` holds exactly when no gain exceeds ``eps_gain``.
    """

    profile: tuple[int, ...]
    gains: tuple[float, ...]
    grid_step: int
    is_equilibrium: bool
    eps_gain: float

    @property
    def max_gain(self) -> float:
        return max(self.gains)

    def to_dict(self) -> dict:
        return {
            "profile": list(self.profile),
            "gains": list(self.gains),
            "max_gain": self.max_gain,
            "grid_step": self.grid_step,
            "eps_gain": self.eps_gain,
            "is_equilibrium": self.is_equilibrium,
        }


@dataclass(frozen=True)
class DynamicsStep:
    """One trace entry; ``mover`` is None for the start evaluation."""

    profile: tuple[int, ...]
    outcome: Outcome
    mover: int | None


@dataclass(frozen=True)
class Trace:
    """Best-response dynamics trace; consecutive steps differ in at most
    one player's count."""

    steps: tuple[DynamicsStep, ...]
    status: str  # converged | max_rounds | oracle_error
    error: str | None = None

    @property
    def final(self) -> tuple[int, ...]:
        return self.steps[-1].profile


def _require_on_grid(config: GameConfig, counts, grid: Grid) -> tuple[int, ...]:
    counts = check_profile(config, counts)
    for i, (c, cap) in enumerate(zip(counts, config.caps)):
        if not grid.contains(c, cap):
            raise ProfileError(
                f"count {c} for player {i} is off the step-{grid.step} grid"
            )
    return counts


def best_response(
    config: GameConfig,
    counts: Sequence[int],
    player: int,
    grid: Grid,
    seed: int = 0,
    *,
    oracle=None,
) -> tuple[int, float]:
    """Utility-maximizing admissible count for one player, others fixed.

    Returns (count, utility); ties break toward the smaller count.
    """
    counts = check_profile(config, counts)
    if not 0 <= player < config.n_players:
        raise ProfileError(f"no player {player} in this game")
    own = None
    if oracle is None:
        own = oracle = open_oracle(config)
    best_count = None
    best_utility = None
    try:
        for c in grid.admissible(config.players[player].cap):
            probe = list(counts)
            probe[player] = c
            try:
                outcome = evaluate(config, probe, seed, oracle=oracle)
            except OracleError as exc:
                raise type(exc)(f"at candidate count {c}: {exc}") from exc
            u = outcome.utilities[player]
            if best_utility is None or u > best_utility:
                best_count, best_utility = c, u
    finally:
        if own is not None:
            own.close()
    return best_count, best_utility


def nash_certificate(
    config: GameConfig,
    counts: Sequence[int],
    grid: Grid,
    seed: int = 0,
    *,
    eps_gain: float = DEFAULT_EPS_GAIN,
    oracle=None,
) -> NashCertificate:
    """Exact deviation-gain scan of a profile over the grid."""
    counts = _require_on_grid(config, counts, grid)
    own = None
    if oracle is None:
        own = oracle = open_oracle(config)
    try:
        current = evaluate(config, counts, seed, oracle=oracle)
        gains = []
        for player in range(config.n_players):
            _, best_u = best_response(config, counts, player, grid, seed, oracle=oracle)
            gains.append(best_u - current.utilities[player])
    finally:
        if own is not None:
            own.close()
    gains = tuple(gains)
    return NashCertificate(
        profile=counts,
        gains=gains,
        grid_step=grid.step,
        is_equilibrium=max(gains) <= eps_gain,
        eps_gain=eps_gain,
    )


def _kernel_args(config: GameConfig, grid: Grid):
    params = config.oracle.params
    return {
        "admissible": [grid.admissible(cap) for cap in config.caps],
        "costs": list(config.unit_costs),
        "betas": list(config.poison_weights),
        "a_max": params.a_max,
        "kappa": params.kappa,
        "lam": params.lam,
        "floor": params.floor,
    }


def _scan_chunk(args):
    kwargs, first_counts, eps_gain = args
    visit = [first_counts] + kwargs["admissible"][1:]
    return _kernels.scan_equilibria(
        kwargs["admissible"],
        kwargs["costs"],
        kwargs["betas"],
        kwargs["a_max"],
        kwargs["kappa"],
        kwargs["lam"],
        kwargs["floor"],
        eps_gain,
        visit=visit,
    )


def enumerate_equilibria(
    config: GameConfig,
    grid: Grid,
    seed: int = 0,
    *,
    eps_gain: float = DEFAULT_EPS_GAIN,
    budget: int = DEFAULT_BUDGET,
    jobs: int | None = None,
    oracle=None,
) -> list[tuple[int, ...]]:
    """Exhaustive scan for every on-grid pure Nash profile.

    Deterministic lexicographic order regardless of worker count. Raises
    BudgetExceededError naming the required budget when the grid product
    is larger than ``budget``.
    """
    admissible = [grid.admissible(cap) for cap in config.caps]
    required = prod(len(a) for a in admissible)
    if required > budget:
        raise BudgetExceededError(required, budget)

    if config.oracle.kind == "builtin":
        kwargs = _kernel_args(config, grid)
        jobs = jobs or os.cpu_count() or 1
        per_profile = sum(len(a) for a in admissible)
        if jobs > 1 and len(admissible[0]) > 1 and required * per_profile > _PARALLEL_THRESHOLD:
            tasks = [(kwargs, [c], eps_gain) for c in admissible[0]]
            out: list[tuple[int, ...]] = []
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for part in pool.map(_scan_chunk, tasks):
                    out.extend(part)
            return out
        return _kernels.scan_equilibria(
            kwargs["admissible"],
            kwargs["costs"],
            kwargs["betas"],
            kwargs["a_max"],
            kwargs["kappa"],
            kwargs["lam"],
            kwargs["floor"],
            eps_gain,
        )

    # generic path: one oracle session, one certificate scan per profile
    own = None
    if oracle is None:
        own = oracle = open_oracle(config)
    out = []
    try:
        for counts in _lexicographic(admissible):
            try:
                cert = nash_certificate(
                    config, counts, grid, seed, eps_gain=eps_gain, oracle=oracle
                )
            except OracleError as exc:
                raise type(exc)(f"at profile {counts}: {exc}") from exc
            if cert.is_equilibrium:
                out.append(counts)
    finally:
        if own is not None:
            own.close()
    return out


def _lexicographic(admissible):
    k = len(admissible)
    idx = [0] * k
    while True:
        yield tuple(admissible[i][idx[i]] for i in range(k))
        pos = k - 1
        while pos >= 0:
            idx[pos] += 1
            if idx[pos] < len(admissible[pos]):
                break
            idx[pos] = 0
            pos -= 1
        if pos < 0:
            return


def run_dynamics(
    config: GameConfig,
    start: Sequence[int],
    grid: Grid,
    max_rounds: int = 200,
    eps: float = DEFAULT_EPS_GAIN,
    seed: int = 0,
    *,
    oracle=None,
) -> Trace:
    """Sequential best-response dynamics from a starting profile.

    Players move in id order; a player moves only when its gain exceeds
    ``eps``, so every move strictly improves the mover. Converged means a
    full round passed with no move.
    """
    start = _require_on_grid(config, start, grid)
    own = None
    if oracle is None:
        own = oracle = open_oracle(config)
    steps = []
    status = "max_rounds"
    error = None
    try:
        current = start
        outcome = evaluate(config, current, seed, oracle=oracle)
        steps.append(DynamicsStep(profile=current, outcome=outcome, mover=None))
        for _ in range(max_rounds):
            moved = False
            for player in range(config.n_players):
                br_count, br_utility = best_response(
                    config, current, player, grid, seed, oracle=oracle
                )
                if br_utility - outcome.utilities[player] > eps:
                    probe = list(current)
                    probe[player] = br_count
                    current = tuple(probe)
                    outcome = evaluate(config, current, seed, oracle=oracle)
                    steps.append(
                        DynamicsStep(profile=current, outcome=outcome, mover=player)
                    )
                    moved = True
            if not moved:
                status = "converged"
                break
    except OracleError as exc:
        status = "oracle_error"
        error = str(exc)
    finally:
        if own is not None:
            own.close()
    return Trace(steps=tuple(steps), status=status, error=error)
