"""Advisor-guided exploration of the strategy space.

An advisor maps exploration history to the next candidate profile. The
built-in heuristic plays a damped best response: from the most recently
evaluated profile it finds the player with the largest unilateral gain
and moves that player halfway toward its best response. External
advisors (e.g. an LLM bridge) are child processes speaking
newline-delimited JSON:

    request:  {"type": "advise", "scenario": {...}, "history": [
                  {"profile": [...], "accuracy": <float>, "utilities": [...]}, ...]}
    response: {"type": "proposal", "action": "propose", "profile": [...]}
           or {"type": "proposal", "action": "stop"}

A silent or malformed external advisor degrades to the heuristic for
that step; exploration then matches the pure-heuristic run exactly.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Sequence

from .errors import AdvisorError, OracleError, ProfileError
from .game import GameConfig, Outcome, check_profile
from .oracle import evaluate, open_oracle
from .solver import DEFAULT_EPS_GAIN, Grid, NashCertificate, best_response, nash_certificate

#: history entry: (profile, outcome) pair
HistoryEntry = tuple[tuple[int, ...], Outcome]


@dataclass(frozen=True)
class Proposal:
    """Advisor output: either the next profile to evaluate or a stop."""

    action: str  # "propose" | "stop"
    profile: tuple[int, ...] | None = None
    rationale: str = ""
    fallback: bool = False


@dataclass(frozen=True)
class ExplorationStep:
    profile: tuple[int, ...]
    outcome: Outcome
    source: str  # init | heuristic | external | fallback
    rationale: str = ""


@dataclass
class ExplorationTrace:
    steps: list[ExplorationStep] = field(default_factory=list)
    status: str = "max_steps"  # advisor_stop | steady | max_steps | oracle_error
    error: str | None = None

    @property
    def converged(self) -> bool:
        return self.status in ("advisor_stop", "steady")

    @property
    def history(self) -> list[HistoryEntry]:
        return [(s.profile, s.outcome) for s in self.steps]


def heuristic_propose(
    history: Sequence[HistoryEntry],
    config: GameConfig,
    grid: Grid,
    seed: int = 0,
    *,
    eps_u: float = DEFAULT_EPS_GAIN,
    oracle=None,
) -> Proposal:
    """Damped best-response proposal from the latest evaluated profile.

    Stops once no player can gain more than ``eps_u`` by deviating on the
    grid; otherwise moves the max-gain player (ties to the lowest id)
    from its count x toward its best response b by max(1, round(|b-x|/2)).
    """
    if not history:
        raise ProfileError("exploration history is empty")
    anchor, outcome = history[-1]
    own = None
    if oracle is None:
        own = oracle = open_oracle(config)
    try:
        gains = []
        responses = []
        for player in range(config.n_players):
            br_count, br_utility = best_response(
                config, anchor, player, grid, seed, oracle=oracle
            )
            responses.append(br_count)
            gains.append(br_utility - outcome.utilities[player])
    finally:
        if own is not None:
            own.close()
    mover = max(range(config.n_players), key=lambda i: (gains[i], -i))
    if gains[mover] <= eps_u:
        return Proposal(
            action="stop",
            rationale=f"no player gains more than {eps_u} by deviating",
        )
    x = anchor[mover]
    b = responses[mover]
    delta = max(1, int(abs(b - x) * 0.5 + 0.5))
    nxt = x + delta if b > x else x - delta
    profile = list(anchor)
    profile[mover] = nxt
    return Proposal(
        action="propose",
        profile=tuple(profile),
        rationale=(
            f"player {mover}: {x} -> {nxt} toward best response {b} "
            f"(gain {gains[mover]:.6g})"
        ),
    )


class ExternalAdvisor:
    """Child-process advisor speaking the advise/proposal protocol."""

    def __init__(self, command: str, timeout_ms: int = 10000):
        self.command = command
        self.timeout_ms = timeout_ms
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue | None = None

    def _spawn(self) -> None:
        try:
            self._proc = subprocess.Popen(
                shlex.split(self.command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise AdvisorError(f"cannot start advisor {self.command!r}: {exc}") from exc
        self._lines = queue.Queue()

        def _pump(stream, sink):
            for line in stream:
                sink.put(line)
            sink.put(None)

        threading.Thread(
            target=_pump, args=(self._proc.stdout, self._lines), daemon=True
        ).start()

    def advise(self, history: Sequence[HistoryEntry], config: GameConfig) -> Proposal:
        """One advise exchange; degraded (fallback) proposal on timeout or
        malformed replies, AdvisorError only when the process cannot run."""
        if self._proc is None:
            self._spawn()
        request = {
            "type": "advise",
            "scenario": config.describe(),
            "history": [
                {
                    "profile": list(profile),
                    "accuracy": outcome.accuracy,
                    "utilities": list(outcome.utilities),
                }
                for profile, outcome in history
            ],
        }
        try:
            self._proc.stdin.write(json.dumps(request) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise AdvisorError(f"advisor {self.command!r} closed its input: {exc}") from exc
        try:
            line = self._lines.get(timeout=self.timeout_ms / 1000.0)
        except queue.Empty:
            return Proposal(action="stop", fallback=True, rationale="advisor timed out")
        if line is None:
            raise AdvisorError(f"advisor {self.command!r} closed its output stream")
        return self._parse(line, config)

    def _parse(self, line: str, config: GameConfig) -> Proposal:
        def degraded(reason: str) -> Proposal:
            return Proposal(action="stop", fallback=True, rationale=reason)

        try:
            reply = json.loads(line)
        except json.JSONDecodeError:
            return degraded(f"advisor sent invalid JSON: {line.strip()!r}")
        if not isinstance(reply, dict) or reply.get("type") != "proposal":
            return degraded(f"unexpected advisor reply: {line.strip()!r}")
        action = reply.get("action")
        if action == "stop":
            return Proposal(action="stop", rationale=str(reply.get("rationale", "")))
        if action != "propose":
            return degraded(f"unknown advisor action {action!r}")
        profile = reply.get("profile")
        if not isinstance(profile, list):
            return degraded("advisor proposal lacks a profile")
        try:
            counts = check_profile(config, [int(c) for c in profile])
        except (ProfileError, TypeError, ValueError) as exc:
            return degraded(f"advisor proposed an invalid profile {profile!r}: {exc}")
        return Proposal(
            action="propose", profile=counts, rationale=str(reply.get("rationale", ""))
        )

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=1.0)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def external_propose(
    advisor: ExternalAdvisor, history: Sequence[HistoryEntry], config: GameConfig
) -> Proposal:
    """Ask an external advisor for the next step (see ExternalAdvisor)."""
    return advisor.advise(history, config)


def explore(
    config: GameConfig,
    advisor: str | ExternalAdvisor = "heuristic",
    init: Sequence[Sequence[int]] = (),
    max_steps: int = 200,
    eps: float = 1e-4,
    seed: int = 0,
    *,
    grid: Grid | None = None,
    eps_u: float = DEFAULT_EPS_GAIN,
    oracle=None,
) -> tuple[ExplorationTrace, tuple[int, ...] | None, NashCertificate | None]:
    """Run the explore loop: evaluate init candidates, then alternate
    advise -> evaluate -> record until the advisor stops, utilities go
    steady (max per-player |du| < eps across two consecutive proposals),
    or ``max_steps`` evaluations are reached.

    The returned profile is the last evaluated profile for converged
    runs and the best profile by honest utility (ties to the most
    recent) for truncated ones; it always carries a fresh step-1
    certificate. On oracle failure the partial trace is returned with
    profile and certificate set to None.
    """
    if not init:
        raise ProfileError("explore needs at least one init profile")
    candidates = [check_profile(config, p) for p in init]
    grid = grid or Grid(config.grid_step)
    use_heuristic = advisor == "heuristic"
    if not use_heuristic and not isinstance(advisor, ExternalAdvisor):
        raise AdvisorError(f"unknown advisor {advisor!r}")

    trace = ExplorationTrace()
    own = None
    if oracle is None:
        own = oracle = open_oracle(config)
    try:
        try:
            # every init candidate is evaluated, even past max_steps
            for counts in candidates:
                outcome = evaluate(config, counts, seed, oracle=oracle)
                trace.steps.append(
                    ExplorationStep(profile=counts, outcome=outcome, source="init")
                )
            proposal_utilities: list[tuple[float, ...]] = []
            while len(trace.steps) < max_steps:
                if use_heuristic:
                    proposal = heuristic_propose(
                        trace.history, config, grid, seed, eps_u=eps_u, oracle=oracle
                    )
                    source = "heuristic"
                else:
                    proposal = external_propose(advisor, trace.history, config)
                    source = "external"
                    if proposal.fallback:
                        note = proposal.rationale
                        proposal = heuristic_propose(
                            trace.history, config, grid, seed, eps_u=eps_u, oracle=oracle
                        )
                        source = "fallback"
                        proposal = Proposal(
                            action=proposal.action,
                            profile=proposal.profile,
                            rationale=f"{note}; {proposal.rationale}".strip("; "),
                            fallback=True,
                        )
                if proposal.action == "stop":
                    trace.status = "advisor_stop"
                    break
                outcome = evaluate(config, proposal.profile, seed, oracle=oracle)
                trace.steps.append(
                    ExplorationStep(
                        profile=proposal.profile,
                        outcome=outcome,
                        source=source,
                        rationale=proposal.rationale,
                    )
                )
                proposal_utilities.append(outcome.utilities)
                if len(proposal_utilities) >= 2:
                    du = max(
                        abs(a - b)
                        for a, b in zip(proposal_utilities[-1], proposal_utilities[-2])
                    )
                    if du < eps:
                        trace.status = "steady"
                        break
        except OracleError as exc:
            trace.status = "oracle_error"
            trace.error = str(exc)
            return trace, None, None

        if trace.converged:
            final = trace.steps[-1].profile
        else:
            # truncated: report the best profile seen for the honest player
            best = max(
                range(len(trace.steps)),
                key=lambda i: (trace.steps[i].outcome.utilities[0], i),
            )
            final = trace.steps[best].profile
        certificate = nash_certificate(config, final, Grid(1), seed, oracle=oracle)
        return trace, final, certificate
    finally:
        if own is not None:
            own.close()
