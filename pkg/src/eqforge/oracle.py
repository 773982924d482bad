"""Payoff oracles: the built-in accuracy surface and the external client.

The built-in oracle is a four-knob closed form standing in for a trained
classifier's accuracy. External oracles are child processes speaking a
newline-delimited JSON protocol on their standard streams:

    request:  {"type": "accuracy", "h": <int>, "m": [<int>, ...], "seed": <int>}
    response: {"type": "accuracy", "value": <float>}
           or {"type": "error", "message": <string>}

One response answers the most recent request; the client enforces strict
alternation and never clamps out-of-range replies.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass
from typing import Sequence

from . import _kernels
from .errors import (
    OracleProtocolError,
    OracleRangeError,
    OracleRemoteError,
    OracleSpawnError,
    OracleTimeoutError,
    ProfileError,
)
from .game import (
    BuiltinAccuracyParams,
    GameConfig,
    OracleBinding,
    Outcome,
    check_profile,
    player_costs,
    utilities,
)


def builtin_accuracy(
    params: BuiltinAccuracyParams,
    counts: Sequence[int],
    poison_weights: Sequence[float],
) -> float:
    """Closed-form accuracy of a profile under the built-in model.

    Deterministic; the learning curve rewards total samples while the
    poison ratio (weighted malicious share of the dataset) degrades the
    result, clamped to [floor, 1].
    """
    n = 0.0
    b = 0.0
    for i in range(len(counts)):
        n += counts[i]
        b += poison_weights[i] * counts[i]
    return _kernels.accuracy_from_totals(
        n, b, params.a_max, params.kappa, params.lam, params.floor
    )


class BuiltinOracle:
    """Pure in-process oracle; safe to share across threads."""

    concurrency_safe = True

    def __init__(self, params: BuiltinAccuracyParams, poison_weights: Sequence[float]):
        self.params = params
        self.poison_weights = tuple(poison_weights)

    def query(self, counts: Sequence[int], seed: int) -> float:
        return builtin_accuracy(self.params, counts, self.poison_weights)

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class ExternalOracle:
    """Client for a child-process oracle; one request in flight at a time.

    The child is spawned lazily on first query and serialized behind a
    lock. Parallel callers need distinct instances.
    """

    concurrency_safe = False

    def __init__(self, command: str, timeout_ms: int = 10000):
        self.command = command
        self.timeout_ms = timeout_ms
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue | None = None
        self._lock = threading.Lock()
        self._dead = False

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
            self._dead = True
            raise OracleSpawnError(f"cannot start oracle {self.command!r}: {exc}") from exc
        self._lines = queue.Queue()

        def _pump(stream, sink):
            for line in stream:
                sink.put(line)
            sink.put(None)

        threading.Thread(
            target=_pump, args=(self._proc.stdout, self._lines), daemon=True
        ).start()

    def query(self, counts: Sequence[int], seed: int) -> float:
        with self._lock:
            if self._dead:
                raise OracleSpawnError(f"oracle {self.command!r} is no longer usable")
            if self._proc is None:
                self._spawn()
            request = {
                "type": "accuracy",
                "h": counts[0],
                "m": list(counts[1:]),
                "seed": seed,
            }
            try:
                self._proc.stdin.write(json.dumps(request) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                self._fail()
                raise OracleSpawnError(
                    f"oracle {self.command!r} closed its input: {exc}"
                ) from exc
            try:
                line = self._lines.get(timeout=self.timeout_ms / 1000.0)
            except queue.Empty:
                self._fail()
                raise OracleTimeoutError(
                    f"oracle did not answer within {self.timeout_ms} ms"
                ) from None
            if line is None:
                self._fail()
                raise OracleProtocolError("oracle closed its output stream mid-session")
            return self._parse(line)

    def _parse(self, line: str) -> float:
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            self._fail()
            raise OracleProtocolError(f"oracle sent invalid JSON: {line!r}") from exc
        if not isinstance(reply, dict):
            self._fail()
            raise OracleProtocolError(f"oracle reply is not an object: {line!r}")
        kind = reply.get("type")
        if kind == "error":
            raise OracleRemoteError(str(reply.get("message", "unspecified oracle error")))
        if kind != "accuracy" or "value" not in reply:
            self._fail()
            raise OracleProtocolError(f"unexpected oracle reply: {line!r}")
        value = reply["value"]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            self._fail()
            raise OracleProtocolError(f"oracle value is not a number: {value!r}")
        if not 0.0 <= value <= 1.0:
            raise OracleRangeError(f"oracle value {value} outside [0, 1]")
        return float(value)

    def _fail(self) -> None:
        self._dead = True
        self.close_process()

    def close_process(self) -> None:
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

    def close(self) -> None:
        with self._lock:
            self.close_process()
            self._dead = True

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class CachingOracle:
    """Memoizes an inner oracle by (profile, seed).

    Concurrent readers are fine; insertion happens behind a lock so a
    cached pair triggers at most one protocol exchange.
    """

    def __init__(self, inner):
        self.inner = inner
        self._cache: dict = {}
        self._lock = threading.Lock()

    @property
    def concurrency_safe(self):
        return self.inner.concurrency_safe

    def query(self, counts: Sequence[int], seed: int) -> float:
        key = (tuple(counts), seed)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = self.inner.query(counts, seed)
        with self._lock:
            self._cache.setdefault(key, value)
        return self._cache[key]

    def close(self) -> None:
        self.inner.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def open_oracle(config: GameConfig):
    """Build the oracle session a config is bound to (context manager)."""
    binding = config.oracle
    binding.validate()
    if binding.kind == "builtin":
        oracle = BuiltinOracle(binding.params, config.poison_weights)
    else:
        oracle = ExternalOracle(binding.command, binding.timeout_ms)
    if binding.cache:
        return CachingOracle(oracle)
    return oracle


def query_accuracy(
    binding: OracleBinding,
    counts: Sequence[int],
    seed: int,
    poison_weights: Sequence[float] = (),
) -> float:
    """One-shot accuracy query against a binding.

    For repeated queries against an external oracle prefer
    :func:`open_oracle`, which keeps the child process alive.
    """
    binding.validate()
    if binding.kind == "builtin":
        return builtin_accuracy(binding.params, counts, poison_weights)
    with ExternalOracle(binding.command, binding.timeout_ms) as oracle:
        return oracle.query(counts, seed)


def evaluate(
    config: GameConfig, counts: Sequence[int], seed: int = 0, *, oracle=None
) -> Outcome:
    """Query the bound oracle once and derive costs and utilities.

    Deterministic for a fixed (config, profile, seed); oracle failures
    propagate without a partial Outcome.
    """
    counts = check_profile(config, counts)
    own = None
    if oracle is None:
        own = oracle = open_oracle(config)
    try:
        accuracy = oracle.query(counts, seed)
    finally:
        if own is not None:
            own.close()
    return Outcome(
        accuracy=accuracy,
        costs=player_costs(config, counts),
        utilities=utilities(config, counts, accuracy),
        profile=counts,
    )


@dataclass(frozen=True)
class MonotonicityReport:
    """Accuracy means along a one-player sweep plus the trend verdict."""

    player: int
    rows: tuple[tuple[int, float], ...]
    non_increasing: bool
    eps_mono: float


def monotonicity_report(
    config: GameConfig,
    player: int,
    fixed: Sequence[int],
    counts: Sequence[int],
    seeds: Sequence[int],
    *,
    eps_mono: float = 0.01,
    oracle=None,
) -> MonotonicityReport:
    """Sweep one malicious player's count and average accuracy over seeds.

    The verdict is true when each successive mean rises by at most
    ``eps_mono`` over its predecessor, i.e. the column is non-increasing
    within tolerance.
    """
    fixed = check_profile(config, fixed)
    if not 0 <= player < config.n_players:
        raise ProfileError(f"no player {player} in this game")
    if config.players[player].is_honest:
        raise ProfileError("sweep player must be malicious")
    if not counts:
        raise ProfileError("sweep grid must be non-empty")
    own = None
    if oracle is None:
        own = oracle = open_oracle(config)
    rows = []
    try:
        for c in counts:
            probe = list(fixed)
            probe[player] = c
            probe = check_profile(config, probe)
            total = 0.0
            for s in seeds:
                try:
                    total += oracle.query(probe, s)
                except Exception as exc:
                    raise type(exc)(f"at sweep count {c}: {exc}") from exc
            rows.append((c, total / len(seeds)))
    finally:
        if own is not None:
            own.close()
    verdict = all(b <= a + eps_mono for (_, a), (_, b) in zip(rows, rows[1:]))
    return MonotonicityReport(
        player=player, rows=tuple(rows), non_increasing=verdict, eps_mono=eps_mono
    )
