import sys
import textwrap

import pytest

from eqforge import validate_config

# stub child processes used to exercise the oracle/advisor protocols
STUBS = {
    # oracle: constant pass-through value
    "echo075": """
        import sys, json
        for line in sys.stdin:
            json.loads(line)
            print(json.dumps({"type": "accuracy", "value": 0.75}), flush=True)
        """,
    # oracle: violates the [0, 1] contract
    "range13": """
        import sys, json
        for line in sys.stdin:
            print(json.dumps({"type": "accuracy", "value": 1.3}), flush=True)
        """,
    # oracle: not JSON at all
    "malformed": """
        import sys
        for line in sys.stdin:
            print("not json", flush=True)
        """,
    # oracle: explicit error record
    "errorreply": """
        import sys, json
        for line in sys.stdin:
            print(json.dumps({"type": "error", "message": "synthetic failure"}), flush=True)
        """,
    # oracle/advisor: consumes requests, never answers
    "silent": """
        import sys
        for line in sys.stdin:
            pass
        """,
    # oracle: answer changes with every exchange, exposing cache misses
    "counting": """
        import sys, json
        n = 0
        for line in sys.stdin:
            n += 1
            print(json.dumps({"type": "accuracy", "value": round(0.5 + n / 1000.0, 6)}), flush=True)
        """,
    # oracle: deterministic function of (h, m, seed)
    "mirror": """
        import sys, json
        for line in sys.stdin:
            req = json.loads(line)
            v = ((req["h"] * 31 + sum(req["m"]) * 7 + req["seed"] * 13) % 1000) / 1000.0
            print(json.dumps({"type": "accuracy", "value": v}), flush=True)
        """,
    # advisor: always stops
    "stop_advisor": """
        import sys, json
        for line in sys.stdin:
            json.loads(line)
            print(json.dumps({"type": "proposal", "action": "stop"}), flush=True)
        """,
    # advisor: proposes one fixed profile, then stops
    "fixed_advisor": """
        import sys, json
        first = True
        for line in sys.stdin:
            json.loads(line)
            if first:
                first = False
                print(json.dumps({"type": "proposal", "action": "propose",
                                  "profile": [135, 83, 82]}), flush=True)
            else:
                print(json.dumps({"type": "proposal", "action": "stop"}), flush=True)
        """,
    # advisor: proposes a profile beyond the caps
    "cap_violator": """
        import sys, json
        for line in sys.stdin:
            json.loads(line)
            print(json.dumps({"type": "proposal", "action": "propose",
                              "profile": [999, 0, 0]}), flush=True)
        """,
}


@pytest.fixture
def stub(tmp_path):
    """Write a named stub script and return the command line to run it."""

    def factory(name: str) -> str:
        path = tmp_path / f"{name}.py"
        path.write_text(textwrap.dedent(STUBS[name]).strip() + "\n")
        return f"{sys.executable} {path}"

    return factory


def make_config(
    caps=(300, 300, 300),
    grid_step=1,
    oracle=None,
    label="test",
    costs=(0.0005, 0.0007, 0.0008),
):
    raw = {
        "label": label,
        "grid_step": grid_step,
        "players": [
            {"role": "honest", "unit_cost": costs[0], "cap": caps[0]},
            {"role": "malicious", "unit_cost": costs[1], "cap": caps[1]},
            {"role": "malicious", "unit_cost": costs[2], "cap": caps[2]},
        ],
    }
    if oracle is not None:
        raw["oracle"] = oracle
    return validate_config(raw)


@pytest.fixture
def default_game():
    return make_config()


@pytest.fixture
def small_game():
    return make_config(caps=(60, 60, 60), grid_step=10)


@pytest.fixture
def external_game(stub):
    def factory(name, timeout_ms=5000, cache=True):
        return make_config(
            oracle={
                "kind": "external",
                "command": stub(name),
                "timeout_ms": timeout_ms,
                "cache": cache,
            }
        )

    return factory
