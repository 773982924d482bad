"""End-to-end: the engine driving the bundled payoff-service oracle.

Skipped unless the TypeScript service has been built
(cd payoff-service && npm install && npm run build).
"""

import os
import shutil

import pytest

from eqforge import Grid, evaluate, monotonicity_report, nash_certificate, open_oracle

from conftest import make_config

SERVICE = os.path.join(
    os.path.dirname(__file__), "..", "payoff-service", "dist", "main.js"
)

pytestmark = pytest.mark.skipif(
    shutil.which("node") is None or not os.path.exists(SERVICE),
    reason="payoff-service not built",
)


@pytest.fixture
def service_game():
    return make_config(
        caps=(200, 200, 200),
        oracle={
            "kind": "external",
            "command": f"node {os.path.abspath(SERVICE)}",
            "timeout_ms": 30000,
            "cache": True,
        },
    )


def test_clean_profile_scores_high(service_game):
    out = evaluate(service_game, (200, 0, 0), seed=7)
    assert 0.9 <= out.accuracy <= 1.0
    assert out.utilities[0] == out.accuracy - 0.0005 * 200


def test_identical_queries_are_deterministic(service_game):
    with open_oracle(service_game) as oracle:
        a = oracle.query((120, 40, 10), 3)
    with open_oracle(service_game) as oracle:
        b = oracle.query((120, 40, 10), 3)
    assert a == b


def test_poison_sweep_through_the_wire(service_game):
    rep = monotonicity_report(
        service_game, 1, (150, 0, 0), [0, 100, 200], [0, 1, 2], eps_mono=0.02
    )
    assert rep.non_increasing
    accs = [acc for _, acc in rep.rows]
    assert accs[0] > accs[-1]


def test_certificate_over_external_oracle(service_game):
    cert = nash_certificate(service_game, (200, 0, 0), Grid(100), seed=1)
    assert len(cert.gains) == 3
    assert all(g >= 0 for g in cert.gains)
