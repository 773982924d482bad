import random
from itertools import product

import pytest

from eqforge import (
    BudgetExceededError,
    Grid,
    ProfileError,
    best_response,
    enumerate_equilibria,
    nash_certificate,
    run_dynamics,
)

from conftest import make_config

# frozen by exhaustive enumeration on first validated run
E_STAR = [(60, 60, 30)]

# frozen step-1 deviation gains at (150, 75, 75) on the reference game
CERT_150_GAINS = (0.03450607287449392, 0.00020091848450043415, 0.00035153600393222906)


class TestGrid:
    def test_admissible_includes_zero_and_cap(self):
        g = Grid(50)
        assert g.admissible(60) == [0, 50, 60]
        assert g.admissible(0) == [0]
        assert g.admissible(100) == [0, 50, 100]

    def test_contains(self):
        g = Grid(50)
        assert g.contains(60, 60)  # the cap is always on-grid
        assert g.contains(50, 60)
        assert not g.contains(49, 60)
        assert not g.contains(70, 60)

    def test_step_must_be_positive(self):
        with pytest.raises(ProfileError):
            Grid(0)


class TestBestResponse:
    def test_honest_on_coarse_grid(self, default_game):
        count, utility = best_response(default_game, (0, 0, 0), 0, Grid(50))
        assert count == 200
        assert utility == pytest.approx(0.771111, abs=1e-6)

    def test_malicious_on_coarse_grid(self, default_game):
        count, utility = best_response(default_game, (200, 0, 0), 1, Grid(50))
        assert count == 150
        assert utility == pytest.approx(-0.784467, abs=1e-6)

    def test_cap_zero_single_candidate(self):
        cfg = make_config(caps=(0, 0, 0))
        count, utility = best_response(cfg, (0, 0, 0), 1, Grid(1))
        assert count == 0
        assert utility == -0.5  # floor accuracy, zero cost

    def test_tie_breaks_toward_smaller_count(self):
        # honest cap 0 keeps the dataset poisoned enough that accuracy is
        # clamped at the floor for every m1; with zero cost the malicious
        # utility is flat, so the smallest count must win
        cfg = make_config(caps=(0, 300, 300), costs=(0.0005, 0.0, 0.0008))
        count, utility = best_response(cfg, (0, 120, 0), 1, Grid(10))
        assert count == 0
        assert utility == -0.5

    def test_failing_candidate_identified(self, external_game):
        from eqforge import OracleRangeError

        cfg = external_game("range13")
        with pytest.raises(OracleRangeError, match="candidate count 0"):
            best_response(cfg, (10, 10, 10), 0, Grid(10))


class TestNashCertificate:
    def test_singleton_strategy_space(self):
        cfg = make_config(caps=(0, 0, 0))
        cert = nash_certificate(cfg, (0, 0, 0), Grid(1))
        assert cert.gains == (0.0, 0.0, 0.0)
        assert cert.is_equilibrium

    def test_reference_profile_step1(self, default_game):
        cert = nash_certificate(default_game, (150, 75, 75), Grid(1))
        assert cert.gains == CERT_150_GAINS
        assert cert.max_gain == CERT_150_GAINS[0]
        assert not cert.is_equilibrium

    def test_off_grid_profile_rejected(self, default_game):
        with pytest.raises(ProfileError, match="off the step-50 grid"):
            nash_certificate(default_game, (151, 75, 75), Grid(50))

    def test_gains_nonnegative(self, small_game):
        rng = random.Random(2)
        for _ in range(30):
            counts = tuple(rng.randrange(0, 61, 10) for _ in range(3))
            cert = nash_certificate(small_game, counts, Grid(10))
            assert all(g >= 0.0 for g in cert.gains)

    def test_grid_refinement_monotonicity(self, small_game):
        # (60, 60, 30) is certified on step 10 and stays on-grid for the
        # coarser step 30 (a multiple of 10), so it must certify there too
        counts = (60, 60, 30)
        assert all(
            Grid(30).contains(c, cap) for c, cap in zip(counts, small_game.caps)
        )
        assert nash_certificate(small_game, counts, Grid(10)).is_equilibrium
        assert nash_certificate(small_game, counts, Grid(30)).is_equilibrium

    def test_coarse_certificates_dominated_by_fine_gains(self, small_game):
        # coarser grids only remove deviations, so gains cannot grow
        rng = random.Random(17)
        for _ in range(20):
            counts = tuple(rng.randrange(0, 61, 30) for _ in range(3))
            fine = nash_certificate(small_game, counts, Grid(10))
            coarse = nash_certificate(small_game, counts, Grid(30))
            for g_fine, g_coarse in zip(fine.gains, coarse.gains):
                assert g_coarse <= g_fine + 1e-15


class TestEnumerate:
    def test_small_game_fixture(self, small_game):
        assert enumerate_equilibria(small_game, Grid(10)) == E_STAR

    def test_matches_certificates_exhaustively(self, small_game):
        by_cert = [
            counts
            for counts in product(range(0, 61, 10), repeat=3)
            if nash_certificate(small_game, counts, Grid(10)).is_equilibrium
        ]
        assert by_cert == enumerate_equilibria(small_game, Grid(10))

    def test_lambda_zero_drives_malicious_to_zero(self):
        cfg = make_config(
            caps=(60, 60, 60),
            grid_step=10,
            oracle={"kind": "builtin", "params": {"lambda": 0.0}},
        )
        found = enumerate_equilibria(cfg, Grid(10))
        assert found
        for counts in found:
            assert counts[1] == 0 and counts[2] == 0

    def test_all_zero_caps(self):
        cfg = make_config(caps=(0, 0, 0))
        assert enumerate_equilibria(cfg, Grid(1)) == [(0, 0, 0)]

    def test_budget_guard_names_requirement(self, default_game):
        with pytest.raises(BudgetExceededError) as err:
            enumerate_equilibria(default_game, Grid(1))
        assert err.value.required == 301**3
        assert "27270901" in str(err.value)

    def test_budget_override_allows_run(self, small_game):
        found = enumerate_equilibria(small_game, Grid(10), budget=343)
        assert found == E_STAR
        with pytest.raises(BudgetExceededError):
            enumerate_equilibria(small_game, Grid(10), budget=342)

    def test_parallel_scan_matches_serial(self):
        # caps 60 step 2 is large enough to engage the process pool
        cfg = make_config(caps=(60, 60, 60), grid_step=2)
        serial = enumerate_equilibria(cfg, Grid(2), jobs=1)
        parallel = enumerate_equilibria(cfg, Grid(2), jobs=2)
        assert serial == parallel
        assert serial  # the game has at least one on-grid equilibrium

    def test_generic_path_with_external_oracle(self, external_game):
        # constant accuracy: any positive count is pure cost, so the only
        # equilibrium is all zeros
        cfg = external_game("echo075")
        cfg = make_config(
            caps=(20, 20, 20),
            grid_step=10,
            oracle={"kind": "external", "command": cfg.oracle.command},
        )
        assert enumerate_equilibria(cfg, Grid(10)) == [(0, 0, 0)]


class TestRunDynamics:
    def test_equilibria_are_fixed_points(self, small_game):
        for counts in E_STAR:
            trace = run_dynamics(small_game, counts, Grid(10))
            assert trace.status == "converged"
            assert len(trace.steps) == 1
            assert trace.final == counts

    def test_converges_into_equilibrium_set(self, small_game):
        trace = run_dynamics(small_game, (60, 0, 0), Grid(10))
        assert trace.status == "converged"
        assert trace.final in E_STAR

    def test_all_starts_converge(self, small_game):
        for start in product(range(0, 61, 20), repeat=3):
            trace = run_dynamics(small_game, start, Grid(10))
            assert trace.status == "converged"
            assert nash_certificate(
                small_game, trace.final, Grid(10)
            ).is_equilibrium

    def test_max_rounds_zero(self, small_game):
        trace = run_dynamics(small_game, (60, 0, 0), Grid(10), max_rounds=0)
        assert trace.status == "max_rounds"
        assert len(trace.steps) == 1
        assert trace.steps[0].mover is None

    def test_moves_strictly_improve_the_mover(self, small_game):
        trace = run_dynamics(small_game, (0, 60, 60), Grid(10))
        for prev, step in zip(trace.steps, trace.steps[1:]):
            mover = step.mover
            assert step.outcome.utilities[mover] > prev.outcome.utilities[mover]
            # consecutive profiles differ in exactly one coordinate
            diffs = sum(a != b for a, b in zip(prev.profile, step.profile))
            assert diffs == 1

    def test_determinism(self, small_game):
        a = run_dynamics(small_game, (20, 40, 60), Grid(10), seed=5)
        b = run_dynamics(small_game, (20, 40, 60), Grid(10), seed=5)
        assert a == b

    def test_oracle_error_status(self, external_game):
        cfg = external_game("range13")
        trace = run_dynamics(cfg, (10, 10, 10), Grid(10))
        assert trace.status == "oracle_error"
        assert trace.error and "outside" in trace.error

    def test_off_grid_start_rejected(self, small_game):
        with pytest.raises(ProfileError):
            run_dynamics(small_game, (15, 0, 0), Grid(10))
