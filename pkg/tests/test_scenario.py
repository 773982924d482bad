import pytest

from eqforge import (
    ConfigError,
    PerturbationSpec,
    ProfileError,
    evaluate_profiles,
    generate_scenarios,
    write_report_csv,
    write_summary_json,
)

from conftest import make_config

BASELINE = (150, 75, 75)
EQUILIBRIUM = (300, 163, 0)


class TestGenerateScenarios:
    def test_delta_zero_copies_base(self, default_game):
        spec = PerturbationSpec(delta=0.0, count=4, seed=1)
        scenarios = generate_scenarios(default_game, spec)
        assert len(scenarios) == 4
        for s in scenarios:
            assert s.oracle.params == default_game.oracle.params
            assert s.unit_costs == default_game.unit_costs
            assert s.poison_weights == default_game.poison_weights

    def test_parameters_within_bounds(self, default_game):
        spec = PerturbationSpec(delta=0.1, count=2, seed=42)
        base = default_game.oracle.params
        for s in generate_scenarios(default_game, spec):
            p = s.oracle.params
            assert abs(p.a_max / base.a_max - 1) <= 0.1
            assert abs(p.kappa / base.kappa - 1) <= 0.1
            assert abs(p.lam / base.lam - 1) <= 0.1
            for q, pb in zip(s.players, default_game.players):
                assert abs(q.unit_cost / pb.unit_cost - 1) <= 0.1
                if not pb.is_honest:
                    assert abs(q.poison_weight / pb.poison_weight - 1) <= 0.1

    def test_unit_cost_only_target(self, default_game):
        spec = PerturbationSpec(
            delta=0.5, targets=("unit_cost",), count=50, seed=3
        )
        for s in generate_scenarios(default_game, spec):
            assert 0.00025 <= s.players[0].unit_cost <= 0.00075
            assert s.oracle.params == default_game.oracle.params

    def test_honest_poison_weight_stays_zero(self, default_game):
        spec = PerturbationSpec(
            delta=0.9, targets=("poison_weight",), count=20, seed=9
        )
        for s in generate_scenarios(default_game, spec):
            assert s.players[0].poison_weight == 0.0

    def test_reproducible_scenario_lists(self, default_game):
        spec = PerturbationSpec(delta=0.05, count=10, seed=42)
        assert generate_scenarios(default_game, spec) == generate_scenarios(
            default_game, spec
        )

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"delta": 1.0},
            {"delta": -0.1},
            {"delta": 0.1, "count": 0},
            {"delta": 0.1, "targets": ()},
            {"delta": 0.1, "targets": ("nonsense",)},
        ],
    )
    def test_invalid_specs_rejected(self, default_game, kwargs):
        with pytest.raises(ConfigError):
            generate_scenarios(default_game, PerturbationSpec(**kwargs))

    def test_external_base_rejected(self):
        cfg = make_config(oracle={"kind": "external", "command": "true"})
        with pytest.raises(ConfigError, match="builtin"):
            generate_scenarios(cfg, PerturbationSpec(delta=0.1))


class TestEvaluateProfiles:
    def profiles(self):
        return [("baseline", BASELINE), ("equilibrium", EQUILIBRIUM)]

    def test_single_scenario_reduces_to_direct_comparison(self, default_game):
        from eqforge import evaluate

        spec = PerturbationSpec(delta=0.0, count=1, seed=0)
        report = evaluate_profiles(
            self.profiles(), generate_scenarios(default_game, spec), seed=0
        )
        base = evaluate(default_game, BASELINE, 0).utilities
        focal = evaluate(default_game, EQUILIBRIUM, 0).utilities
        expected = tuple(1.0 if f >= b else 0.0 for f, b in zip(focal, base))
        assert report.dominance["equilibrium"] == expected

    def test_baseline_self_dominance_is_one(self, default_game):
        spec = PerturbationSpec(delta=0.05, count=25, seed=42)
        report = evaluate_profiles(
            self.profiles(), generate_scenarios(default_game, spec), seed=42
        )
        assert report.dominance["baseline"] == (1.0, 1.0, 1.0)

    def test_rows_in_scenario_profile_order(self, default_game):
        spec = PerturbationSpec(delta=0.05, count=3, seed=1)
        report = evaluate_profiles(
            self.profiles(), generate_scenarios(default_game, spec), seed=1
        )
        keys = [(r.scenario, r.profile_label) for r in report.rows]
        assert keys == sorted(keys, key=lambda k: (k[0], ["baseline", "equilibrium"].index(k[1])))
        assert len(report.rows) == 6

    def test_missing_baseline_rejected(self, default_game):
        spec = PerturbationSpec(delta=0.0, count=1, seed=0)
        with pytest.raises(ProfileError, match="baseline"):
            evaluate_profiles(
                [("focal", EQUILIBRIUM)],
                generate_scenarios(default_game, spec),
                seed=0,
            )

    def test_empty_profile_list_rejected(self, default_game):
        spec = PerturbationSpec(delta=0.0, count=1, seed=0)
        with pytest.raises(ProfileError, match="no profiles"):
            evaluate_profiles([], generate_scenarios(default_game, spec), seed=0)

    def test_report_bytes_stable(self, default_game, tmp_path):
        spec = PerturbationSpec(delta=0.05, count=20, seed=42)
        blobs = []
        for name in ("a", "b"):
            report = evaluate_profiles(
                self.profiles(), generate_scenarios(default_game, spec), seed=42
            )
            csv_path = tmp_path / f"{name}.csv"
            json_path = tmp_path / f"{name}.json"
            write_report_csv(report, csv_path)
            write_summary_json(report, json_path)
            blobs.append((csv_path.read_bytes(), json_path.read_bytes()))
        assert blobs[0] == blobs[1]

    def test_csv_header_shape(self, default_game, tmp_path):
        spec = PerturbationSpec(delta=0.0, count=1, seed=0)
        report = evaluate_profiles(
            self.profiles(), generate_scenarios(default_game, spec), seed=0
        )
        path = tmp_path / "r.csv"
        write_report_csv(report, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "scenario,profile,accuracy,u_0,u_1,u_2"
        assert len(lines) == 1 + len(report.rows)
