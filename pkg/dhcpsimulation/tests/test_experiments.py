import os

import numpy as np
import pytest
import yaml

from ..packages import experiments
from ..packages.baselines import FixedTimeController, MaxPressureController
from ..packages.config import load_config
from ..packages.dhcp import TrainingLog
from ..packages.graph import network as roadnet
from ..packages.scenario import Scenario

SMALL_AGENT = {"actor layers": [8, 8], "critic layers": [8, 8],
               "batch size": 8}


def make_config(tmp_path, horizon=600, **overrides):
    settings = {"output": str(tmp_path),
                "scenario": {"horizon": {"value": horizon, "units": "s"}},
                "agent": SMALL_AGENT}
    settings.update(overrides)
    return(load_config(overrides=settings))


class TestAggregation:
    def test_groups_of_four(self):
        assert experiments.aggregate_intervals(range(1, 9)) == [2.5, 6.5]

    def test_partial_group(self):
        assert experiments.aggregate_intervals([1, 2, 3], 2) == [1.5, 3.0]

    def test_empty(self):
        assert experiments.aggregate_intervals([]) == []

    def test_group_size(self):
        with pytest.raises(ValueError):
            experiments.aggregate_intervals([1.0], 0)


class TestEpisode:
    def test_empty_flow(self):
        scenario = Scenario(roadnet.build_grid(1, 1, 300.0, 300.0), [], 600)
        result = experiments.run_episode(scenario, FixedTimeController())
        assert result.avg_travel_time == 0.0
        assert result.throughput == 0
        assert result.cycle_rewards == [0.0] * 10

    def test_one_reward_per_cycle(self, tmp_path):
        config = make_config(tmp_path)
        scenario = experiments.build_scenario(config)
        result = experiments.run_episode(scenario, MaxPressureController(15))
        assert len(result.cycle_rewards) == 10
        assert result.episode_reward == pytest.approx(
            sum(result.cycle_rewards))
        assert result.decisions > 0

    def test_interval_must_divide_cycle(self):
        scenario = Scenario(roadnet.build_grid(1, 1, 300.0, 300.0), [], 600)
        with pytest.raises(ValueError):
            experiments.run_episode(scenario, MaxPressureController(25))

    @pytest.mark.parametrize("kind", ["fixed", "sotl", "maxpressure"])
    def test_make_controller(self, tmp_path, kind):
        config = make_config(tmp_path)
        assert experiments.make_controller(config, kind).name == kind

    def test_dhcp_needs_planner(self, tmp_path):
        with pytest.raises(ValueError):
            experiments.make_controller(make_config(tmp_path), "dhcp")


class TestEval:
    @pytest.mark.parametrize("kind", ["fixed", "sotl", "maxpressure"])
    def test_deterministic_files(self, tmp_path, kind):
        results = []
        for run in ("first", "second"):
            config = make_config(tmp_path / run, controller=kind)
            experiments.run_eval(config)
            results.append({name: (tmp_path / run / name).read_text()
                            for name in ("metrics.csv", "summary.csv")})
        assert results[0] == results[1]

    def test_deterministic_dhcp_files(self, tmp_path):
        experiments.run_train(make_config(tmp_path / "train",
                                          controller="dhcp", episodes=1))
        results = []
        for run in ("first", "second"):
            config = make_config(tmp_path / run, controller="dhcp",
                                 checkpoint=str(tmp_path / "train"))
            experiments.run_eval(config)
            results.append({name: (tmp_path / run / name).read_text()
                            for name in ("metrics.csv", "summary.csv")})
        assert results[0] == results[1]

    def test_run_directory(self, tmp_path):
        experiments.run_eval(make_config(tmp_path))
        metrics = (tmp_path / "metrics.csv").read_text().splitlines()
        assert metrics[0] == "cycle,reward"
        assert len(metrics) == 11
        manifest = yaml.safe_load((tmp_path / "manifest.yaml").read_text())
        assert manifest["controller"] == "fixed"
        assert manifest["horizon"] == 600

    def test_missing_checkpoint(self, tmp_path):
        config = make_config(tmp_path, controller="dhcp",
                             checkpoint=str(tmp_path / "nowhere"))
        with pytest.raises(RuntimeError):
            experiments.run_eval(config)


class TestTrain:
    def test_single_episode(self, tmp_path):
        log = experiments.run_train(make_config(tmp_path, controller="dhcp",
                                                episodes=1))
        assert len(log) == 1
        for name in ("training_log.csv", "high_agent.json",
                     "low_agent.json", "best_high_agent.json",
                     "best_low_agent.json", "manifest.yaml"):
            assert os.path.isfile(tmp_path / name)
        assert len(TrainingLog.load(str(tmp_path / "training_log.csv"))) == 1

    def test_resume(self, tmp_path):
        experiments.run_train(make_config(tmp_path, controller="dhcp",
                                          episodes=2))
        log = experiments.run_train(make_config(tmp_path, controller="dhcp",
                                                episodes=2, resume=True))
        assert [row.episode for row in log.rows] == [1, 2, 3, 4]
        saved = TrainingLog.load(str(tmp_path / "training_log.csv"))
        assert len(saved) == 4

    def test_only_dhcp_trains(self, tmp_path):
        with pytest.raises(ValueError):
            experiments.run_train(make_config(tmp_path))

    def test_evaluate_trained_agents(self, tmp_path):
        experiments.run_train(make_config(tmp_path / "train",
                                          controller="dhcp", episodes=1))
        config = make_config(tmp_path / "eval", controller="dhcp",
                             checkpoint=str(tmp_path / "train"))
        result = experiments.run_eval(config)
        assert result.controller == "dhcp"
        assert 0.0 <= result.mean_rho_ns <= 1.0
        assert len(result.cycle_rewards) == 10


class TestCompare:
    def test_rows_follow_input_order(self, tmp_path):
        configs = [make_config(tmp_path, controller=kind)
                   for kind in ("maxpressure", "fixed")]
        rows = experiments.run_compare(configs, [1], output=str(tmp_path))
        assert [row.controller for row in rows] == ["maxpressure", "fixed"]
        assert all(row.std_travel_time == 0.0 for row in rows)
        lines = (tmp_path / "comparison.csv").read_text().splitlines()
        assert lines[0] == "controller,mean_travel_time,std_travel_time,seeds"
        assert len(lines) == 3

    def test_statistics_over_seeds(self, tmp_path):
        configs = [make_config(tmp_path, controller=kind)
                   for kind in ("fixed", "sotl")]
        rows = experiments.run_compare(configs, [1, 2, 3])
        for row in rows:
            assert len(row.travel_times) == 3
            assert row.mean_travel_time == pytest.approx(
                np.mean(row.travel_times))
            assert row.std_travel_time == pytest.approx(
                np.std(row.travel_times))

    def test_compare_configs(self, tmp_path):
        config = make_config(tmp_path, compare=["fixed", "sotl"])
        assert [c.controller for c in experiments.compare_configs(config)] \
            == ["fixed", "sotl"]

    def test_mismatched_scenarios(self, tmp_path):
        configs = [make_config(tmp_path, controller="fixed"),
                   make_config(tmp_path, 1200, controller="maxpressure")]
        with pytest.raises(ValueError):
            experiments.run_compare(configs, [1])

    def test_needs_two_controllers(self, tmp_path):
        with pytest.raises(ValueError):
            experiments.run_compare([make_config(tmp_path)], [1])


class TestBaselineOrdering:
    def test_maxpressure_beats_fixed(self, tmp_path):
        times = {}
        for kind in ("fixed", "maxpressure"):
            config = make_config(tmp_path, 3600, controller=kind)
            times[kind] = experiments.run_eval(config,
                                               write=False).avg_travel_time
        assert times["maxpressure"] <= 0.9 * times["fixed"]


@pytest.mark.slow
class TestLearning:
    def test_planner_learns_asymmetric_split(self, tmp_path):
        passed = 0
        for seed in (1, 2, 3):
            directory = tmp_path / f"seed_{seed}"
            settings = {"output": str(directory), "controller": "dhcp",
                        "seed": seed, "episodes": 300}
            log = experiments.run_train(load_config(overrides=settings))
            rewards = [row.mean_episode_reward for row in log.rows]
            improving = np.mean(rewards[-50:]) > np.mean(rewards[:50])

            times = {}
            for kind in ("fixed", "maxpressure"):
                config = load_config(overrides={"controller": kind,
                                                "output": str(directory)})
                times[kind] = experiments.run_eval(
                    config, write=False).avg_travel_time
            config = load_config(overrides={**settings,
                                            "checkpoint": str(directory)})
            result = experiments.run_eval(config, write=False)
            if improving and \
                    result.avg_travel_time <= 0.9 * times["fixed"] and \
                    result.avg_travel_time <= 1.05 * times["maxpressure"] \
                    and result.mean_rho_ns > 0.5:
                passed += 1
        assert passed >= 2
