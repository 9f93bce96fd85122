""" Experiments

Runs controllers on scenarios and writes the run directory:

    manifest.yaml       resolved configuration
    metrics.csv         per-cycle reward series
    summary.csv         travel time, throughput and episode reward
    training_log.csv    one row per training episode
    high_agent.json     latest high-level agent
    low_agent.json      latest low-level agent
    best_*.json         agents of the best training episode so far
    comparison.csv      mean and std of travel time per controller

Functions
---------
make_controller
    Controller of a given kind
run_episode
    One episode of a controller on a scenario
run_eval
    Evaluate the configured controller once, greedily
run_train
    Train the planner, resumable
run_compare
    Travel time of several controllers over several seeds
aggregate_intervals
    Mean over consecutive groups of a reward series
"""
import csv
import io
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import yaml

from . import utils
from .baselines import (FixedTimeController, MaxPressureController,
                        SignalController, SotlController)
from .config import RunConfig, build_scenario
from .dhcp import (DhcpCycleController, DhcpPlanner, TrainingLog,
                   TrainingRecord, rewards, train)
from .graph.graphing.sensors import read_network
from .microsim import Simulator, VehicleParameters, average_travel_time
from .scenario import Scenario

HIGH_AGENT = "high_agent.json"
LOW_AGENT = "low_agent.json"
BEST_PREFIX = "best_"
TRAINING_LOG = "training_log.csv"

Console = Optional[Callable[[str], None]]


@dataclass
class EpisodeResult:
    controller: str
    seed: Optional[int]
    avg_travel_time: float
    throughput: int
    episode_reward: float
    cycle_rewards: List[float] = field(default_factory=list)
    mean_rho_ns: Optional[float] = None
    decisions: int = 0


@dataclass
class ComparisonRow:
    controller: str
    mean_travel_time: float
    std_travel_time: float
    travel_times: List[float]


def aggregate_intervals(series, group: int = 4) -> List[float]:
    """ Means of consecutive groups, a trailing partial group included """
    if group < 1:
        raise ValueError(f"Group size must be positive, got {group}")
    series = [float(x) for x in series]
    return([float(np.mean(series[i:i + group]))
            for i in range(0, len(series), group)])


def make_controller(config: RunConfig, kind: str = None,
                    planner: DhcpPlanner = None) -> SignalController:
    kind = config.controller if kind is None else kind
    if kind == "fixed":
        return(FixedTimeController(config.d_total, config.d_min,
                                   config.yellow))
    if kind == "maxpressure":
        return(MaxPressureController(config.decision_interval,
                                     config.yellow))
    if kind == "sotl":
        return(SotlController(config.decision_interval, config.yellow,
                              config.sotl_theta, config.sotl_g_min))
    if kind == "dhcp":
        if planner is None:
            raise ValueError("The dhcp controller needs a planner")
        return(DhcpCycleController(planner))
    raise ValueError(f"Unknown controller {kind}")


def run_episode(scenario: Scenario, controller: SignalController,
                d_total: int = 60, vehicle: VehicleParameters = None,
                seed: int = None,
                progress: Optional[Callable[[float], None]] = None
                ) -> EpisodeResult:
    """ Run one greedy episode

    The mean intersection reward is sampled at every decision instant of the
    controller; phase-choice samples are then averaged over each cycle so
    every controller reports one reward per cycle.
    """
    if vehicle is None:
        vehicle = VehicleParameters()
    simulator = Simulator(scenario, vehicle)
    controller.reset(simulator)
    interval = controller.decision_interval or d_total
    if d_total % interval != 0:
        raise ValueError(f"Decision interval {interval} s does not divide "
                         f"the {d_total} s cycle")

    samples = []
    horizon = int(scenario.horizon)
    for tick in range(horizon):
        simulator.step(controller.signals(simulator))
        controller.advance()
        if (tick + 1) % interval == 0:
            readings = read_network(simulator).values()
            values = [rewards(sensors)[0] for sensors in readings]
            samples.append(float(np.mean(values)) if values else 0.0)
        if progress is not None and (tick + 1) % d_total == 0:
            progress((tick + 1) / horizon)

    cycle_rewards = aggregate_intervals(samples, d_total // interval)
    return(EpisodeResult(
        controller=controller.name,
        seed=seed,
        avg_travel_time=average_travel_time(simulator.ledger, horizon),
        throughput=simulator.ledger.finished,
        episode_reward=float(sum(cycle_rewards)),
        cycle_rewards=cycle_rewards,
        mean_rho_ns=getattr(controller, "mean_rho_ns", None),
        decisions=getattr(controller, "decisions", 0)))


# Files
def _csv_text(header: list, rows: list) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v
                         for v in row])
    return(buffer.getvalue())


def write_manifest(config: RunConfig, directory: str) -> None:
    text = yaml.safe_dump(config.to_manifest(), sort_keys=False)
    utils.write_atomic(os.path.join(directory, "manifest.yaml"), text)


def write_episode(result: EpisodeResult, directory: str) -> None:
    metrics = _csv_text(["cycle", "reward"],
                        list(enumerate(result.cycle_rewards, start=1)))
    utils.write_atomic(os.path.join(directory, "metrics.csv"), metrics)
    summary = _csv_text(
        ["controller", "seed", "avg_travel_time", "throughput",
         "episode_reward", "mean_rho_ns"],
        [[result.controller, result.seed, result.avg_travel_time,
          result.throughput, result.episode_reward,
          "" if result.mean_rho_ns is None else result.mean_rho_ns]])
    utils.write_atomic(os.path.join(directory, "summary.csv"), summary)


def write_comparison(rows: List[ComparisonRow], directory: str) -> None:
    text = _csv_text(["controller", "mean_travel_time", "std_travel_time",
                      "seeds"],
                     [[r.controller, r.mean_travel_time, r.std_travel_time,
                       len(r.travel_times)] for r in rows])
    utils.write_atomic(os.path.join(directory, "comparison.csv"), text)


def agent_paths(directory: str, prefix: str = "") -> tuple:
    return(os.path.join(directory, prefix + HIGH_AGENT),
           os.path.join(directory, prefix + LOW_AGENT))


def load_planner(config: RunConfig, directory: str = None) -> DhcpPlanner:
    """ Planner from config, with weights from directory when given """
    planner = DhcpPlanner(config.planner, config.agent, seed=config.seed)
    if directory is not None:
        high_path, low_path = agent_paths(directory)
        for path in (high_path, low_path):
            if not os.path.isfile(path):
                raise RuntimeError(f"Checkpoint file '{path}' not found")
        planner.load(high_path, low_path)
    return(planner)


# Operations
def run_eval(config: RunConfig, planner: DhcpPlanner = None,
             write: bool = True, console: Console = None,
             progress: Optional[Callable[[float], None]] = None
             ) -> EpisodeResult:
    scenario = build_scenario(config)
    if config.controller == "dhcp" and planner is None:
        planner = load_planner(config, config.checkpoint)
    controller = make_controller(config, planner=planner)
    if console is not None:
        console(f"Evaluating {controller.name} over {config.horizon} s")
    result = run_episode(scenario, controller, config.d_total,
                         config.vehicle, config.seed, progress)
    if console is not None:
        console(f"Average travel time {result.avg_travel_time:.2f} s, "
                f"{result.throughput} vehicles finished")
    if write:
        write_manifest(config, config.output)
        write_episode(result, config.output)
    return(result)


def run_train(config: RunConfig, console: Console = None,
              progress: Optional[Callable[[float], None]] = None
              ) -> TrainingLog:
    """ Train the planner and keep the run directory current

    The log and the latest agents are rewritten after every episode, so a
    run stopped at any point resumes from its last finished episode. Only
    the networks are saved: on resumption the replay buffers start empty
    and DdpgAgent.load resets the Adam moments and step counts, so a resumed
    run does not reproduce an uninterrupted one.
    """
    if config.controller != "dhcp":
        raise ValueError(f"Only the dhcp controller trains, got "
                         f"{config.controller}")
    scenario = build_scenario(config)
    directory = config.output
    log_path = os.path.join(directory, TRAINING_LOG)

    log = TrainingLog()
    if config.resume and os.path.isfile(log_path):
        log = TrainingLog.load(log_path)
        planner = load_planner(config, directory)
        if console is not None:
            console(f"Resuming after episode {log.last_episode}")
    else:
        planner = load_planner(config, config.checkpoint)
    offset = log.last_episode
    best = max((row.mean_episode_reward for row in log.rows),
               default=-np.inf)
    write_manifest(config, directory)

    def checkpoint(record: TrainingRecord, planner: DhcpPlanner) -> None:
        nonlocal best
        log.append(record)
        planner.save(*agent_paths(directory))
        if record.mean_episode_reward > best:
            best = record.mean_episode_reward
            planner.save(*agent_paths(directory, BEST_PREFIX))
        log.save(log_path)
        if progress is not None:
            progress((record.episode - offset) / config.episodes)

    train(planner, scenario, config.episodes, config.seed,
          episode_offset=offset, callback=checkpoint, console=console,
          vehicle=config.vehicle)
    return(log)


def _scenario_key(config: RunConfig) -> tuple:
    if config.roadnet_path is not None:
        return((config.roadnet_path, config.flow_path, config.horizon))
    return((config.rows, config.cols, config.ns_length, config.ew_length,
            config.demand, config.horizon))


def compare_member(config: RunConfig, seed: int) -> float:
    """ Travel time of one controller under one seed

    A dhcp member starts from the configured checkpoint, or trains in memory
    for the configured number of episodes when there is none.
    """
    config = config.with_overrides(seed=seed)
    planner = None
    if config.controller == "dhcp":
        planner = load_planner(config, config.checkpoint)
        if config.checkpoint is None:
            train(planner, build_scenario(config), config.episodes, seed,
                  vehicle=config.vehicle)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        result = run_eval(config, planner, write=False)
    return(result.avg_travel_time)


def run_compare(configs: List[RunConfig], seeds: List[int],
                workers: int = 1, output: str = None,
                console: Console = None) -> List[ComparisonRow]:
    """ Mean and population std of travel time over seeds

    Rows keep the order of configs. Members are independent and run in a
    process pool when workers > 1.
    """
    if len(configs) < 2:
        raise ValueError(f"Need at least two controllers to compare, got "
                         f"{len(configs)}")
    if not seeds:
        raise ValueError("Need at least one seed to compare")
    key = _scenario_key(configs[0])
    for config in configs[1:]:
        if _scenario_key(config) != key:
            raise ValueError(f"Controller {config.controller} runs a "
                             f"different scenario than "
                             f"{configs[0].controller}")

    jobs = [(config, seed) for config in configs for seed in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(compare_member, c, s) for c, s in jobs]
            times = [future.result() for future in futures]
    else:
        times = []
        for config, seed in jobs:
            times.append(compare_member(config, seed))
            if console is not None:
                console(f"{config.controller} seed {seed}: "
                        f"{times[-1]:.2f} s")

    rows = []
    for i, config in enumerate(configs):
        values = times[i * len(seeds):(i + 1) * len(seeds)]
        rows.append(ComparisonRow(config.controller, float(np.mean(values)),
                                  float(np.std(values)), values))
    if output is not None:
        write_comparison(rows, output)
    return(rows)


def compare_configs(config: RunConfig) -> List[RunConfig]:
    return([config.with_overrides(controller=kind)
            for kind in config.compare])
