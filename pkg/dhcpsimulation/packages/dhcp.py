""" Hierarchical cycle planner

A high-level agent splits each 60 s cycle between the NS and EW directions,
one low-level agent (shared by both directions and every intersection)
splits each direction between its straight and left phases. Both agents
learn from the pooled experience of all intersections and act on local
observations only.

Classes
-------
PlannerSettings
    Cycle constants and the state/reward toggles
HighDecision
    Direction split of one cycle
CycleDecision
    Full decision of one cycle, states and actions included
DhcpPlanner
    The two shared agents and the composition into a CyclePlan
DhcpCycleController
    Runs a planner greedily as a cycle controller
TrainingRecord / TrainingLog
    One row per training episode

Functions
---------
high_state
    24 wave/queue values of all incoming lanes
low_state
    8 wave/queue values of one direction plus its allocated duration
rewards
    (r_h, r_l_NS, r_l_EW) from queue counts
train
    The training loop
"""
import csv
import io
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional

import numpy as np

from . import utils
from .baselines import CycleController
from .ddpg import AgentParameters, DdpgAgent, Transition
from .graph.graphing.base import Approach, Movement
from .graph.graphing.sensors import IntersectionSensors, read_network
from .microsim import Simulator, VehicleParameters, average_travel_time
from .scenario import Scenario
from .signalplan import (YELLOW, CyclePlan, CycleSignal, allocate_high,
                         allocate_low, round_durations)

HIGH_STATE_DIM = 24
LOW_STATE_DIM = 9

DIRECTIONS = {
    "NS": (Approach.N, Approach.S),
    "EW": (Approach.E, Approach.W),
}
NORMALIZATIONS = ("capacity", "raw")
REWARD_KINDS = ("queue", "wave")


@dataclass
class PlannerSettings:
    d_total: int = 60
    d_min: int = 5
    yellow: int = YELLOW
    normalization: str = "capacity"
    reward_kind: str = "queue"
    include_right_turns: bool = True
    time_averaged_reward: bool = False
    normalize_reward: bool = False

    def __post_init__(self) -> None:
        if self.d_total < 4 * self.d_min:
            raise ValueError(f"Cycle of {self.d_total} s cannot give four "
                             f"phases {self.d_min} s each")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"Unknown normalization {self.normalization}, "
                             f"expected one of {NORMALIZATIONS}")
        if self.reward_kind not in REWARD_KINDS:
            raise ValueError(f"Unknown reward kind {self.reward_kind}, "
                             f"expected one of {REWARD_KINDS}")


def _scale(value: float, capacity: int, normalization: str) -> float:
    if normalization == "raw":
        return(float(value))
    return(value / capacity)


def high_state(sensors: IntersectionSensors,
               normalization: str = "capacity",
               include_right_turns: bool = True) -> np.ndarray:
    """ (wave, queue) of the 12 incoming lanes in canonical order

    With include_right_turns off the right-turn slots stay zero so the state
    keeps its length.
    """
    state = np.zeros(HIGH_STATE_DIM)
    i = 0
    for approach in Approach:
        for movement in Movement:
            key = (approach, movement)
            if include_right_turns or movement != Movement.RIGHT:
                reading = sensors.lanes[key]
                capacity = sensors.capacity[key]
                state[i] = _scale(reading.wave, capacity, normalization)
                state[i + 1] = _scale(reading.queue, capacity, normalization)
            i += 2
    return(state)


def low_state(sensors: IntersectionSensors, direction: str, d_dir: float,
              d_total: float, normalization: str = "capacity") -> np.ndarray:
    try:
        approaches = DIRECTIONS[direction]
    except KeyError:
        raise ValueError(f"Unknown direction {direction}, expected one of "
                         f"{tuple(DIRECTIONS)}")
    values = []
    for approach in approaches:
        for movement in (Movement.STRAIGHT, Movement.LEFT):
            key = (approach, movement)
            reading = sensors.lanes[key]
            capacity = sensors.capacity[key]
            values.append(_scale(reading.wave, capacity, normalization))
            values.append(_scale(reading.queue, capacity, normalization))
    values.append(d_dir if normalization == "raw" else d_dir / d_total)
    return(np.array(values))


def rewards(sensors: IntersectionSensors, kind: str = "queue",
            include_right_turns: bool = True,
            normalize: bool = False) -> tuple:
    """ Negative queue sums of the whole intersection and of each direction
    """
    def count(key) -> float:
        reading = sensors.lanes[key]
        value = reading.queue if kind == "queue" else reading.wave
        if normalize:
            return(value / sensors.capacity[key])
        return(float(value))

    r_dir = {}
    for direction, approaches in DIRECTIONS.items():
        r_dir[direction] = -sum(count((a, m)) for a in approaches
                                for m in (Movement.STRAIGHT, Movement.LEFT))
    r_h = r_dir["NS"] + r_dir["EW"]
    if include_right_turns:
        r_h -= sum(count((a, Movement.RIGHT)) for a in Approach)
    return(r_h, r_dir["NS"], r_dir["EW"])


@dataclass
class HighDecision:
    state: np.ndarray
    action: np.ndarray
    rho_ns: float
    d_ns: float
    d_ew: float


@dataclass
class CycleDecision:
    high: HighDecision
    ns_state: np.ndarray
    ns_action: np.ndarray
    ew_state: np.ndarray
    ew_action: np.ndarray
    plan: CyclePlan


class DhcpPlanner:
    """ One high-level and one low-level agent for the whole network

    Attributes
    ----------
    settings: PlannerSettings
    high: DdpgAgent
        State 24, action 1; the action sets the NS share of the cycle
    low: DdpgAgent
        State 9, action 1; serves NS and EW of every intersection
    updates: int
        Learning steps taken, 0 for an untrained planner

    Methods
    -------
    decide_high
        Direction split from an intersection's sensors
    decide_low
        Phase split of both directions given the direction split
    plan_cycle
        Both decisions composed into a CyclePlan
    """

    def __init__(self, settings: PlannerSettings = None,
                 agent_params: AgentParameters = None,
                 seed: int = None) -> None:
        if settings is None:
            settings = PlannerSettings()
        if agent_params is None:
            agent_params = AgentParameters()
        if seed is None:
            seed = utils.get_seed()
        self.settings = settings
        self.agent_params = agent_params
        self.high = DdpgAgent(HIGH_STATE_DIM, 1, agent_params,
                              rng=utils.get_rng("high.noise", seed),
                              init_rng=utils.get_rng("high.init", seed))
        self.low = DdpgAgent(LOW_STATE_DIM, 1, agent_params,
                             rng=utils.get_rng("low.noise", seed),
                             init_rng=utils.get_rng("low.init", seed))
        self.updates = 0

    def reseed_noise(self, seed: int) -> None:
        self.high.rng = utils.get_rng("high.noise", seed)
        self.low.rng = utils.get_rng("low.noise", seed)

    def decide_high(self, sensors: IntersectionSensors,
                    explore: bool = False) -> HighDecision:
        s = self.settings
        state = high_state(sensors, s.normalization, s.include_right_turns)
        action = np.atleast_1d(self.high.act(state, explore))
        d_ns, d_ew = allocate_high(float(action[0]), s.d_total, s.d_min)
        rho_ns = (float(np.clip(action[0], -1.0, 1.0)) + 1.0) / 2.0
        return(HighDecision(state, action, rho_ns, d_ns, d_ew))

    def direction_state(self, sensors: IntersectionSensors, direction: str,
                        d_dir: float) -> np.ndarray:
        return(low_state(sensors, direction, d_dir, self.settings.d_total,
                         self.settings.normalization))

    def decide_low(self, sensors: IntersectionSensors, high: HighDecision,
                   explore: bool = False) -> CycleDecision:
        s = self.settings
        ns_state = self.direction_state(sensors, "NS", high.d_ns)
        ew_state = self.direction_state(sensors, "EW", high.d_ew)
        ns_action = np.atleast_1d(self.low.act(ns_state, explore))
        ew_action = np.atleast_1d(self.low.act(ew_state, explore))
        d_nss, d_nsl = allocate_low(float(ns_action[0]), high.d_ns, s.d_min)
        d_ews, d_ewl = allocate_low(float(ew_action[0]), high.d_ew, s.d_min)
        plan = round_durations((d_nss, d_nsl, d_ews, d_ewl), s.d_total,
                               s.d_min)
        return(CycleDecision(high, ns_state, ns_action, ew_state, ew_action,
                             plan))

    def decide(self, sensors: IntersectionSensors,
               explore: bool = False) -> CycleDecision:
        return(self.decide_low(sensors, self.decide_high(sensors, explore),
                               explore))

    def plan_cycle(self, sensors: IntersectionSensors,
                   explore: bool = False) -> CyclePlan:
        return(self.decide(sensors, explore).plan)

    def rewards(self, sensors: IntersectionSensors) -> tuple:
        s = self.settings
        return(rewards(sensors, s.reward_kind, s.include_right_turns,
                       s.normalize_reward))

    def update(self) -> bool:
        """ One learning step per agent once its buffer holds a batch """
        stepped = False
        for agent in (self.high, self.low):
            if agent.ready():
                agent.update()
                stepped = True
        if stepped:
            self.updates += 1
        return(stepped)

    def save(self, high_path: str, low_path: str) -> None:
        self.high.save(high_path)
        self.low.save(low_path)

    def load(self, high_path: str, low_path: str) -> None:
        self.high.load(high_path)
        self.low.load(low_path)
        self.updates = max(self.updates, 1)


class DhcpCycleController(CycleController):
    """ Greedy execution of a planner, one plan per cycle """
    name = "dhcp"

    def __init__(self, planner: DhcpPlanner) -> None:
        s = planner.settings
        super().__init__(s.d_total, s.d_min, s.yellow)
        self.planner = planner
        self.rho_history = []
        if planner.updates == 0:
            warnings.warn("Evaluating an untrained planner", RuntimeWarning)

    def reset(self, simulator) -> None:
        super().reset(simulator)
        self.rho_history = []

    def plan(self, node, sensors: IntersectionSensors) -> CyclePlan:
        decision = self.planner.decide(sensors, explore=False)
        self.rho_history.append(decision.high.rho_ns)
        return(decision.plan)

    @property
    def mean_rho_ns(self) -> float:
        if not self.rho_history:
            return(0.0)
        return(float(np.mean(self.rho_history)))


class TrainingRecord(NamedTuple):
    episode: int
    mean_episode_reward: float
    avg_travel_time: float
    mean_rho_ns: float


@dataclass
class TrainingLog:
    rows: List[TrainingRecord] = field(default_factory=list)

    columns = TrainingRecord._fields

    def __len__(self) -> int:
        return(len(self.rows))

    def append(self, record: TrainingRecord) -> None:
        self.rows.append(record)

    @property
    def last_episode(self) -> int:
        return(self.rows[-1].episode if self.rows else 0)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([row.episode, repr(row.mean_episode_reward),
                             repr(row.avg_travel_time),
                             repr(row.mean_rho_ns)])
        return(buffer.getvalue())

    def save(self, path: str) -> None:
        utils.write_atomic(path, self.to_csv())

    @classmethod
    def load(cls, path: str) -> "TrainingLog":
        log = cls()
        with open(path, 'r', newline="") as fp:
            reader = csv.DictReader(fp)
            if reader.fieldnames is None or \
                    tuple(reader.fieldnames) != cls.columns:
                raise RuntimeError(f"File '{path}' is not a training log, "
                                   f"header {reader.fieldnames}")
            for line in reader:
                try:
                    log.append(TrainingRecord(
                        int(line["episode"]),
                        float(line["mean_episode_reward"]),
                        float(line["avg_travel_time"]),
                        float(line["mean_rho_ns"])))
                except (TypeError, ValueError) as e:
                    raise RuntimeError(f"File '{path}' line "
                                       f"{reader.line_num} is malformed: "
                                       f"{e!r}")
        return(log)


def run_training_episode(planner: DhcpPlanner, simulator: Simulator,
                         console: Optional[Callable[[str], None]] = None
                         ) -> tuple:
    """ One exploring episode; returns (mean episode reward, mean rho_NS)

    Per cycle and intersection: the cycle's plan runs for D_total ticks, the
    rewards and next high state are read at the cycle boundary, the next
    high action is drawn with exploration noise, then one high and two low
    transitions are stored. Both agents update once per cycle. The next
    cycle's low actions are chosen after the update from the same sensors.
    """
    s = planner.settings
    horizon = simulator.scenario.horizon
    nodes = simulator.scenario.network.intersections
    n_cycles = int(horizon // s.d_total)
    simulator.reset()

    sensors = read_network(simulator)
    highs = {node.id: planner.decide_high(sensors[node.id], explore=True)
             for node in nodes}
    episode_reward = {node.id: 0.0 for node in nodes}
    rho = []
    for cycle in range(n_cycles):
        decisions = {node.id: planner.decide_low(sensors[node.id],
                                                 highs[node.id], explore=True)
                     for node in nodes}
        rho.extend(d.high.rho_ns for d in decisions.values())
        signals = {node_id: CycleSignal(d.plan, s.yellow)
                   for node_id, d in decisions.items()}
        averaged = {node.id: np.zeros(3) for node in nodes}
        for _ in range(s.d_total):
            simulator.step({node_id: signal.green_phase()
                            for node_id, signal in signals.items()})
            for signal in signals.values():
                signal.advance()
            if s.time_averaged_reward:
                tick = read_network(simulator)
                for node in nodes:
                    averaged[node.id] += planner.rewards(tick[node.id])

        sensors = read_network(simulator)
        for node in nodes:
            local = sensors[node.id]
            if s.time_averaged_reward:
                r_h, r_ns, r_ew = averaged[node.id] / s.d_total
            else:
                r_h, r_ns, r_ew = planner.rewards(local)
            episode_reward[node.id] += r_h

            decision = decisions[node.id]
            nxt = planner.decide_high(local, explore=True)
            planner.high.store(Transition(decision.high.state,
                                          decision.high.action, r_h,
                                          nxt.state))
            planner.low.store(Transition(
                decision.ns_state, decision.ns_action, r_ns,
                planner.direction_state(local, "NS", nxt.d_ns)))
            planner.low.store(Transition(
                decision.ew_state, decision.ew_action, r_ew,
                planner.direction_state(local, "EW", nxt.d_ew)))
            highs[node.id] = nxt
        planner.update()
        if console is not None and (cycle + 1) % 10 == 0:
            console(f"cycle {cycle + 1}/{n_cycles}")

    mean_reward = float(np.mean(list(episode_reward.values()))) \
        if nodes else 0.0
    mean_rho = float(np.mean(rho)) if rho else 0.0
    return(mean_reward, mean_rho)


def train(planner: DhcpPlanner, scenario: Scenario, episodes: int,
          seed: int = None, episode_offset: int = 0,
          callback: Optional[Callable[[TrainingRecord, DhcpPlanner],
                                      None]] = None,
          console: Optional[Callable[[str], None]] = None,
          vehicle: VehicleParameters = None) -> TrainingLog:
    """ Train the planner for a number of episodes

    The simulator is deterministic, so the seed only reaches the exploration
    noise: when given, both agents restart their noise streams from it.
    Episodes are numbered from episode_offset + 1 so a
    resumed run continues its log. callback runs after every episode.
    """
    if episodes < 1:
        raise ValueError(f"Need at least one episode, got {episodes}")
    if scenario.horizon % planner.settings.d_total != 0:
        raise ValueError(f"Horizon {scenario.horizon} s is not a multiple "
                         f"of the {planner.settings.d_total} s cycle")
    if seed is not None:
        planner.reseed_noise(seed)
    if vehicle is None:
        vehicle = VehicleParameters()
    simulator = Simulator(scenario, vehicle)
    log = TrainingLog()
    for i in range(episodes):
        episode = episode_offset + i + 1
        mean_reward, mean_rho = run_training_episode(planner, simulator,
                                                     console)
        record = TrainingRecord(episode, mean_reward,
                                average_travel_time(simulator.ledger,
                                                    scenario.horizon),
                                mean_rho)
        log.append(record)
        if console is not None:
            console(f"Episode {episode}: reward {mean_reward:.2f}, "
                    f"travel time {record.avg_travel_time:.2f} s, "
                    f"rho_NS {mean_rho:.3f}")
        if callback is not None:
            callback(record, planner)
    return(log)
