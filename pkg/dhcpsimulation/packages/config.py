""" Run configuration

Reads the YAML run settings, converts physical quantities with pint and
validates the result.

Classes
-------
DemandConfig
    Synthetic demand of a grid scenario
RunConfig
    Everything one train / eval / compare run needs

Functions
---------
default_settings_path
    Path of the bundled run.yaml
load_settings
    Defaults merged with a user file and overrides
load_config
    load_settings followed by RunConfig.from_settings
build_scenario
    Scenario described by a RunConfig
"""
import os
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional

from . import utils
from .ddpg import AgentParameters
from .dhcp import PlannerSettings
from .graph import network as roadnet
from .microsim import VehicleParameters
from .scenario import Scenario, gaussian_flows, load_scenario, straight_flows

CONTROLLERS = ("fixed", "sotl", "maxpressure", "dhcp")
DEMAND_KINDS = ("straight", "gaussian")


def default_settings_path() -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    return(os.path.join(here, os.pardir, "settings", "run.yaml"))


def _seconds(value) -> float:
    return(utils.to_magnitude(value, "[time]", "s"))


def _meters(value) -> float:
    return(utils.to_magnitude(value, "[length]", "m"))


def _speed(value) -> float:
    return(utils.to_magnitude(value, "[length] / [time]", "m/s"))


def _whole_seconds(value, key: str) -> int:
    seconds = _seconds(value)
    if abs(seconds - round(seconds)) > utils.tolerance:
        raise ValueError(f"{key} must be a whole number of seconds, got "
                         f"{seconds}")
    return(int(round(seconds)))


def _optional(value, convert):
    return(None if value is None else convert(value))


@dataclass
class DemandConfig:
    kind: str = "straight"
    ns_interval: Optional[float] = 4.0
    ew_interval: Optional[float] = 12.0
    start_time: float = 0.0
    end_time: float = 3600.0
    total_vehicles: int = 2000
    peak: Optional[float] = None
    width: Optional[float] = None


@dataclass
class RunConfig:
    """ Resolved configuration of one run

    Attributes
    ----------
    controller: str
        fixed, sotl, maxpressure or dhcp
    seed: int
        Single source of all randomness
    roadnet_path, flow_path: str
        Scenario files; when unset the grid and demand blocks are used
    d_total, d_min, yellow, decision_interval: int
        Signal timing in seconds
    vehicle: VehicleParameters
    agent: AgentParameters
    planner: PlannerSettings
    output: str
        Run directory
    checkpoint: str
        Directory holding high_agent.json and low_agent.json to start from
    """
    controller: str = "fixed"
    seed: int = 1
    episodes: int = 300
    output: str = "runs/"
    checkpoint: Optional[str] = None
    resume: bool = False
    seeds: List[int] = field(default_factory=lambda: [1, 2, 3])
    workers: int = 1
    compare: List[str] = field(default_factory=lambda: list(CONTROLLERS))

    roadnet_path: Optional[str] = None
    flow_path: Optional[str] = None
    horizon: int = 3600
    rows: int = 1
    cols: int = 1
    ns_length: float = 300.0
    ew_length: float = 300.0
    demand: DemandConfig = field(default_factory=DemandConfig)

    d_total: int = 60
    d_min: int = 5
    yellow: int = 3
    decision_interval: int = 15
    sotl_theta: float = 8
    sotl_g_min: float = 10.0

    vehicle: VehicleParameters = field(default_factory=VehicleParameters)
    agent: AgentParameters = field(default_factory=AgentParameters)
    planner: PlannerSettings = field(default_factory=PlannerSettings)

    @classmethod
    def from_settings(cls, settings: dict) -> "RunConfig":
        """ Build from a lower-cased settings mapping (see run.yaml) """
        try:
            scenario = settings["scenario"]
            grid = scenario["grid"]
            demand = scenario["demand"]
            signal = settings["signal"]
            vehicle = settings["vehicle"]
            sotl = settings["sotl"]
            agent = settings["agent"]
            planner = settings["planner"]

            d_total = _whole_seconds(signal["total cycle"], "total cycle")
            d_min = _whole_seconds(signal["minimum phase"], "minimum phase")
            yellow = _whole_seconds(signal["yellow"], "yellow")
            config = cls(
                controller=str(settings["controller"]).lower(),
                seed=settings["seed"],
                episodes=int(settings["episodes"]),
                output=str(settings["output"]),
                checkpoint=settings.get("checkpoint"),
                resume=bool(settings.get("resume", False)),
                seeds=[int(s) for s in settings["seeds"]],
                workers=int(settings.get("workers", 1)),
                compare=[str(c).lower() for c in settings["compare"]],
                roadnet_path=scenario.get("roadnet"),
                flow_path=scenario.get("flow"),
                horizon=_whole_seconds(scenario["horizon"], "horizon"),
                rows=int(grid["rows"]),
                cols=int(grid["columns"]),
                ns_length=_meters(grid["ns length"]),
                ew_length=_meters(grid["ew length"]),
                demand=DemandConfig(
                    kind=str(demand["kind"]).lower(),
                    ns_interval=_optional(demand.get("ns interval"),
                                          _seconds),
                    ew_interval=_optional(demand.get("ew interval"),
                                          _seconds),
                    start_time=_seconds(demand["start time"]),
                    end_time=_seconds(demand["end time"]),
                    total_vehicles=int(demand["total vehicles"]),
                    peak=_optional(demand.get("peak"), _seconds),
                    width=_optional(demand.get("width"), _seconds)),
                d_total=d_total,
                d_min=d_min,
                yellow=yellow,
                decision_interval=_whole_seconds(
                    signal["decision interval"], "decision interval"),
                sotl_theta=float(sotl["threshold"]),
                sotl_g_min=_seconds(sotl["minimum green"]),
                vehicle=VehicleParameters(
                    v_max=_speed(vehicle["maximum speed"]),
                    vehicle_length=_meters(vehicle["length"]),
                    min_gap=_meters(vehicle["minimum gap"]),
                    headway=_seconds(vehicle["headway"]),
                    stop_speed=_speed(vehicle["stop speed"])),
                agent=AgentParameters(
                    gamma=float(agent["gamma"]),
                    noise_std=float(agent["noise std"]),
                    actor_lr=float(agent["actor learning rate"]),
                    critic_lr=float(agent["critic learning rate"]),
                    batch_size=int(agent["batch size"]),
                    buffer_size=int(agent["buffer size"]),
                    tau=float(agent["tau"]),
                    actor_layers=[int(w) for w in agent["actor layers"]],
                    critic_layers=[int(w) for w in agent["critic layers"]]),
                planner=PlannerSettings(
                    d_total=d_total,
                    d_min=d_min,
                    yellow=yellow,
                    normalization=str(planner["normalization"]).lower(),
                    reward_kind=str(planner["reward"]).lower(),
                    include_right_turns=bool(planner["include right turns"]),
                    time_averaged_reward=bool(
                        planner["time averaged reward"]),
                    normalize_reward=bool(planner["normalize reward"])))
        except KeyError as e:
            raise ValueError(f"Run settings are missing the key {e}")
        config.validate()
        return(config)

    def validate(self) -> None:
        if self.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}, got "
                             f"{self.controller}")
        for kind in self.compare:
            if kind not in CONTROLLERS:
                raise ValueError(f"compare lists unknown controller {kind}")
        if self.seed is not None and \
                (type(self.seed) != int or self.seed <= 0):
            raise ValueError(f"seed must be a positive integer, got "
                             f"{self.seed}")
        if not self.seeds or min(self.seeds) <= 0:
            raise ValueError(f"seeds must be positive integers, got "
                             f"{self.seeds}")
        if self.episodes < 1:
            raise ValueError(f"episodes must be at least 1, got "
                             f"{self.episodes}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got "
                             f"{self.workers}")
        if self.d_min <= 0 or self.d_total < 4 * self.d_min:
            raise ValueError(f"total cycle ({self.d_total} s) must be at "
                             f"least 4 x minimum phase ({self.d_min} s)")
        if self.horizon <= 0 or self.horizon % self.d_total != 0:
            raise ValueError(f"horizon ({self.horizon} s) must be a positive "
                             f"multiple of the total cycle ({self.d_total} s)")
        if not 0 <= self.yellow < self.d_min:
            raise ValueError(f"yellow ({self.yellow} s) must be shorter than "
                             f"the minimum phase ({self.d_min} s)")
        if self.decision_interval <= 0:
            raise ValueError(f"decision interval must be positive, got "
                             f"{self.decision_interval}")
        if (self.roadnet_path is None) != (self.flow_path is None):
            raise ValueError("roadnet and flow must be given together")
        if self.demand.kind not in DEMAND_KINDS:
            raise ValueError(f"demand kind must be one of {DEMAND_KINDS}, "
                             f"got {self.demand.kind}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid must have at least one row and column, "
                             f"got {self.rows}x{self.cols}")

    def with_overrides(self, **changes) -> "RunConfig":
        """ Copy with some fields replaced, validated again """
        config = replace(self, **changes)
        config.validate()
        return(config)

    def to_manifest(self) -> dict:
        """ Plain mapping echoing the resolved configuration """
        manifest = asdict(self)
        manifest["units"] = {"time": "s", "length": "m", "speed": "m/s"}
        return(manifest)


def load_settings(path: str = None, overrides: dict = None) -> dict:
    settings = utils.import_yaml(default_settings_path())
    if path is not None:
        settings = utils.merge_dicts(settings, utils.import_yaml(path))
    if overrides:
        settings = utils.merge_dicts(settings,
                                     utils.dict_to_lowercase(dict(overrides)))
    return(settings)


def load_config(path: str = None, overrides: dict = None) -> RunConfig:
    return(RunConfig.from_settings(load_settings(path, overrides)))


def build_scenario(config: RunConfig) -> Scenario:
    if config.roadnet_path is not None:
        return(load_scenario(config.roadnet_path, config.flow_path,
                             config.horizon))
    network = roadnet.build_grid(config.rows, config.cols,
                                 config.ns_length, config.ew_length)
    demand = config.demand
    if demand.kind == "straight":
        flows = straight_flows(network, demand.ns_interval,
                               demand.ew_interval, demand.start_time,
                               demand.end_time)
    else:
        rng = utils.get_rng("demand", config.seed)
        flows = gaussian_flows(network, demand.total_vehicles,
                               config.horizon, rng, demand.peak,
                               demand.width)
    return(Scenario(network, flows, config.horizon))
