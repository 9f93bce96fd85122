""" Scenarios

A scenario is a road network plus the traffic demand driven through it.
Demand is a list of flows in the open-dataset style: a route of road ids and
a vehicle every `interval` seconds between `startTime` and `endTime`. Any
other attribute of a flow entry (vehicle dynamics and the like) is ignored.

Classes
-------
FlowSpec
    One repeating flow
Spawn
    One scheduled vehicle
Scenario
    Network, flows and the routes resolved to lanes

Functions
---------
load_scenario
    Read and validate a roadnet file and a flow file
expand_flows
    Time ordered spawn schedule
straight_flows
    Straight-through demand for a grid with separate NS and EW intervals
gaussian_flows
    Synthetic demand following a Gaussian profile over the horizon
"""
import json
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import utils
from .graph import network as roadnet
from .graph.graphing.base import Movement


@dataclass(frozen=True)
class FlowSpec:
    route: tuple
    interval: float
    start_time: float = 0.0
    end_time: float = 3600.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "route", tuple(self.route))
        if len(self.route) == 0:
            raise ValueError("Flow route must name at least one road")
        if self.interval <= 0:
            raise ValueError(f"Flow interval must be positive, got "
                             f"{self.interval}")
        if not 0 <= self.start_time <= self.end_time:
            raise ValueError(f"Flow times must satisfy 0 <= startTime <= "
                             f"endTime, got {self.start_time} and "
                             f"{self.end_time}")

    def to_dict(self) -> dict:
        return({"route": list(self.route), "interval": self.interval,
                "startTime": self.start_time, "endTime": self.end_time})

    @classmethod
    def from_dict(cls, entry: dict) -> "FlowSpec":
        return(cls(route=tuple(str(r) for r in entry["route"]),
                   interval=float(entry["interval"]),
                   start_time=float(entry.get("startTime", 0.0)),
                   end_time=float(entry.get("endTime", 3600.0))))


@dataclass(frozen=True)
class Spawn:
    time: float
    route: tuple
    flow_index: int


@dataclass
class Scenario:
    """ Road network and demand

    Attributes
    ----------
    network: RoadNetwork
    flows: list
        FlowSpec entries in declaration order
    horizon: float
        Episode length in seconds
    schedule: list
        Spawn entries sorted by time
    lane_routes: dict
        Route tuple -> lane ids the vehicle drives, one per road
    """
    network: roadnet.RoadNetwork
    flows: List[FlowSpec]
    horizon: float = 3600.0
    schedule: List[Spawn] = field(init=False)
    lane_routes: dict = field(init=False)

    def __post_init__(self) -> None:
        self.lane_routes = {}
        for flow in self.flows:
            if flow.route not in self.lane_routes:
                self.lane_routes[flow.route] = resolve_route(self.network,
                                                             flow.route)
        self.schedule = expand_flows(self.flows, self.horizon)


def resolve_route(network: roadnet.RoadNetwork, route: tuple) -> tuple:
    """ Lane ids a vehicle drives on a route

    On every road the vehicle takes the lane of its next turn; on the last
    road it takes the straight lane and finishes at the end of the road.
    """
    try:
        roads = [network.roads[road_id] for road_id in route]
    except KeyError as e:
        raise ValueError(f"Route {list(route)} references unknown road {e}")
    lanes = []
    for road, nxt in zip(roads[:-1], roads[1:]):
        lanes.append(road.lane(network.turn(road, nxt)).id)
    lanes.append(roads[-1].lane(Movement.STRAIGHT).id)
    return(tuple(lanes))


def spawn_count(flow: FlowSpec, horizon: float) -> int:
    end = min(flow.end_time, horizon)
    if end < flow.start_time:
        return(0)
    return(int(math.floor((end - flow.start_time) / flow.interval
                          + utils.tolerance)) + 1)


def expand_flows(flows: List[FlowSpec], horizon: float) -> List[Spawn]:
    """ Time-ordered spawns of every flow up to and including the horizon

    The count per flow is floor((min(end, horizon) - start) / interval) + 1,
    so a flow ending at the horizon schedules a spawn at t == horizon. An
    episode ticks t = 0 .. horizon - 1, so that spawn is never released and
    takes no part in travel time, throughput or the conservation counts.
    """
    if horizon <= 0:
        raise ValueError(f"Horizon must be positive, got {horizon}")
    schedule = []
    for index, flow in enumerate(flows):
        for k in range(spawn_count(flow, horizon)):
            time = flow.start_time + k * flow.interval
            schedule.append(Spawn(time, flow.route, index))
    # sort is stable, so equal times keep declaration order
    schedule.sort(key=lambda spawn: spawn.time)
    return(schedule)


def load_flows(path: str) -> List[FlowSpec]:
    data = utils.import_json(path)
    if not isinstance(data, list):
        raise RuntimeError(f"File '{path}' must contain a list of flows")
    flows = []
    for index, entry in enumerate(data):
        try:
            flows.append(FlowSpec.from_dict(entry))
        except (KeyError, TypeError) as e:
            raise RuntimeError(f"File '{path}' flow {index} is malformed: "
                               f"{e!r}")
    return(flows)


def save_flows(flows: List[FlowSpec], path: str) -> None:
    utils.write_atomic(path, json.dumps([f.to_dict() for f in flows],
                                        indent=2))


def load_scenario(roadnet_path: str, flow_path: str,
                  horizon: float = 3600.0) -> Scenario:
    network = roadnet.load_roadnet(roadnet_path)
    flows = load_flows(flow_path)
    for index, flow in enumerate(flows):
        if flow.start_time > horizon:
            raise ValueError(f"Flow {index} starts after the horizon")
    return(Scenario(network, flows, horizon))


def straight_flows(network: roadnet.RoadNetwork,
                   ns_interval: float, ew_interval: float,
                   start_time: float = 0.0,
                   end_time: float = 3600.0) -> List[FlowSpec]:
    flows = []
    for entry in roadnet.entry_roads(network):
        interval = ns_interval if roadnet.travel_axis(entry) == "NS" \
            else ew_interval
        if interval is None:
            continue
        flows.append(FlowSpec(tuple(roadnet.straight_path(network, entry)),
                              interval, start_time, end_time))
    return(flows)


def gaussian_flows(network: roadnet.RoadNetwork,
                   total_vehicles: int,
                   horizon: float,
                   rng: np.random.Generator,
                   peak: Optional[float] = None,
                   width: Optional[float] = None,
                   slot: float = 300.0) -> List[FlowSpec]:
    """ Synthetic demand with a Gaussian time profile

    Spawn times of total_vehicles are drawn from a normal distribution
    centred on `peak` (default mid-horizon), then counted per `slot` seconds
    and per entry road; each non-empty (slot, entry) cell becomes one evenly
    spaced flow over that slot.
    """
    entries = roadnet.entry_roads(network)
    if total_vehicles <= 0 or not entries:
        return([])
    if peak is None:
        peak = horizon / 2
    if width is None:
        width = horizon / 4
    times = rng.normal(peak, width, size=total_vehicles)
    times = times[(times >= 0) & (times < horizon)]
    which = rng.integers(len(entries), size=times.size)
    n_slots = int(math.ceil(horizon / slot))
    counts = np.zeros((n_slots, len(entries)), dtype=int)
    np.add.at(counts, ((times // slot).astype(int), which), 1)

    routes = [tuple(roadnet.straight_path(network, e)) for e in entries]
    flows = []
    for s in range(n_slots):
        start = s * slot
        end = min(start + slot, horizon)
        for e, count in enumerate(counts[s]):
            if count == 0:
                continue
            interval = (end - start) / count
            flows.append(FlowSpec(routes[e], interval, start,
                                  start + interval * (count - 1)))
    return(flows)
