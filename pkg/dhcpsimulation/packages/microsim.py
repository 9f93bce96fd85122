""" Lane-based microsimulator

Deterministic 1 Hz spatial-queue model. Vehicles advance at free speed until
they close up to their leader at jam spacing or reach the stop line. A head
vehicle crosses the intersection instantly when its movement is green (right
turns always are), the lane's discharge headway has elapsed and the next lane
of its route has room at its entrance.

Tick order
----------
1. Scheduled spawns whose time has come join their entry lane's pending FIFO
2. Pending vehicles enter at position 0 where the entrance is free
3. Heads at the stop line discharge into their next lane
4. Every lane advances front to back; vehicles reaching the end of their last
   road finish
5. The clock moves one second

Classes
-------
VehicleParameters
    Speed, spacing and discharge constants
VehicleRecord
    One vehicle
TravelLedger
    Spawn and finish times of every vehicle
StepEvents
    What happened during one tick
Simulator
    The simulation state and its step function
"""
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .scenario import Scenario
from .signalplan import RIGHT_TURNS, permitted_movements

DT = 1.0


@dataclass(frozen=True)
class VehicleParameters:
    v_max: float = 16.67
    vehicle_length: float = 5.0
    min_gap: float = 2.5
    headway: float = 2.0
    stop_speed: float = 0.1

    @property
    def jam_spacing(self) -> float:
        return(self.vehicle_length + self.min_gap)


@dataclass(eq=False)
class VehicleRecord:
    id: int
    route: tuple
    lanes: tuple
    index: int
    position: float
    speed: float
    spawn_time: float
    finish_time: Optional[float]

    @property
    def lane(self) -> str:
        return(self.lanes[self.index])

    @property
    def on_last_road(self) -> bool:
        return(self.index == len(self.lanes) - 1)


@dataclass
class TravelLedger:
    spawn_times: Dict[int, float] = field(default_factory=dict)
    finish_times: Dict[int, float] = field(default_factory=dict)
    pending: int = 0
    in_network: int = 0

    @property
    def spawned(self) -> int:
        return(len(self.spawn_times))

    @property
    def finished(self) -> int:
        return(len(self.finish_times))

    def balanced(self) -> bool:
        return(self.spawned == self.in_network + self.finished + self.pending)


@dataclass
class StepEvents:
    time: float
    spawned: List[int] = field(default_factory=list)
    entered: List[int] = field(default_factory=list)
    transfers: List[tuple] = field(default_factory=list)
    finished: List[int] = field(default_factory=list)


def average_travel_time(ledger: TravelLedger, horizon: float) -> float:
    """ Mean trip time, unfinished trips cut at the horizon """
    if ledger.spawned == 0:
        return(0.0)
    total = 0.0
    for vehicle, spawn_time in ledger.spawn_times.items():
        finish = ledger.finish_times.get(vehicle, horizon)
        total += finish - spawn_time
    return(total / ledger.spawned)


class Simulator:
    """ Simulation state of one scenario

    Attributes
    ----------
    scenario: Scenario
        Network and demand
    params: VehicleParameters
        Dynamics constants
    t: float
        Clock, seconds since the episode started
    ledger: TravelLedger
        Travel-time bookkeeping
    lanes: dict
        Lane id -> vehicles ordered from the stop line backwards

    Methods
    -------
    reset
        Empty the network and restart the clock
    step
        Advance one tick under the given signal states
    wave
        Vehicles on a lane
    queue
        Stopped vehicles on a lane
    """

    def __init__(self, scenario: Scenario,
                 params: VehicleParameters = VehicleParameters()) -> None:
        self.scenario = scenario
        self.params = params
        network = scenario.network

        self._length = {lid: lane.length
                        for lid, lane in network.lanes.items()}
        self._capacity = {lid: lane.capacity(params.jam_spacing)
                          for lid, lane in network.lanes.items()}
        short = [lid for lid, c in self._capacity.items() if c < 1]
        if short:
            raise ValueError(f"Lanes {short} are shorter than one jam "
                             f"spacing of {params.jam_spacing} m")
        # lane id -> (intersection id, (approach, movement)) for lanes ending
        # at a signalized node
        self._control = {}
        for node in network.intersections:
            for approach, road in node.inlets.items():
                for lane in road.lanes:
                    self._control[lane.id] = (node.id,
                                              (approach, lane.movement))
        self._order = list(network.lanes.keys())
        self.reset()

    def reset(self) -> None:
        self.t = 0.0
        self.ledger = TravelLedger()
        self.lanes = {lid: [] for lid in self._order}
        self.pending = {lid: deque() for lid in self._order}
        self._timers = {lid: self.params.headway for lid in self._order}
        self._next_spawn = 0
        self._next_id = 0

    # Sensors
    def _lane_vehicles(self, lane_id: str) -> list:
        try:
            return(self.lanes[lane_id])
        except KeyError:
            raise KeyError(f"Unknown lane {lane_id}")

    def wave(self, lane_id: str) -> int:
        return(len(self._lane_vehicles(lane_id)))

    def queue(self, lane_id: str) -> int:
        threshold = self.params.stop_speed
        return(sum(1 for v in self._lane_vehicles(lane_id)
                   if v.speed < threshold))

    def capacity(self, lane_id: str) -> int:
        """ Vehicles that fit on a lane at the configured jam spacing """
        try:
            return(self._capacity[lane_id])
        except KeyError:
            raise KeyError(f"Unknown lane {lane_id}")

    def counts(self) -> dict:
        return({"spawned": self.ledger.spawned,
                "in_network": self.ledger.in_network,
                "finished": self.ledger.finished,
                "pending": self.ledger.pending})

    def min_spacing(self) -> float:
        spacing = float("inf")
        for vehicles in self.lanes.values():
            for leader, follower in zip(vehicles[:-1], vehicles[1:]):
                spacing = min(spacing, leader.position - follower.position)
        return(spacing)

    def _entrance_free(self, lane_id: str) -> bool:
        vehicles = self.lanes[lane_id]
        if not vehicles:
            return(True)
        return(len(vehicles) < self._capacity[lane_id] and
               vehicles[-1].position >= self.params.jam_spacing - 1e-9)

    def _green(self, lane_id: str, signals: dict) -> bool:
        node_id, key = self._control[lane_id]
        if key in RIGHT_TURNS:
            return(True)
        return(key in permitted_movements(signals.get(node_id)))

    # Stepping
    def step(self, signals: dict, dt: float = DT) -> StepEvents:
        """ Advance one tick

        signals maps intersection id -> the Phase showing green, or None
        during yellow. Intersections missing from the mapping are treated as
        yellow.
        """
        if dt != DT:
            raise ValueError(f"The simulator only steps by {DT} s")
        events = StepEvents(self.t)
        self._spawn(events)
        self._enter(events)
        self._discharge(signals, events)
        self._advance(events)
        self.t += dt
        return(events)

    def _spawn(self, events: StepEvents) -> None:
        schedule = self.scenario.schedule
        routes = self.scenario.lane_routes
        while self._next_spawn < len(schedule) and \
                schedule[self._next_spawn].time <= self.t:
            spawn = schedule[self._next_spawn]
            self._next_spawn += 1
            vehicle = VehicleRecord(self._next_id, spawn.route,
                                    routes[spawn.route], 0, 0.0, 0.0,
                                    spawn.time, None)
            self._next_id += 1
            self.pending[vehicle.lane].append(vehicle)
            self.ledger.spawn_times[vehicle.id] = spawn.time
            self.ledger.pending += 1
            events.spawned.append(vehicle.id)

    def _enter(self, events: StepEvents) -> None:
        for lane_id in self._order:
            fifo = self.pending[lane_id]
            if fifo and self._entrance_free(lane_id):
                vehicle = fifo.popleft()
                self.lanes[lane_id].append(vehicle)
                self.ledger.pending -= 1
                self.ledger.in_network += 1
                events.entered.append(vehicle.id)

    def _discharge(self, signals: dict, events: StepEvents) -> None:
        for lane_id in self._order:
            self._timers[lane_id] += DT
            vehicles = self.lanes[lane_id]
            if not vehicles or lane_id not in self._control:
                continue
            head = vehicles[0]
            if head.on_last_road or \
                    head.position < self._length[lane_id] - 1e-9:
                continue
            if self._timers[lane_id] < self.params.headway - 1e-9:
                continue
            if not self._green(lane_id, signals):
                continue
            target = head.lanes[head.index + 1]
            if not self._entrance_free(target):
                continue
            vehicles.pop(0)
            head.index += 1
            head.position = 0.0
            self.lanes[target].append(head)
            self._timers[lane_id] = 0.0
            events.transfers.append((head.id, lane_id, target))

    def _advance(self, events: StepEvents) -> None:
        step = self.params.v_max * DT
        jam = self.params.jam_spacing
        for lane_id in self._order:
            vehicles = self.lanes[lane_id]
            if not vehicles:
                continue
            length = self._length[lane_id]
            leader_position = None
            for vehicle in vehicles:
                if leader_position is None:
                    room = length - vehicle.position
                else:
                    room = leader_position - jam - vehicle.position
                advance = min(step, max(room, 0.0))
                vehicle.position += advance
                vehicle.speed = advance / DT
                leader_position = vehicle.position
            # only the head can reach the end, followers stop a jam spacing
            # short of it
            head = vehicles[0]
            if head.on_last_road and head.position >= length - 1e-9:
                vehicles.pop(0)
                head.finish_time = self.t + DT
                self.ledger.finish_times[head.id] = head.finish_time
                self.ledger.in_network -= 1
                events.finished.append(head.id)
