""" Lane sensors

Classes
-------
LaneSensor
    A (wave, queue) reading of one lane
IntersectionSensors
    Readings of every incoming lane of an intersection plus the queues
    downstream of each signalized movement
"""
from dataclasses import dataclass
from typing import Dict, NamedTuple

from .base import Approach, Intersection, Movement


class LaneSensor(NamedTuple):
    wave: int
    queue: int


@dataclass
class IntersectionSensors:
    """ Snapshot of the detectors of one intersection

    Attributes
    ----------
    intersection_id: str
    lanes: dict
        (approach, movement) -> LaneSensor for the 12 incoming lanes
    capacity: dict
        (approach, movement) -> lane capacity in vehicles
    downstream_queue: dict
        (approach, movement) -> queue the movement discharges into; 0 when
        it leaves the network
    """
    intersection_id: str
    lanes: Dict[tuple, LaneSensor]
    capacity: Dict[tuple, int]
    downstream_queue: Dict[tuple, float]

    @classmethod
    def empty(cls, intersection_id: str = "intersection",
              capacity: int = 40) -> "IntersectionSensors":
        keys = [(a, m) for a in Approach for m in Movement]
        return(cls(intersection_id,
                   {k: LaneSensor(0, 0) for k in keys},
                   {k: capacity for k in keys},
                   {k: 0.0 for k in keys}))


def read_intersection(simulator, node: Intersection) -> IntersectionSensors:
    network = simulator.scenario.network
    lanes = {}
    capacity = {}
    downstream = {}
    for approach in Approach:
        for movement in Movement:
            lane = node.approach_lane(approach, movement)
            key = (approach, movement)
            lanes[key] = LaneSensor(simulator.wave(lane.id),
                                    simulator.queue(lane.id))
            capacity[key] = simulator.capacity(lane.id)
            road = network.downstream_road(lane)
            if road is None or not road.sink.signalized:
                downstream[key] = 0.0
            else:
                queues = [simulator.queue(out.id) for out in road.lanes]
                downstream[key] = sum(queues) / len(queues)
    return(IntersectionSensors(node.id, lanes, capacity, downstream))


def read_network(simulator) -> Dict[str, IntersectionSensors]:
    return({node.id: read_intersection(simulator, node)
            for node in simulator.scenario.network.intersections})
