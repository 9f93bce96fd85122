""" Road network

Holds the nodes and roads of a scenario, builds synthetic grids and reads and
writes the JSON roadnet layout:

    {"nodes": [{"id", "x", "y", "signalized"}, ...],
     "roads": [{"id", "from", "to", "length_m"}, ...]}

Every road implicitly carries three lanes (Straight, Left, Right). Unknown
fields are ignored.
"""
import json
import warnings
from collections import OrderedDict

from .. import utils
from .graphing.base import (Approach, Boundary, Intersection, Lane, Movement,
                            Node, Road, exit_side, turn_between)


class RoadNetwork:
    def __init__(self) -> None:
        # Using ordered dictionaries to perserve lane and state order
        self.nodes = OrderedDict()
        self.roads = OrderedDict()
        self._lanes = None

    def add_node(self, node: Node) -> None:
        if node.id in self.nodes.keys():
            warnings.warn(f"Node {node.id} already exists, overriding")
        self.nodes[node.id] = node
        self._lanes = None

    def add_road(self, road: Road, source_id: str, sink_id: str) -> None:
        """ Connect road from source to sink

        A second road on an occupied side of either node is a ValueError
        naming the node and both roads.
        """
        try:
            source = self.nodes[source_id]
            sink = self.nodes[sink_id]
        except KeyError as e:
            raise ValueError(f"Road {road.id} references unknown node {e}")
        if road.id in self.roads.keys():
            warnings.warn(f"Road {road.id} already exists, overriding")
            old = self.roads.pop(road.id)
            old.source.detach(old)
            old.sink.detach(old)

        road.source = source
        road.sink = sink
        source.add_outlet(road)
        try:
            sink.add_inlet(road)
        except ValueError:
            source.detach(road)
            raise
        self.roads[road.id] = road
        self._lanes = None

    # Lookups
    @property
    def intersections(self) -> list:
        return([n for n in self.nodes.values() if n.signalized])

    @property
    def boundaries(self) -> list:
        return([n for n in self.nodes.values() if not n.signalized])

    @property
    def lanes(self) -> OrderedDict:
        if self._lanes is None:
            self._lanes = OrderedDict(
                (lane.id, lane)
                for road in self.roads.values() for lane in road.lanes)
        return(self._lanes)

    def lane(self, lane_id: str) -> Lane:
        try:
            return(self.lanes[lane_id])
        except KeyError:
            raise KeyError(f"Unknown lane {lane_id}")

    def turn(self, road_in: Road, road_out: Road) -> Movement:
        """ Movement taken at the node between two consecutive roads """
        node = road_in.sink
        if road_out.source is not node:
            raise ValueError(f"Roads {road_in.id} and {road_out.id} are not "
                             f"connected")
        if not node.signalized:
            raise ValueError(f"Route passes through boundary node {node.id} "
                             f"between {road_in.id} and {road_out.id}")
        try:
            return(turn_between(node.inlet_side(road_in),
                                node.outlet_side(road_out)))
        except ValueError:
            raise ValueError(f"Route makes a U-turn at {node.id} from "
                             f"{road_in.id} to {road_out.id}")

    def downstream_road(self, lane: Lane):
        """ Road a signalized lane discharges into, None at boundaries """
        node = lane.road.sink
        if not node.signalized:
            return(None)
        side = exit_side(node.inlet_side(lane.road), lane.movement)
        return(node.outlets.get(side))

    def validate(self) -> None:
        for road in self.roads.values():
            if road.source.id not in self.nodes or \
                    road.sink.id not in self.nodes:
                raise ValueError(f"Road {road.id} references a node outside "
                                 f"the network")
        for node in self.intersections:
            node.validate()

    # Serialization
    def to_dict(self) -> dict:
        nodes = [{"id": n.id, "x": n.x, "y": n.y, "signalized": n.signalized}
                 for n in self.nodes.values()]
        roads = [{"id": r.id, "from": r.source.id, "to": r.sink.id,
                  "length_m": r.length}
                 for r in self.roads.values()]
        return({"nodes": nodes, "roads": roads})

    @classmethod
    def from_dict(cls, data: dict, name: str = "roadnet") -> "RoadNetwork":
        if not isinstance(data, dict) or "nodes" not in data or \
                "roads" not in data:
            raise RuntimeError(f"{name} must have 'nodes' and 'roads' lists")
        network = cls()
        try:
            for entry in data["nodes"]:
                node_type = Intersection if entry.get("signalized") \
                    else Boundary
                network.add_node(node_type(str(entry["id"]),
                                           entry.get("x", 0.0),
                                           entry.get("y", 0.0)))
            for entry in data["roads"]:
                road = Road(str(entry["id"]), entry["length_m"])
                network.add_road(road, str(entry["from"]), str(entry["to"]))
        except (KeyError, TypeError, AttributeError) as e:
            raise RuntimeError(f"{name} has a malformed entry: {e!r}")
        network.validate()
        return(network)


def load_roadnet(path: str) -> RoadNetwork:
    return(RoadNetwork.from_dict(utils.import_json(path), name=f"'{path}'"))


def save_roadnet(network: RoadNetwork, path: str) -> None:
    utils.write_atomic(path, json.dumps(network.to_dict(), indent=2))


def build_grid(rows: int, cols: int,
               approach_len_ns: float,
               approach_len_ew: float) -> RoadNetwork:
    """ Signalized rows x cols grid with a boundary node beyond each edge

    Intersection (r, c) sits at x = c * EW length, y = -r * NS length, so
    row 0 is the northern row. Every link is built in both directions.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"Grid needs at least one row and column, got "
                         f"{rows}x{cols}")
    if approach_len_ns <= 0 or approach_len_ew <= 0:
        raise ValueError("Approach lengths must be positive")
    ns = float(approach_len_ns)
    ew = float(approach_len_ew)

    network = RoadNetwork()
    for r in range(rows):
        for c in range(cols):
            network.add_node(Intersection(f"intersection_{r}_{c}",
                                          c * ew, -r * ns))
    for c in range(cols):
        network.add_node(Boundary(f"boundary_N_{c}", c * ew, ns))
        network.add_node(Boundary(f"boundary_S_{c}", c * ew, -rows * ns))
    for r in range(rows):
        network.add_node(Boundary(f"boundary_W_{r}", -ew, -r * ns))
        network.add_node(Boundary(f"boundary_E_{r}", cols * ew, -r * ns))

    def link(a: str, b: str, length: float) -> None:
        network.add_road(Road(f"road_{a}_to_{b}", length), a, b)
        network.add_road(Road(f"road_{b}_to_{a}", length), b, a)

    for c in range(cols):
        column = [f"boundary_N_{c}"] + \
            [f"intersection_{r}_{c}" for r in range(rows)] + \
            [f"boundary_S_{c}"]
        for a, b in zip(column[:-1], column[1:]):
            link(a, b, ns)
    for r in range(rows):
        row = [f"boundary_W_{r}"] + \
            [f"intersection_{r}_{c}" for c in range(cols)] + \
            [f"boundary_E_{r}"]
        for a, b in zip(row[:-1], row[1:]):
            link(a, b, ew)

    network.validate()
    return(network)


def straight_path(network: RoadNetwork, entry: Road) -> list:
    """ Road ids followed by driving straight from an entry road to a boundary
    """
    route = [entry.id]
    road = entry
    while road.sink.signalized:
        node = road.sink
        side = exit_side(node.inlet_side(road), Movement.STRAIGHT)
        road = node.outlets[side]
        route.append(road.id)
    return(route)


def entry_roads(network: RoadNetwork) -> list:
    """ Roads leaving a boundary node, in network order """
    return([road for road in network.roads.values()
            if not road.source.signalized and road.sink.signalized])


def travel_axis(road: Road) -> str:
    """ 'NS' for roads running north-south, 'EW' otherwise """
    side = road.sink.side_of(road.source)
    return("NS" if side in (Approach.N, Approach.S) else "EW")
