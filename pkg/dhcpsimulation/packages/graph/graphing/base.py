""" Base classes for the road network graph

The road network is implemented as a graph where the roads are the edges
and the intersections are the nodes

Classes
-------
Approach
    Compass side of a node a road attaches to, in canonical order N, E, S, W
Movement
    The turn a lane serves, in canonical lane order Straight, Left, Right
NetworkObject
    Base class for roads and nodes
Lane
    One of the three lanes of a road
Road
    Directed road, acts as 'edges' of the network 'graph'
Node
    Generic node, acts as 'nodes' of the network 'graph'
Intersection
    A signalized four-way node
Boundary
    An unsignalized node where vehicles enter or leave the network
"""
import enum
import math

JAM_SPACING = 7.5


class Approach(enum.IntEnum):
    N = 0
    E = 1
    S = 2
    W = 3


class Movement(enum.IntEnum):
    STRAIGHT = 0
    LEFT = 1
    RIGHT = 2


def turn_between(arrival: Approach, exit: Approach) -> Movement:
    """ Movement of a vehicle arriving from one side and leaving by another

    Right-hand traffic: arriving from N the vehicle heads south, so a left
    turn leaves by E, straight by S and a right turn by W.
    """
    offset = (exit - arrival) % 4
    if offset == 0:
        raise ValueError(f"U-turn from {arrival.name} is not a movement")
    return({2: Movement.STRAIGHT, 1: Movement.LEFT, 3: Movement.RIGHT}[offset])


def exit_side(arrival: Approach, movement: Movement) -> Approach:
    offset = {Movement.STRAIGHT: 2, Movement.LEFT: 1, Movement.RIGHT: 3}
    return(Approach((arrival + offset[movement]) % 4))


class NetworkObject:
    """ Generic network object class

    Attributes
    ----------
    id: str
        User set label for identifying object
    """

    def __init__(self, id: str) -> None:
        if not isinstance(id, str) or id == "":
            raise TypeError(f"Expected a non-empty string id, got {id!r}")
        self.id = id


class Lane:
    """ A single lane of a road

    Attributes
    ----------
    id: str
        '<road id>_<index>'
    road: Road
        The road this lane belongs to
    movement: Movement
        The turn served at the end of the lane

    Methods
    -------
    capacity
        Vehicles that fit on the lane at a given jam spacing
    """

    def __init__(self, road: "Road", movement: Movement) -> None:
        self.road = road
        self.movement = movement
        self.id = f"{road.id}_{int(movement)}"

    @property
    def length(self) -> float:
        return(self.road.length)

    def capacity(self, jam_spacing: float = JAM_SPACING) -> int:
        return(int(math.floor(self.road.length / jam_spacing + 1e-9)))

    def __repr__(self) -> str:
        return(f"Lane({self.id}, {self.movement.name})")


class Road(NetworkObject):
    """ Road class

    The roads are thought of as the edges of a graph. As edges, they only have
    two connections, a source node and a sink node. Every road carries three
    lanes, one per movement.

    Attributes
    ----------
    source: Node
        The node the road starts at
    sink: Node
        The node the road ends at
    length: float
        Length in meters
    lanes: list
        Lanes in canonical order Straight, Left, Right
    """

    def __init__(self, id: str, length: float) -> None:
        super().__init__(id)
        self._source = None
        self._sink = None
        self.length = length
        self.lanes = [Lane(self, m) for m in Movement]

    def __str__(self) -> str:
        try:
            str_repr = f"{self.id}: {self._source.id} ----> {self._sink.id}"
        except AttributeError:
            str_repr = f"{self.id}: Broken connection"
        return(str_repr)

    def length() -> dict:
        doc = """Length of the road in meters"""

        def fget(self) -> float:
            return(self._length)

        def fset(self, value: float) -> None:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TypeError(f"Expected a numeric length for road "
                                f"{self.id}, got a {type(value)} instead")
            elif value < JAM_SPACING:
                raise ValueError(f"Road {self.id} must be at least "
                                 f"{JAM_SPACING} m long, got {value}")
            self._length = float(value)

        return({'fget': fget, 'fset': fset, 'doc': doc})
    length = property(**length())

    def source() -> dict:
        doc = """Where the road starts"""

        def fget(self) -> "Node":
            if self._source is None:
                raise AttributeError(f"Road {self.id} has no source")
            return(self._source)

        def fset(self, node: "Node") -> None:
            self._source = node

        return({'fget': fget, 'fset': fset, 'doc': doc})
    source = property(**source())

    def sink() -> dict:
        doc = """Where the road ends"""

        def fget(self) -> "Node":
            if self._sink is None:
                raise AttributeError(f"Road {self.id} has no sink")
            return(self._sink)

        def fset(self, node: "Node") -> None:
            self._sink = node

        return({'fget': fget, 'fset': fset, 'doc': doc})
    sink = property(**sink())

    def lane(self, movement: Movement) -> Lane:
        return(self.lanes[int(movement)])


class Node(NetworkObject):
    """ Generic node class

    Roads attach to a node by compass side, taken from the position of the
    node at the far end of the road.

    Attributes
    -----------
    x, y: float
        Position in meters, y grows towards the north
    inlets: dict
        Incoming roads keyed by the side they arrive from
    outlets: dict
        Outgoing roads keyed by the side they leave by

    Methods
    --------
    side_of
        Compass side of another node relative to this one
    add_inlet
        Attach an incoming road
    add_outlet
        Attach an outgoing road
    detach
        Remove a road from both sides of the node
    """
    signalized = False

    def __init__(self, id: str, x: float = 0.0, y: float = 0.0) -> None:
        super().__init__(id)
        self.x = float(x)
        self.y = float(y)
        self.inlets = dict()
        self.outlets = dict()

    def __str__(self) -> str:
        incoming = [road.source.id for road in self.inlets.values()]
        outgoing = [road.sink.id for road in self.outlets.values()]
        return(f'{incoming} ---> {self.id} ---> {outgoing}')

    def side_of(self, other: "Node") -> Approach:
        dx = other.x - self.x
        dy = other.y - self.y
        if dx == 0 and dy == 0:
            raise ValueError(f"Nodes {self.id} and {other.id} share a "
                             f"position")
        if abs(dy) >= abs(dx):
            return(Approach.N if dy > 0 else Approach.S)
        return(Approach.E if dx > 0 else Approach.W)

    def add_inlet(self, road: Road) -> Approach:
        """ Attach a road whose source is already set; one road per side """
        side = self.side_of(road.source)
        if side in self.inlets:
            raise ValueError(f"Node {self.id} already has road "
                             f"{self.inlets[side].id} arriving from "
                             f"{side.name}, cannot attach {road.id}")
        self.inlets[side] = road
        road.sink = self
        return(side)

    def add_outlet(self, road: Road) -> Approach:
        """ Attach a road whose sink is already set; one road per side """
        side = self.side_of(road.sink)
        if side in self.outlets:
            raise ValueError(f"Node {self.id} already has road "
                             f"{self.outlets[side].id} leaving by "
                             f"{side.name}, cannot attach {road.id}")
        self.outlets[side] = road
        road.source = self
        return(side)

    def detach(self, road: Road) -> None:
        for links in (self.inlets, self.outlets):
            for side in [s for s, r in links.items() if r is road]:
                del links[side]

    def inlet_side(self, road: Road) -> Approach:
        for side, inlet in self.inlets.items():
            if inlet is road:
                return(side)
        raise KeyError(f"Road {road.id} does not enter {self.id}")

    def outlet_side(self, road: Road) -> Approach:
        for side, outlet in self.outlets.items():
            if outlet is road:
                return(side)
        raise KeyError(f"Road {road.id} does not leave {self.id}")


class Intersection(Node):
    """ Signalized four-way intersection

    Methods
    -------
    incoming_lanes
        The 12 incoming lanes in canonical order (N, E, S, W approaches,
        Straight, Left, Right within each)
    approach_lane
        Incoming lane for an (approach, movement) pair
    validate
        Check the four-way invariant
    """
    signalized = True

    def validate(self) -> None:
        missing_in = [a.name for a in Approach if a not in self.inlets]
        missing_out = [a.name for a in Approach if a not in self.outlets]
        if missing_in or missing_out:
            raise ValueError(f"Signalized intersection {self.id} must have "
                             f"4 incoming and 4 outgoing roads, missing "
                             f"incoming {missing_in} and outgoing "
                             f"{missing_out}")

    def approach_lane(self, approach: Approach, movement: Movement) -> Lane:
        return(self.inlets[approach].lane(movement))

    def incoming_lanes(self) -> list:
        return([self.approach_lane(a, m) for a in Approach for m in Movement])


class Boundary(Node):
    """ Network boundary

    Vehicles are spawned on roads leaving a boundary and finish on roads
    entering one. Boundaries are never signalized.
    """
