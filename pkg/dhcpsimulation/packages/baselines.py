""" Baseline controllers

Classes
-------
SignalController
    Tick-level interface every controller exposes to the harness
CycleController
    Runs CyclePlans, asking for a new plan at every cycle boundary
PhaseChoiceController
    Picks a phase every `interval` green seconds, yellow on change
FixedTimeController
    Equal split of the cycle, never changes
SotlController
    Self-organizing: switch when enough vehicles wait on red
MaxPressureController
    Phase with the largest upstream minus downstream queue

Functions
---------
fixed_time_plan
max_pressure_choose
sotl_choose
"""
import enum
from typing import Dict, Optional

from .graph.graphing.sensors import IntersectionSensors, read_intersection
from .signalplan import (SIGNALIZED, YELLOW, CyclePlan, CycleSignal, Phase,
                         PhaseSignal, permitted_movements, round_durations)


class SotlDecision(enum.Enum):
    KEEP = "keep"
    SWITCH = "switch"


def fixed_time_plan(d_total: int, d_min: int) -> CyclePlan:
    """ Equal split rounded like every other plan """
    if d_total < 4 * d_min:
        raise ValueError(f"Cycle of {d_total} s cannot give four phases "
                         f"{d_min} s each")
    return(round_durations([d_total / 4] * 4, d_total, d_min))


def pressure(phase: Phase, sensors: IntersectionSensors) -> float:
    total = 0.0
    for key in permitted_movements(phase) & SIGNALIZED:
        total += sensors.lanes[key].queue - sensors.downstream_queue[key]
    return(total)


def max_pressure_choose(sensors: IntersectionSensors) -> Phase:
    best = Phase.NSS
    best_pressure = pressure(best, sensors)
    for phase in list(Phase)[1:]:
        value = pressure(phase, sensors)
        if value > best_pressure:
            best, best_pressure = phase, value
    return(best)


def red_queue(phase: Phase, sensors: IntersectionSensors) -> int:
    green = permitted_movements(phase)
    return(sum(sensors.lanes[key].queue
               for key in SIGNALIZED if key not in green))


def sotl_choose(phase: Phase, elapsed_green: float,
                sensors: IntersectionSensors,
                theta: float = 8, g_min: float = 10) -> SotlDecision:
    if theta <= 0 or g_min <= 0:
        raise ValueError(f"SOTL needs positive threshold and minimum green, "
                         f"got {theta} and {g_min}")
    if elapsed_green < g_min:
        return(SotlDecision.KEEP)
    if red_queue(phase, sensors) >= theta:
        return(SotlDecision.SWITCH)
    return(SotlDecision.KEEP)


class SignalController:
    """ Controller interface used by the harness

    Each tick the harness calls `signals` to get the green phase of every
    intersection (None during yellow), steps the simulator, then calls
    `advance`.
    """
    name = "controller"

    def reset(self, simulator) -> None:
        raise NotImplementedError

    def signals(self, simulator) -> Dict[str, Optional[Phase]]:
        raise NotImplementedError

    def advance(self) -> None:
        raise NotImplementedError


class CycleController(SignalController):
    """ Executes one CyclePlan per intersection per cycle """
    decision_interval = None

    def __init__(self, d_total: int = 60, d_min: int = 5,
                 yellow: int = YELLOW) -> None:
        self.d_total = d_total
        self.d_min = d_min
        self.yellow = yellow
        self._signals = {}
        self._clock = 0

    def plan(self, node, sensors: IntersectionSensors) -> CyclePlan:
        raise NotImplementedError

    def reset(self, simulator) -> None:
        self._clock = 0
        self._signals = {}
        self._nodes = simulator.scenario.network.intersections

    def signals(self, simulator) -> Dict[str, Optional[Phase]]:
        if self._clock % self.d_total == 0:
            for node in self._nodes:
                plan = self.plan(node, read_intersection(simulator, node))
                plan.validate(self.d_total, self.d_min, self.yellow)
                if node.id in self._signals:
                    self._signals[node.id].plan = plan
                else:
                    self._signals[node.id] = CycleSignal(plan, self.yellow)
        return({node_id: signal.green_phase()
                for node_id, signal in self._signals.items()})

    def advance(self) -> None:
        self._clock += 1
        for signal in self._signals.values():
            signal.advance()


class PhaseChoiceController(SignalController):
    """ Chooses a phase every `interval` seconds of green """

    def __init__(self, interval: int = 15, yellow: int = YELLOW) -> None:
        self.decision_interval = interval
        self.yellow = yellow
        self._signals = {}
        self.decisions = 0

    def choose(self, signal: PhaseSignal,
               sensors: IntersectionSensors) -> Phase:
        raise NotImplementedError

    def reset(self, simulator) -> None:
        self._nodes = simulator.scenario.network.intersections
        self._signals = {node.id: PhaseSignal(self.decision_interval,
                                              self.yellow)
                         for node in self._nodes}
        self.decisions = 0

    def signals(self, simulator) -> Dict[str, Optional[Phase]]:
        for node in self._nodes:
            signal = self._signals[node.id]
            if signal.decision_due:
                self.decisions += 1
                sensors = read_intersection(simulator, node)
                signal.request(self.choose(signal, sensors))
        return({node_id: signal.green_phase()
                for node_id, signal in self._signals.items()})

    def advance(self) -> None:
        for signal in self._signals.values():
            signal.advance()


class FixedTimeController(CycleController):
    name = "fixed"

    def plan(self, node, sensors: IntersectionSensors) -> CyclePlan:
        return(fixed_time_plan(self.d_total, self.d_min))


class MaxPressureController(PhaseChoiceController):
    name = "maxpressure"

    def choose(self, signal: PhaseSignal,
               sensors: IntersectionSensors) -> Phase:
        return(max_pressure_choose(sensors))


class SotlController(PhaseChoiceController):
    name = "sotl"

    def __init__(self, interval: int = 15, yellow: int = YELLOW,
                 theta: float = 8, g_min: float = 10) -> None:
        super().__init__(interval, yellow)
        self.theta = theta
        self.g_min = g_min

    def choose(self, signal: PhaseSignal,
               sensors: IntersectionSensors) -> Phase:
        decision = sotl_choose(signal.phase, signal.green_elapsed, sensors,
                               self.theta, self.g_min)
        if decision is SotlDecision.SWITCH:
            return(signal.phase.next())
        return(signal.phase)
