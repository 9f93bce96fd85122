""" Signal plans

Round-robin phase machine with a fixed cycle length. The cycle runs the four
phases in the fixed order NSS -> NSL -> EWS -> EWL; each phase gets an
integer duration, the last `yellow` seconds of which are yellow, so a cycle
lasts exactly D_total seconds.

Classes
-------
Phase
    The four signalized phases in cycle order
CyclePlan
    Integer durations of one cycle
CycleSignal
    Per-intersection state machine executing a CyclePlan
PhaseSignal
    Per-intersection state machine for controllers that pick phases

Functions
---------
allocate_high
    Split the cycle between the NS and EW directions
allocate_low
    Split a direction between its straight and left phases
round_durations
    Largest-remainder rounding that keeps the cycle total
permitted_movements
    Signalized (approach, movement) pairs a phase lets through
"""
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph.graphing.base import Approach, Movement

YELLOW = 3


class Phase(enum.IntEnum):
    NSS = 0
    NSL = 1
    EWS = 2
    EWL = 3

    def next(self) -> "Phase":
        return(Phase((self + 1) % 4))


_PERMITTED = {
    Phase.NSS: frozenset({(Approach.N, Movement.STRAIGHT),
                          (Approach.S, Movement.STRAIGHT)}),
    Phase.NSL: frozenset({(Approach.N, Movement.LEFT),
                          (Approach.S, Movement.LEFT)}),
    Phase.EWS: frozenset({(Approach.E, Movement.STRAIGHT),
                          (Approach.W, Movement.STRAIGHT)}),
    Phase.EWL: frozenset({(Approach.E, Movement.LEFT),
                          (Approach.W, Movement.LEFT)}),
}

RIGHT_TURNS = frozenset((a, Movement.RIGHT) for a in Approach)
SIGNALIZED = frozenset().union(*_PERMITTED.values())
TIE_ORDER = (Phase.NSS, Phase.NSL, Phase.EWS, Phase.EWL)


def permitted_movements(phase: Optional[Phase]) -> frozenset:
    """ Movements allowed to discharge; None stands for yellow """
    if phase is None:
        return(RIGHT_TURNS)
    return(_PERMITTED[Phase(phase)] | RIGHT_TURNS)


@dataclass(frozen=True)
class CyclePlan:
    d_nss: int
    d_nsl: int
    d_ews: int
    d_ewl: int

    def __getitem__(self, phase: Phase) -> int:
        return(self.durations[int(phase)])

    @property
    def durations(self) -> tuple:
        return((self.d_nss, self.d_nsl, self.d_ews, self.d_ewl))

    @property
    def total(self) -> int:
        return(sum(self.durations))

    def validate(self, d_total: int, d_min: int,
                 yellow: int = YELLOW) -> None:
        if self.total != d_total:
            raise ValueError(f"Plan {self.durations} sums to {self.total}, "
                             f"expected {d_total}")
        if min(self.durations) < d_min:
            raise ValueError(f"Plan {self.durations} has a phase shorter "
                             f"than {d_min} s")
        if min(self.durations) < yellow + 1:
            raise ValueError(f"Plan {self.durations} leaves less than 1 s of "
                             f"green after a {yellow} s yellow")


def _rescale(score: float) -> float:
    return((float(np.clip(score, -1.0, 1.0)) + 1.0) / 2.0)


def allocate_high(a_h: float, d_total: float, d_min: float) -> tuple:
    """ (D_NS, D_EW) from the high-level score """
    if d_total < 4 * d_min:
        raise ValueError(f"Cycle of {d_total} s cannot give four phases "
                         f"{d_min} s each")
    rho_ns = _rescale(a_h)
    slack = d_total - 4 * d_min
    d_ns = 2 * d_min + rho_ns * slack
    d_ew = 2 * d_min + (1 - rho_ns) * slack
    return(d_ns, d_ew)


def allocate_low(a_l: float, d_dir: float, d_min: float) -> tuple:
    """ (D_straight, D_left) of one direction from the low-level score """
    if d_dir < 2 * d_min - 1e-9:
        raise RuntimeError(f"Direction duration {d_dir} s is below "
                           f"2 * D_min = {2 * d_min} s")
    rho = _rescale(a_l)
    slack = max(d_dir - 2 * d_min, 0.0)
    return(d_min + rho * slack, d_min + (1 - rho) * slack)


def round_durations(reals, d_total: int, d_min: int = 0) -> CyclePlan:
    """ Largest-remainder rounding of four real durations

    Floor every duration, then hand the missing seconds one each to the
    largest fractional parts. Equal fractions are served in TIE_ORDER, the
    cycle order of the phases.
    """
    reals = [float(x) for x in reals]
    if len(reals) != 4:
        raise IndexError(f"Expected 4 durations, got {len(reals)}")
    if abs(sum(reals) - d_total) > 1e-6:
        raise ValueError(f"Durations {reals} do not sum to {d_total}")
    if min(reals) < d_min - 1e-6:
        raise ValueError(f"Durations {reals} go below D_min = {d_min}")

    floors = [int(math.floor(x + 1e-9)) for x in reals]
    extra = int(round(d_total - sum(floors)))
    fractions = [x - f for x, f in zip(reals, floors)]
    order = sorted(range(4), key=lambda i: (-round(fractions[i], 9),
                                            TIE_ORDER.index(i)))
    for i in order[:extra]:
        floors[i] += 1
    return(CyclePlan(*floors))


class CycleSignal:
    """ Fixed-cycle signal for one intersection

    Attributes
    ----------
    plan: CyclePlan
        Durations of the cycle being executed
    phase: Phase
        Active phase
    phase_elapsed: int
        Seconds spent in the active phase, yellow included

    Methods
    -------
    advance
        Move one second forward, wrapping to the next phase when the active
        phase has used its duration
    green_phase
        The phase currently showing green, None during yellow
    """

    def __init__(self, plan: CyclePlan, yellow: int = YELLOW) -> None:
        self.yellow = yellow
        self.plan = plan
        self.phase = Phase.NSS
        self.phase_elapsed = 0

    def plan() -> dict:
        doc = """Durations of the cycle being executed"""

        def fget(self) -> CyclePlan:
            return(self._plan)

        def fset(self, value: CyclePlan) -> None:
            if min(value.durations) < self.yellow + 1:
                raise ValueError(f"Plan {value.durations} leaves less than "
                                 f"1 s of green after a {self.yellow} s "
                                 f"yellow")
            self._plan = value

        return({'fget': fget, 'fset': fset, 'doc': doc})
    plan = property(**plan())

    @property
    def in_yellow(self) -> bool:
        return(self.phase_elapsed >= self.plan[self.phase] - self.yellow)

    @property
    def yellow_elapsed(self) -> int:
        green = self.plan[self.phase] - self.yellow
        return(max(self.phase_elapsed - green, 0))

    @property
    def cycle_start(self) -> bool:
        return(self.phase == Phase.NSS and self.phase_elapsed == 0)

    def green_phase(self) -> Optional[Phase]:
        return(None if self.in_yellow else self.phase)

    def advance(self, dt: int = 1) -> None:
        for _ in range(dt):
            self.phase_elapsed += 1
            if self.phase_elapsed >= self.plan[self.phase]:
                self.phase = self.phase.next()
                self.phase_elapsed = 0


class PhaseSignal:
    """ Phase-choice signal for one intersection

    The controller asks for a phase every `interval` seconds of green. A
    request for a different phase runs `yellow` seconds of yellow before the
    new phase turns green.
    """

    def __init__(self, interval: int = 15, yellow: int = YELLOW,
                 phase: Phase = Phase.NSS) -> None:
        if interval <= 0:
            raise ValueError(f"Decision interval must be positive, got "
                             f"{interval}")
        self.interval = interval
        self.yellow = yellow
        self.phase = phase
        self.green_elapsed = 0
        self.yellow_remaining = 0
        self._pending = None
        self._started = False

    @property
    def in_yellow(self) -> bool:
        return(self.yellow_remaining > 0)

    @property
    def decision_due(self) -> bool:
        if self.in_yellow:
            return(False)
        if not self._started:
            return(True)
        return(self.green_elapsed > 0 and
               self.green_elapsed % self.interval == 0)

    def request(self, phase: Phase) -> None:
        self._started = True
        phase = Phase(phase)
        if phase == self.phase:
            return
        self._pending = phase
        self.yellow_remaining = self.yellow
        if self.yellow_remaining == 0:
            self._switch()

    def _switch(self) -> None:
        self.phase = self._pending
        self._pending = None
        self.green_elapsed = 0

    def green_phase(self) -> Optional[Phase]:
        return(None if self.in_yellow else self.phase)

    def advance(self, dt: int = 1) -> None:
        for _ in range(dt):
            if self.in_yellow:
                self.yellow_remaining -= 1
                if self.yellow_remaining == 0:
                    self._switch()
            else:
                self.green_elapsed += 1
