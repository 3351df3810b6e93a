"""Deterministic discrete-event kernel.

Simulation clock, future event set with stable FIFO tie-breaking, message
identity allocation, and the run loop. Time is integer nanoseconds
throughout; there is no floating point anywhere on the event path, so two
runs of the same network produce byte-identical traces.
"""

from __future__ import annotations

import enum
import heapq
import time as _wallclock
from dataclasses import dataclass
from typing import Optional, Sequence

NS_PER_US = 1_000
NS_PER_MS = 1_000_000
NS_PER_S = 1_000_000_000

# SimTime is confined to a signed 64-bit range even though Python ints are
# unbounded: overflow must be an error, not a silently huge timestamp.
MAX_TIME_NS = 2**63 - 1


class SimulationError(Exception):
    """Base class for every error this package raises."""


class SimTimeRangeError(SimulationError):
    """Simulation time left the valid [0, 2**63 - 1] nanosecond range."""


class SchedulingInPast(SimulationError):
    """An event was scheduled before the current simulation time."""


class HandlerError(SimulationError):
    """A module handler failed while dispatching an event."""

    def __init__(self, module_path: str, event_no: int, cause: BaseException):
        super().__init__(f"event #{event_no} at {module_path}: {cause}")
        self.module_path = module_path
        self.event_no = event_no


@dataclass(frozen=True, slots=True, order=True)
class SimTime:
    """Integer-nanosecond simulation timestamp.

    Arithmetic is exact and checked: any result outside the 64-bit
    non-negative range raises instead of wrapping, and 0.01 s is exactly
    10,000,000 ns. Instances are immutable and totally ordered.
    """

    ns: int

    def __post_init__(self) -> None:
        if not isinstance(self.ns, int) or isinstance(self.ns, bool):
            raise TypeError(f"SimTime needs an int nanosecond count, got {self.ns!r}")
        if self.ns < 0:
            raise SimTimeRangeError(f"negative simulation time: {self.ns} ns")
        if self.ns > MAX_TIME_NS:
            raise SimTimeRangeError(f"simulation time overflows 64 bits: {self.ns} ns")

    @classmethod
    def zero(cls) -> "SimTime":
        return cls(0)

    @classmethod
    def from_micros(cls, us: int) -> "SimTime":
        return cls(us * NS_PER_US)

    @classmethod
    def from_millis(cls, ms: int) -> "SimTime":
        return cls(ms * NS_PER_MS)

    @classmethod
    def from_seconds(cls, s: int) -> "SimTime":
        return cls(s * NS_PER_S)

    def __add__(self, other: "SimTime") -> "SimTime":
        if not isinstance(other, SimTime):
            return NotImplemented
        return SimTime(self.ns + other.ns)

    def __sub__(self, other: "SimTime") -> "SimTime":
        if not isinstance(other, SimTime):
            return NotImplemented
        return SimTime(self.ns - other.ns)

    def __mul__(self, k: int) -> "SimTime":
        if not isinstance(k, int) or isinstance(k, bool):
            return NotImplemented
        return SimTime(self.ns * k)

    __rmul__ = __mul__

    def seconds_str(self) -> str:
        """Render as decimal seconds with no trailing zeros and no exponent.

        0 ns -> "0", 10,000,000 ns -> "0.01", 1,500,000,000 ns -> "1.5".
        """
        secs, rem = divmod(self.ns, NS_PER_S)
        if rem == 0:
            return str(secs)
        return f"{secs}.{rem:09d}".rstrip("0")

    def __str__(self) -> str:
        return f"{self.seconds_str()}s"

    def __repr__(self) -> str:
        return f"SimTime({self.ns})"


class MessageKind(enum.Enum):
    """Control message vs. packet; the value is the trace label."""

    CONTROL_MESSAGE = "cMessage"
    PACKET = "cPacket"

    @property
    def trace_label(self) -> str:
        return self.value

    @property
    def name_suffix(self) -> str:
        return "Msg" if self is MessageKind.CONTROL_MESSAGE else "Pck"


class SimMessage:
    """The unit flowing through layers.

    The name may be rewritten as layers relay the message; identity (msgId),
    kind, byte length and creation time are fixed at creation. Messages also
    carry a private route stack used by fan-in points (air hops, the S-GW S1
    module) to send replies back the way they came without any handler
    keeping cross-event state.
    """

    __slots__ = ("_msg_id", "name", "_kind", "kind_label", "_byte_length",
                 "_creation_time", "_route")

    def __init__(self, msg_id: int, name: str, kind: MessageKind,
                 byte_length: int, creation_time: SimTime):
        if byte_length < 0:
            raise ValueError("byte length must be non-negative")
        if kind is MessageKind.CONTROL_MESSAGE and byte_length != 0:
            raise ValueError("control messages carry no payload bytes")
        self._msg_id = msg_id
        self.name = name
        self._kind = kind
        self.kind_label = kind.value
        self._byte_length = byte_length
        self._creation_time = creation_time
        self._route: list = []

    @property
    def msg_id(self) -> int:
        return self._msg_id

    @property
    def kind(self) -> MessageKind:
        return self._kind

    @property
    def byte_length(self) -> int:
        return self._byte_length

    @property
    def creation_time(self) -> SimTime:
        return self._creation_time

    def push_route(self, waypoint) -> None:
        self._route.append(waypoint)

    def pop_route(self):
        if not self._route:
            return None
        return self._route.pop()

    def __repr__(self) -> str:
        return (f"SimMessage(id={self._msg_id}, name={self.name!r}, "
                f"kind={self._kind.trace_label})")


@dataclass(slots=True)
class ScheduledEvent:
    """One pending event: arrival of a payload at a module gate."""

    fire_time: SimTime
    target: object
    arrival_gate: str
    payload: SimMessage
    insertion_seq: Optional[int] = None


@dataclass(slots=True)
class EventRecord:
    """One executed event, the unit of tracing and metrics."""

    event_no: int
    t_ns: int
    path: str
    type_name: str
    module_id: int
    msg_name: str
    msg_kind: str
    msg_id: int

    @property
    def time(self) -> SimTime:
        return SimTime(self.t_ns)


class StopReason(enum.Enum):
    FES_EMPTY = "FesEmpty"
    TIME_LIMIT = "TimeLimit"
    EVENT_LIMIT = "EventLimit"


@dataclass(slots=True)
class RunSummary:
    events_executed: int
    final_time: SimTime
    stop_reason: StopReason
    wall_clock_seconds: float
    seed: int = 0


class FutureEventSet:
    """Pending events ordered by (fire time, insertion sequence).

    Pop order is nondecreasing in fire time; events with equal fire time
    come out strictly FIFO, so simultaneous events never reorder between
    runs.
    """

    def __init__(self) -> None:
        self._heap: list = []
        self._next_seq = 0

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)

    def schedule(self, ev: ScheduledEvent, now: SimTime) -> ScheduledEvent:
        if ev.fire_time < now:
            raise SchedulingInPast(
                f"cannot schedule at {ev.fire_time!r} when now is {now!r}")
        ev.insertion_seq = self._next_seq
        self._next_seq += 1
        heapq.heappush(self._heap, (ev.fire_time.ns, ev.insertion_seq, ev))
        return ev

    def pop_next(self) -> Optional[ScheduledEvent]:
        if not self._heap:
            return None
        return heapq.heappop(self._heap)[2]

    def peek_time_ns(self) -> Optional[int]:
        if not self._heap:
            return None
        return self._heap[0][0]


class Simulator:
    """One sequential event loop over a built module tree.

    A simulator owns its clock, its future event set and its message-id
    counter; independent instances share nothing. All operations on a
    running instance happen from inside the loop (module handlers).
    """

    def __init__(self, root, seed: int = 0):
        self.root = root
        self.seed = seed
        self.fes = FutureEventSet()
        self._now_ns = 0
        self._next_msg_id = 1
        self._ran = False
        self._modules = list(root.iter_tree())
        for mod in self._modules:
            if mod._sim is not None:
                raise SimulationError(
                    f"{mod.name}: module tree is already bound to a simulator; "
                    "build a fresh network per simulator instance")
        for mod in self._modules:
            mod.bind_simulator(self)

    @property
    def now(self) -> SimTime:
        return SimTime(self._now_ns)

    def new_message(self, name: str, kind: MessageKind, byte_length: int = 0,
                    at: Optional[SimTime] = None) -> SimMessage:
        """Allocate a message with the next msgId; ids strictly increase."""
        created = self.now if at is None else at
        msg = SimMessage(self._next_msg_id, name, kind, byte_length, created)
        self._next_msg_id += 1
        return msg

    def schedule_arrival(self, target, arrival_gate: str, payload: SimMessage,
                         fire_time: SimTime) -> ScheduledEvent:
        return self._schedule_ns(target, arrival_gate, payload, fire_time.ns)

    def _schedule_ns(self, target, arrival_gate: str, payload: SimMessage,
                     fire_ns: int) -> ScheduledEvent:
        # hot path: one SimTime per event, int comparisons everywhere else
        if fire_ns < self._now_ns:
            raise SchedulingInPast(
                f"cannot schedule at {fire_ns} ns when now is {self._now_ns} ns")
        ev = ScheduledEvent(SimTime(fire_ns), target, arrival_gate, payload)
        fes = self.fes
        ev.insertion_seq = seq = fes._next_seq
        fes._next_seq = seq + 1
        heapq.heappush(fes._heap, (fire_ns, seq, ev))
        return ev

    def run(self, until: SimTime, event_limit: Optional[int] = None,
            sinks: Sequence = ()) -> RunSummary:
        """Dispatch events with fire time strictly below `until`.

        Emits one EventRecord per dispatched event, numbered from 1, to
        every sink before the target handler runs, so records show each
        message as it arrived. Stops when the FES drains, the next event
        would fire at or past `until`, or `event_limit` events have run.
        """
        if self._ran:
            raise SimulationError("this simulator instance has already run")
        self._ran = True

        self.root.lock_wiring()
        self.root.assign_ids()
        for mod in self._modules:
            mod.on_start(self)

        fes = self.fes
        heap = fes._heap
        until_ns = until.ns
        executed = 0
        t_start = _wallclock.perf_counter()
        while True:
            if event_limit is not None and executed >= event_limit:
                reason = StopReason.EVENT_LIMIT
                break
            if not heap:
                reason = StopReason.FES_EMPTY
                break
            if heap[0][0] >= until_ns:
                reason = StopReason.TIME_LIMIT
                break
            ev = heapq.heappop(heap)[2]
            self._now_ns = ev.fire_time.ns
            executed += 1
            target = ev.target
            if sinks:
                msg = ev.payload
                rec = EventRecord(executed, self._now_ns, target.full_path,
                                  target.type_name, target.module_id,
                                  msg.name, msg.kind_label, msg.msg_id)
                for sink in sinks:
                    sink.record(rec)
            try:
                target.handle_message(ev.payload, ev.arrival_gate)
            except Exception as exc:
                raise HandlerError(target.full_path, executed, exc) from exc
        wall = _wallclock.perf_counter() - t_start
        return RunSummary(events_executed=executed, final_time=self.now,
                          stop_reason=reason, wall_clock_seconds=wall,
                          seed=self.seed)
