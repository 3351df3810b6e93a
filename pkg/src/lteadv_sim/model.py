"""Composition model.

Named modules with directional gates, compound modules, wired channels
with delay, and direct delivery for the over-the-air hop. Wiring is fixed
before the event loop starts; the connection graph never changes mid-run.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Optional

from .kernel import ScheduledEvent, SimMessage, SimTime, SimulationError


class GateAlreadyConnected(SimulationError):
    pass


class DirectionMismatch(SimulationError):
    pass


class UnknownGate(SimulationError):
    pass


class UnconnectedGate(SimulationError):
    pass


class UnknownTargetGate(SimulationError):
    pass


class DetachedModule(SimulationError):
    pass


class DuplicateName(SimulationError):
    pass


class WiringLocked(SimulationError):
    pass


class UnknownArrivalGate(SimulationError):
    pass


class Direction(enum.Enum):
    IN = "in"
    OUT = "out"


# The four layer gate names are a fixed compatibility surface, plus the
# unwired air-interface input on radio modules.
IN_FROM_UPPER = "inFromUpperLayer"
OUT_TO_LOWER = "outToLowerLayer"
IN_FROM_LOWER = "inFromLowerLayer"
OUT_TO_UPPER = "outToUpperLayer"
RADIO_IN = "radioIn"


@dataclass(frozen=True, slots=True)
class ChannelSpec:
    """Delay carried by one one-way connection; a bidirectional channel is
    a pair of these with equal delay."""

    delay: SimTime = SimTime(0)


class Gate:
    """One directional endpoint on a module, optionally vector-indexed."""

    __slots__ = ("owner", "name", "index", "direction", "peer", "delay", "label")

    def __init__(self, owner: "ModuleNode", name: str, direction: Direction,
                 index: Optional[int] = None):
        self.owner = owner
        self.name = name
        self.index = index
        self.direction = direction
        self.peer: Optional[Gate] = None
        self.delay: Optional[SimTime] = None  # set on the Out side at connect time
        self.label = name if index is None else f"{name}[{index}]"

    def __repr__(self) -> str:
        owner = getattr(self.owner, "name", "?")
        return f"Gate({owner}.{self.label}, {self.direction.value})"


def gate_base(label: str) -> str:
    """Strip a vector index from a gate label: "inFromLowerLayer[2]" -> base."""
    cut = label.find("[")
    return label if cut < 0 else label[:cut]


def gate_index(label: str) -> Optional[int]:
    """Vector index of a gate label, or None for a scalar gate."""
    cut = label.find("[")
    if cut < 0:
        return None
    return int(label[cut + 1:-1])


class ModuleNode:
    """A node in the module tree; see SimpleModule and CompoundModule."""

    def __init__(self, name: str, type_name: Optional[str] = None):
        self.name = name
        self.type_name = type_name if type_name is not None else name
        self.parent: Optional[ModuleNode] = None
        self.module_id: Optional[int] = None
        self._gates: dict[str, Gate] = {}
        self._vector_next: dict[str, int] = {}
        self._locked = False
        self._path: Optional[str] = None
        self._sim = None

    # -- gates ---------------------------------------------------------

    def add_gate(self, name: str, direction: Direction,
                 index: Optional[int] = None) -> Gate:
        if self._locked:
            raise WiringLocked(f"{self.name}: cannot add gates after run() started")
        g = Gate(self, name, direction, index)
        if g.label in self._gates:
            raise DuplicateName(f"{self.name} already has a gate {g.label!r}")
        self._gates[g.label] = g
        return g

    def add_vector_gate(self, name: str, direction: Direction) -> Gate:
        """Append one gate to the named vector and return it."""
        idx = self._vector_next.get(name, 0)
        self._vector_next[name] = idx + 1
        return self.add_gate(name, direction, index=idx)

    def gate(self, name: str, index: Optional[int] = None) -> Gate:
        label = name if index is None else f"{name}[{index}]"
        try:
            return self._gates[label]
        except KeyError:
            raise UnknownGate(f"{self.full_path_or_name()} has no gate {label!r}") from None

    def has_gate(self, name: str, index: Optional[int] = None) -> bool:
        label = name if index is None else f"{name}[{index}]"
        return label in self._gates

    @property
    def gates(self) -> tuple[Gate, ...]:
        return tuple(self._gates.values())

    # -- tree ----------------------------------------------------------

    def iter_tree(self) -> Iterator["ModuleNode"]:
        yield self

    @property
    def full_path(self) -> str:
        """Dot-joined names from the network root down to this module."""
        if self._path is not None:
            return self._path
        chain = []
        node: Optional[ModuleNode] = self
        while node is not None:
            chain.append(node.name)
            top, node = node, node.parent
        if not isinstance(top, CompoundModule):
            raise DetachedModule(f"module {self.name!r} is not attached to a network")
        return ".".join(reversed(chain))

    def full_path_or_name(self) -> str:
        try:
            return self.full_path
        except DetachedModule:
            return self.name

    def assign_ids(self) -> dict[str, int]:
        """Number this subtree depth-first pre-order starting at 1.

        Pure function of tree shape and names: the same tree always gets
        the same ids. Returns the path -> id map.
        """
        ids: dict[str, int] = {}
        next_id = 1
        for node in self.iter_tree():
            node.module_id = next_id
            ids[node.full_path] = next_id
            next_id += 1
        return ids

    def lock_wiring(self) -> None:
        for node in self.iter_tree():
            node._locked = True
            node._path = node.full_path

    # -- simulation hooks ------------------------------------------------

    def bind_simulator(self, sim) -> None:
        self._sim = sim

    @property
    def sim(self):
        if self._sim is None:
            raise SimulationError(f"{self.name}: module is not bound to a simulator")
        return self._sim

    def on_start(self, sim) -> None:
        """Called once, in tree order, before the first event dispatches."""

    def handle_message(self, msg: SimMessage, arrival_gate: str) -> None:
        raise SimulationError(f"{self.full_path_or_name()} does not handle messages")


class SimpleModule(ModuleNode):
    """Leaf module with behavior; subclasses implement handle_message."""

    def handle_message(self, msg: SimMessage, arrival_gate: str) -> None:
        raise NotImplementedError

    # convenience wrappers so handlers read like the operations they perform

    def send(self, msg: SimMessage, out_gate: str, index: Optional[int] = None,
             at: Optional[SimTime] = None) -> ScheduledEvent:
        return send(self, msg, out_gate, index=index, now=at)

    def send_direct(self, msg: SimMessage, target: ModuleNode, in_gate: str,
                    delay: SimTime = SimTime(0),
                    at: Optional[SimTime] = None) -> ScheduledEvent:
        return send_direct(self, msg, target, in_gate, delay, now=at)

    def schedule_self(self, msg: SimMessage, fire_at: SimTime) -> ScheduledEvent:
        """Schedule a self-event; it arrives on the pseudo-gate "self"."""
        return self.sim.schedule_arrival(self, SELF_GATE, msg, fire_at)


SELF_GATE = "self"


class CompoundModule(ModuleNode):
    """Module containing an ordered list of children; no behavior of its own."""

    def __init__(self, name: str, type_name: Optional[str] = None):
        super().__init__(name, type_name)
        self.children: list[ModuleNode] = []
        self._by_name: dict[str, ModuleNode] = {}

    def add_child(self, child: ModuleNode) -> ModuleNode:
        if self._locked:
            raise WiringLocked(f"{self.name}: cannot add children after run() started")
        if child.name in self._by_name:
            raise DuplicateName(
                f"{self.full_path_or_name()} already has a child named {child.name!r}")
        child.parent = self
        self.children.append(child)
        self._by_name[child.name] = child
        return child

    def child(self, name: str) -> ModuleNode:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownGate(
                f"{self.full_path_or_name()} has no child named {name!r}") from None

    def iter_tree(self) -> Iterator[ModuleNode]:
        yield self
        for c in self.children:
            yield from c.iter_tree()


def connect(out_gate: Gate, in_gate: Gate,
            channel: ChannelSpec = ChannelSpec()) -> None:
    """Wire an Out gate to an In gate through a delay-bearing channel."""
    if out_gate.owner._locked or in_gate.owner._locked:
        raise WiringLocked("cannot connect gates after run() started")
    if out_gate.direction is not Direction.OUT or in_gate.direction is not Direction.IN:
        raise DirectionMismatch(
            f"connect needs Out -> In, got {out_gate!r} -> {in_gate!r}")
    if out_gate.peer is not None:
        raise GateAlreadyConnected(f"{out_gate!r} is already connected")
    if in_gate.peer is not None:
        raise GateAlreadyConnected(f"{in_gate!r} is already connected")
    out_gate.peer = in_gate
    in_gate.peer = out_gate
    out_gate.delay = channel.delay


def connect_pair(a_out: Gate, b_in: Gate, b_out: Gate, a_in: Gate,
                 channel: ChannelSpec = ChannelSpec()) -> None:
    """Two-way channel: a pair of opposed one-way connections, equal delay."""
    connect(a_out, b_in, channel)
    connect(b_out, a_in, channel)


def send(from_module: ModuleNode, msg: SimMessage, out_gate_name: str,
         index: Optional[int] = None, now: Optional[SimTime] = None) -> ScheduledEvent:
    """Send out a named gate; the peer sees the message after the channel delay."""
    sim = from_module._sim
    if sim is None:
        raise SimulationError(
            f"{from_module.name}: module is not bound to a simulator")
    label = out_gate_name if index is None else f"{out_gate_name}[{index}]"
    g = from_module._gates.get(label)
    if g is None or g.direction is not Direction.OUT:
        raise UnknownGate(
            f"{from_module.full_path_or_name()} has no Out gate {label!r}")
    peer = g.peer
    if peer is None:
        raise UnconnectedGate(
            f"{from_module.full_path_or_name()}.{label} is not connected")
    fire_ns = (sim._now_ns if now is None else now.ns) + g.delay.ns
    return sim._schedule_ns(peer.owner, peer.label, msg, fire_ns)


def send_direct(from_module: ModuleNode, msg: SimMessage, target: ModuleNode,
                in_gate_name: str, delay: SimTime = SimTime(0),
                now: Optional[SimTime] = None) -> ScheduledEvent:
    """Deliver straight to a target module's In gate, no wiring required."""
    sim = from_module.sim
    g = target._gates.get(in_gate_name)
    if g is None or g.direction is not Direction.IN:
        raise UnknownTargetGate(
            f"{target.full_path_or_name()} has no In gate {in_gate_name!r}")
    fire_ns = (sim._now_ns if now is None else now.ns) + delay.ns
    return sim._schedule_ns(target, g.label, msg, fire_ns)


def assign_ids(root: ModuleNode) -> dict[str, int]:
    return root.assign_ids()
