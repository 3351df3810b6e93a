"""Periodic traffic generator.

The generator sits above the UE's top stack layer. It emits one message,
waits for it to come back up the stack, discards it, and schedules the
next emission one period later. Round trips therefore never overlap: the
k+1-th emission is gated on the return of the k-th.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .kernel import MessageKind, SimTime
from .model import (IN_FROM_LOWER, OUT_TO_LOWER, SELF_GATE, SimpleModule,
                    UnknownArrivalGate, gate_base)

DEFAULT_PERIOD = SimTime.from_millis(10)

# Self-event payload name; shows up in traces as an event at the generator.
TIMER_NAME = "GenTimer"


@dataclass(frozen=True, slots=True)
class GeneratorConfig:
    period: SimTime = DEFAULT_PERIOD
    start_time: SimTime = SimTime(0)
    payload_kind: MessageKind = MessageKind.CONTROL_MESSAGE
    payload_bytes: int = 0

    def __post_init__(self) -> None:
        if self.period.ns <= 0:
            raise ValueError("generator period must be positive")
        if self.payload_kind is MessageKind.CONTROL_MESSAGE and self.payload_bytes:
            raise ValueError("control-message payload carries no bytes")
        if self.payload_bytes < 0:
            raise ValueError("payload bytes must be non-negative")


@dataclass(slots=True)
class GeneratorStats:
    emitted: int = 0
    returned: int = 0
    discarded: int = 0


class Generator(SimpleModule):
    """Emits into the stack below; discards returns and re-arms a timer.

    A generator built without a config is inert: it never emits, but still
    counts and discards anything delivered to it.
    """

    def __init__(self, name: str = "generator",
                 config: Optional[GeneratorConfig] = None):
        super().__init__(name, type_name="generator")
        self.config = config
        self.stats = GeneratorStats()
        self.dest_tag: Optional[str] = None  # tag of the stack layer below, set at wiring

    @property
    def enabled(self) -> bool:
        return self.config is not None

    def on_start(self, sim) -> None:
        if self.enabled:
            self.emit(at=self.config.start_time)

    def emit(self, at: Optional[SimTime] = None) -> None:
        """Create a fresh message and send it down into the stack."""
        cfg = self.config
        now = self.sim.now if at is None else at
        name = self.dest_tag + cfg.payload_kind.name_suffix
        msg = self.sim.new_message(name, cfg.payload_kind, cfg.payload_bytes, at=now)
        self.send(msg, OUT_TO_LOWER, at=now)
        self.stats.emitted += 1

    def handle_message(self, msg, arrival_gate: str) -> None:
        if arrival_gate == SELF_GATE:
            self.emit()
            return
        if gate_base(arrival_gate) == IN_FROM_LOWER:
            # The round trip ends here: drop the message, arm the next one.
            self.stats.returned += 1
            self.stats.discarded += 1
            if self.enabled:
                timer = self.sim.new_message(TIMER_NAME, MessageKind.CONTROL_MESSAGE)
                self.schedule_self(timer, self.sim.now + self.config.period)
            return
        raise UnknownArrivalGate(
            f"{self.full_path_or_name()}: unexpected arrival on {arrival_gate!r}")
