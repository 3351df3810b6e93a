"""Event observation and analysis.

Three pieces:

* log-line formatting: the classic simulator console format,
  ``** Event #1 T=0 Network.ue.lte_nas (lte_nas, id=4), on `NASMsg' (cMessage, id=1)``,
  rendered from exact integer nanoseconds so timestamps never pick up
  floating-point noise;
* a structured trace: one self-delimiting JSON record per line with a
  fixed field order, byte-identical across runs and parseable back into
  equal EventRecords;
* post-run metrics driven by a chain-walk oracle that predicts, from the
  NetworkSpec alone, the exact module path and message name sequence of
  every round trip. The oracle deliberately re-declares the default layer
  tables instead of importing the builder's, so a slip on either side
  surfaces as a mismatch instead of agreeing silently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

from .kernel import EventRecord, MessageKind, RunSummary, SimTime, SimulationError
from .lte_nodes import NodeType
from .netconfig import NetworkSpec, resolve_selector
from .traffic import GeneratorConfig


class MalformedTrace(SimulationError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


# --------------------------------------------------------------------------
# paper-style console format

def format_event_line(rec: EventRecord) -> str:
    """Render one event in the console log format.

    The time prints as decimal seconds with no trailing zeros and no
    exponent; the message name sits between a backtick and an apostrophe.
    """
    t = SimTime(rec.t_ns).seconds_str()
    return (f"** Event #{rec.event_no} T={t} {rec.path} "
            f"({rec.type_name}, id={rec.module_id}), "
            f"on `{rec.msg_name}' ({rec.msg_kind}, id={rec.msg_id})")


# --------------------------------------------------------------------------
# structured format

_STRUCTURED_FIELDS = ("event_no", "t_ns", "path", "type", "module_id",
                      "msg_name", "msg_kind", "msg_id")


def structured_line(rec: EventRecord) -> str:
    """One JSON record with fixed field order; output is byte-deterministic."""
    payload = {
        "event_no": rec.event_no,
        "t_ns": rec.t_ns,
        "path": rec.path,
        "type": rec.type_name,
        "module_id": rec.module_id,
        "msg_name": rec.msg_name,
        "msg_kind": rec.msg_kind,
        "msg_id": rec.msg_id,
    }
    return json.dumps(payload, separators=(", ", ": "))


def parse_structured_line(line: str, line_no: int = 1) -> EventRecord:
    try:
        obj = json.loads(line)
    except ValueError as exc:
        raise MalformedTrace(line_no, f"not a JSON record ({exc})") from None
    if not isinstance(obj, dict):
        raise MalformedTrace(line_no, "record is not an object")
    try:
        return EventRecord(
            event_no=int(obj["event_no"]), t_ns=int(obj["t_ns"]),
            path=str(obj["path"]), type_name=str(obj["type"]),
            module_id=int(obj["module_id"]), msg_name=str(obj["msg_name"]),
            msg_kind=str(obj["msg_kind"]), msg_id=int(obj["msg_id"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedTrace(line_no, f"bad or missing field ({exc})") from None


def read_structured(lines: Iterable[str]) -> list[EventRecord]:
    records = []
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if line:
            records.append(parse_structured_line(line, line_no))
    return records


def write_structured(records: Iterable[EventRecord], stream: TextIO) -> None:
    for rec in records:
        stream.write(structured_line(rec) + "\n")


# --------------------------------------------------------------------------
# sinks

class PaperTraceSink:
    """Writes the console log format, one LF-terminated line per event."""

    def __init__(self, stream: TextIO):
        self.stream = stream

    def record(self, rec: EventRecord) -> None:
        self.stream.write(format_event_line(rec) + "\n")


class StructuredTraceSink:
    def __init__(self, stream: TextIO):
        self.stream = stream

    def record(self, rec: EventRecord) -> None:
        self.stream.write(structured_line(rec) + "\n")


class CollectingSink:
    """Keeps EventRecords in memory, mostly for tests and metrics."""

    def __init__(self):
        self.records: list[EventRecord] = []

    def record(self, rec: EventRecord) -> None:
        self.records.append(rec)


# --------------------------------------------------------------------------
# chain-walk oracle

# Independent copies of the default stacks (top to bottom as (tag, module)),
# on purpose: see the module docstring.
_ORACLE_CHAINS = {
    NodeType.UE: (("NAS", "lte_nas"), ("RRC", "lte_rrc"), ("PDCP", "lte_pdcp"),
                  ("RLC", "lte_rlc"), ("MAC", "lte_mac"), ("PHY", "lte_phy")),
    NodeType.ENB: (("GTP", "lte_gtp"), ("RRC", "lte_rrc"), ("PDCP", "lte_pdcp"),
                   ("RLC", "lte_rlc"), ("MAC", "lte_mac"), ("PHY", "lte_phy")),
    NodeType.SGW_MME: (("S5", "lte_s5"), ("GTP", "lte_gtp"), ("S1", "lte_s1")),
    NodeType.PDN_GW: (("IP", "lte_ip"), ("GTP", "lte_gtp"), ("S5", "lte_s5")),
}
_SUFFIX = {MessageKind.CONTROL_MESSAGE: "Msg", MessageKind.PACKET: "Pck"}
_RADIO_MODULE = "lte_radio"
_GENERATOR_MODULE = "generator"
_GENERATOR_TAG = "Gen"
_TIMER_NAME = "GenTimer"


def _oracle_chain(spec: NetworkSpec, kind: NodeType) -> tuple:
    override = spec.chain_overrides.get(kind)
    if override is None:
        return _ORACLE_CHAINS[kind]
    return tuple((layer.tag, layer.module_name) for layer in override)


def ue_instances(spec: NetworkSpec) -> list[str]:
    out = []
    for decl in spec.node_decls:
        if decl.kind is NodeType.UE:
            out.extend(decl.instances())
    return out


def generator_on(spec: NetworkSpec, ue_instance: str) -> Optional[GeneratorConfig]:
    for gen in spec.generators:
        instances = resolve_selector(spec, gen.target, NodeType.UE) or []
        if ue_instance in instances:
            return gen.config
    return None


def attached_enb(spec: NetworkSpec, ue_instance: str) -> Optional[str]:
    for att in spec.attachments:
        ues = resolve_selector(spec, att.ue, NodeType.UE) or []
        if ue_instance in ues:
            enbs = resolve_selector(spec, att.enb, NodeType.ENB) or []
            if len(enbs) == 1:
                return enbs[0]
    return None


def _single_instance(spec: NetworkSpec, kind: NodeType) -> str:
    for decl in spec.node_decls:
        if decl.kind is kind:
            return decl.instances()[0]
    raise ValueError(f"spec has no {kind.value} declaration")


def data_walk(spec: NetworkSpec, ue_instance: str) -> list[tuple[str, str]]:
    """Expected (module path, message name) sequence of one round trip.

    Derived from the NetworkSpec alone: up the UE stack top to bottom,
    across the air into the eNB, up through the S-GW/MME into the PDN-GW,
    around the reflector, and back down the exact reverse, ending at the
    generator when the UE has one.
    """
    root = spec.network_name
    cfg = generator_on(spec, ue_instance)
    sfx = _SUFFIX[cfg.payload_kind] if cfg is not None else _SUFFIX[MessageKind.CONTROL_MESSAGE]
    enb_instance = attached_enb(spec, ue_instance)
    if enb_instance is None:
        raise ValueError(f"{ue_instance!r} is not attached to an enb")
    sgw = _single_instance(spec, NodeType.SGW_MME)
    pdn = _single_instance(spec, NodeType.PDN_GW)
    ue_chain = _oracle_chain(spec, NodeType.UE)
    enb_chain = _oracle_chain(spec, NodeType.ENB)
    sgw_chain = _oracle_chain(spec, NodeType.SGW_MME)
    pdn_chain = _oracle_chain(spec, NodeType.PDN_GW)

    walk: list[tuple[str, str]] = []

    def hop(node: str, module: str, tag: str) -> None:
        walk.append((f"{root}.{node}.{module}", tag + sfx))

    # uplink: down the UE stack, each layer entered under its own tag
    for tag, module in ue_chain:
        hop(ue_instance, module, tag)
    # air hop: the eNB radio forwards unrenamed, so radio and PHY both see
    # the name stamped for the eNB's PHY
    enb_phy_tag, enb_phy_module = enb_chain[-1]
    hop(enb_instance, _RADIO_MODULE, enb_phy_tag)
    hop(enb_instance, enb_phy_module, enb_phy_tag)
    for tag, module in reversed(enb_chain[:-1]):
        hop(enb_instance, module, tag)
    for tag, module in reversed(sgw_chain):
        hop(sgw, module, tag)
    for tag, module in reversed(pdn_chain):
        hop(pdn, module, tag)
    # reflected at the PDN-GW top, back down in the same event
    for tag, module in pdn_chain[1:]:
        hop(pdn, module, tag)
    for tag, module in sgw_chain:
        hop(sgw, module, tag)
    for tag, module in enb_chain:
        hop(enb_instance, module, tag)
    ue_phy_tag, ue_phy_module = ue_chain[-1]
    hop(ue_instance, _RADIO_MODULE, ue_phy_tag)
    hop(ue_instance, ue_phy_module, ue_phy_tag)
    for tag, module in reversed(ue_chain[:-1]):
        hop(ue_instance, module, tag)
    if cfg is not None:
        hop(ue_instance, _GENERATOR_MODULE, _GENERATOR_TAG)
    return walk


def timer_hop(spec: NetworkSpec, ue_instance: str) -> tuple[str, str]:
    """The single-event path of a generator's re-arm timer."""
    return (f"{spec.network_name}.{ue_instance}.{_GENERATOR_MODULE}", _TIMER_NAME)


def zero_delay_emissions(until: SimTime, period: SimTime,
                         start: SimTime = SimTime(0)) -> int:
    """Emissions of one generator in an exclusive-[0, until) zero-delay run."""
    if until.ns <= start.ns:
        return 0
    return (until.ns - 1 - start.ns) // period.ns + 1


def expected_event_total(spec: NetworkSpec) -> int:
    """Total events of a full zero-delay run of the spec.

    Per generator: one walk per round trip plus one timer event between
    consecutive trips (the first trip is primed at start, not timed in).
    Exact only when every channel delay is zero, which is how the default
    fixtures are wired.
    """
    if spec.until is None:
        raise ValueError("spec has no run-until time")
    total = 0
    for ue in ue_instances(spec):
        cfg = generator_on(spec, ue)
        if cfg is None:
            continue
        trips = zero_delay_emissions(spec.until, cfg.period, cfg.start_time)
        if trips:
            total += trips * len(data_walk(spec, ue)) + (trips - 1)
    return total


# --------------------------------------------------------------------------
# metrics

@dataclass
class Metrics:
    total_events: int = 0
    round_trips: int = 0
    per_message_hops: dict = field(default_factory=dict)   # msg_id -> event count
    per_message_rtt: dict = field(default_factory=dict)    # msg_id -> SimTime
    drops: dict = field(default_factory=dict)              # module path -> count
    events_per_wall_second: Optional[float] = None
    path_mismatches: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "total_events": self.total_events,
            "round_trips": self.round_trips,
            "per_message_hops": {str(k): v for k, v in self.per_message_hops.items()},
            "per_message_rtt_ns": {str(k): v.ns for k, v in self.per_message_rtt.items()},
            "drops": dict(self.drops),
            "events_per_wall_second": self.events_per_wall_second,
            "path_mismatches": list(self.path_mismatches),
        }


def summarize(records: Sequence[EventRecord], spec: NetworkSpec,
              run_summary: Optional[RunSummary] = None) -> Metrics:
    """Reduce a trace to metrics and check every message against the oracle.

    Each message's visited (path, name) sequence must be the full oracle
    walk (a completed round trip), a prefix of it (in flight when the run
    stopped), or a generator re-arm timer. A walk that runs to completion
    on a UE with no generator ends at the top of the stack and counts as a
    drop there. Anything else is reported in path_mismatches.
    """
    metrics = Metrics(total_events=len(records))

    by_msg: dict[int, list[EventRecord]] = {}
    for rec in records:
        by_msg.setdefault(rec.msg_id, []).append(rec)

    walks: dict[str, list[tuple[str, str]]] = {}
    first_hop_to_ue: dict[tuple[str, str], str] = {}
    timer_hops: dict[tuple[str, str], str] = {}
    for ue in ue_instances(spec):
        try:
            walk = data_walk(spec, ue)
        except ValueError:
            continue
        walks[ue] = walk
        first_hop_to_ue[walk[0]] = ue
        timer_hops[timer_hop(spec, ue)] = ue

    for msg_id, recs in by_msg.items():
        seq = [(r.path, r.msg_name) for r in recs]
        metrics.per_message_hops[msg_id] = len(seq)
        if len(seq) == 1 and seq[0] in timer_hops:
            continue
        ue = first_hop_to_ue.get(seq[0])
        if ue is None:
            metrics.path_mismatches.append(
                f"msg {msg_id}: unexpected first hop {seq[0]!r}")
            continue
        walk = walks[ue]
        if seq == walk:
            if generator_on(spec, ue) is not None:
                metrics.round_trips += 1
                metrics.per_message_rtt[msg_id] = SimTime(recs[-1].t_ns - recs[0].t_ns)
            else:
                top_path = walk[-1][0]
                metrics.drops[top_path] = metrics.drops.get(top_path, 0) + 1
        elif seq == walk[:len(seq)]:
            pass  # in flight when the run stopped
        else:
            for i, (got, want) in enumerate(zip(seq, walk)):
                if got != want:
                    metrics.path_mismatches.append(
                        f"msg {msg_id}: hop {i} is {got!r}, expected {want!r}")
                    break
            else:
                metrics.path_mismatches.append(
                    f"msg {msg_id}: {len(seq)} hops, expected {len(walk)}")

    if run_summary is not None and run_summary.wall_clock_seconds > 0:
        metrics.events_per_wall_second = (
            metrics.total_events / run_summary.wall_clock_seconds)
    return metrics
