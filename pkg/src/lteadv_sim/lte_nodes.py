"""LTE-Advanced node skeletons.

Four node types (UE, eNB, S-GW/MME, PDN-GW) built from pass-through layer
modules that relay messages up or down and relabel them with the tag of
the layer they are headed to: a control message entering lte_rrc is named
"RRCMsg", a packet handed to lte_mac is "MACPck". Layers add no delay of
their own.

The bottom of the UE and eNB stacks is a PHY that crosses the air gap with
a direct delivery to the peer node's radio interface; the top of the
PDN-GW turns messages around and sends them back the way they came.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .kernel import MessageKind, SimMessage, SimTime, SimulationError
from .model import (IN_FROM_LOWER, IN_FROM_UPPER, OUT_TO_LOWER, OUT_TO_UPPER,
                    RADIO_IN, ChannelSpec, CompoundModule, Direction,
                    ModuleNode, SimpleModule, UnknownArrivalGate, connect,
                    gate_base, gate_index)
from .traffic import Generator, GeneratorConfig


class NoRadioPeer(SimulationError):
    pass


class NodeType(enum.Enum):
    UE = "ue"
    ENB = "enb"
    SGW_MME = "sgw_mme"
    PDN_GW = "pdn_gw"


@dataclass(frozen=True, slots=True)
class LayerSpec:
    """One stack layer: relabel tag plus the module name it instantiates."""

    tag: str
    module_name: str
    upper_neighbor_tag: Optional[str] = None
    lower_neighbor_tag: Optional[str] = None


@dataclass(frozen=True)
class NodeBlueprint:
    node_type: NodeType
    layer_chain: tuple[LayerSpec, ...]
    radio_peer: Optional[str] = None


# Default stacks, top to bottom. The UE's six layers follow the standard
# protocol stack; the core-side chains are minimal linear stands-ins whose
# endpoints carry the cross-node wiring.
UE_STACK = (
    LayerSpec("NAS", "lte_nas"),
    LayerSpec("RRC", "lte_rrc"),
    LayerSpec("PDCP", "lte_pdcp"),
    LayerSpec("RLC", "lte_rlc"),
    LayerSpec("MAC", "lte_mac"),
    LayerSpec("PHY", "lte_phy"),
)
ENB_STACK = (
    LayerSpec("GTP", "lte_gtp"),
    LayerSpec("RRC", "lte_rrc"),
    LayerSpec("PDCP", "lte_pdcp"),
    LayerSpec("RLC", "lte_rlc"),
    LayerSpec("MAC", "lte_mac"),
    LayerSpec("PHY", "lte_phy"),
)
SGW_MME_STACK = (
    LayerSpec("S5", "lte_s5"),
    LayerSpec("GTP", "lte_gtp"),
    LayerSpec("S1", "lte_s1"),
)
PDN_GW_STACK = (
    LayerSpec("IP", "lte_ip"),
    LayerSpec("GTP", "lte_gtp"),
    LayerSpec("S5", "lte_s5"),
)

GENERATOR_TAG = "Gen"


def relabel(msg: SimMessage, destination_tag: str) -> SimMessage:
    """Rename a message for the layer it is being sent to; id is untouched."""
    if not destination_tag:
        raise ValueError("destination tag must be nonempty")
    msg.name = destination_tag + msg.kind.name_suffix
    return msg


def _tag_names(tag: str) -> dict[MessageKind, str]:
    return {kind: tag + kind.name_suffix for kind in MessageKind}


class PassThroughLayer(SimpleModule):
    """Relays messages between its upper and lower neighbors.

    Arrival on inFromUpperLayer forwards down; arrival on inFromLowerLayer
    forwards up. Either way the message is relabeled with the destination
    layer's tag before it leaves. A layer whose lower side fans in over a
    gate vector (the S-GW's S1) remembers the ingress index on the message
    itself so the reply can leave through the same gate.
    """

    def __init__(self, name: str, tag: str, lower_is_vector: bool = False):
        super().__init__(name, type_name=name)
        self.tag = tag
        self.lower_is_vector = lower_is_vector
        self._up_names: Optional[dict] = None
        self._down_names: Optional[dict] = None

    def set_upper_tag(self, tag: str) -> None:
        self._up_names = _tag_names(tag)

    def set_lower_tag(self, tag: str) -> None:
        self._down_names = _tag_names(tag)

    def handle_message(self, msg: SimMessage, arrival_gate: str) -> None:
        # exact matches first; only vectored gates carry an [index] suffix
        if arrival_gate == IN_FROM_UPPER:
            self.forward_down(msg)
        elif arrival_gate == IN_FROM_LOWER or arrival_gate.startswith(IN_FROM_LOWER):
            self.forward_up(msg, arrival_gate)
        elif arrival_gate.startswith(IN_FROM_UPPER):
            self.forward_down(msg)
        else:
            raise UnknownArrivalGate(
                f"{self.full_path_or_name()}: unexpected arrival on {arrival_gate!r}")

    def forward_down(self, msg: SimMessage) -> None:
        msg.name = self._down_names[msg.kind]
        if self.lower_is_vector:
            idx = msg.pop_route()
            if not isinstance(idx, int):
                raise NoRadioPeer(
                    f"{self.full_path_or_name()}: no return route on {msg!r}")
            self.send(msg, OUT_TO_LOWER, index=idx)
        else:
            self.send(msg, OUT_TO_LOWER)

    def forward_up(self, msg: SimMessage, arrival_gate: str) -> None:
        if self.lower_is_vector:
            msg.push_route(gate_index(arrival_gate))
        msg.name = self._up_names[msg.kind]
        self.send(msg, OUT_TO_UPPER)


class NasLayer(PassThroughLayer):
    """Top of the UE stack.

    Downward traffic (from the generator) passes through normally. Upward
    traffic is handed to the generator when one is wired above, otherwise
    it is dropped and counted; nothing above the NAS consumes it.
    """

    def __init__(self, name: str, tag: str):
        super().__init__(name, tag)
        self.drop_count = 0

    def forward_up(self, msg: SimMessage, arrival_gate: str) -> None:
        if self.has_gate(OUT_TO_UPPER) and self.gate(OUT_TO_UPPER).peer is not None:
            msg.name = self._up_names[msg.kind]
            self.send(msg, OUT_TO_UPPER)
        else:
            self.drop_count += 1


class PhyLayer(PassThroughLayer):
    """Bottom of a radio-capable stack; downward traffic crosses the air.

    A UE's PHY has a statically attached peer (its eNB): it stamps its own
    radio onto the message as the return address and delivers direct to
    the peer's radio input. An eNB's PHY has no static peer; it pops the
    return address the originating UE stamped on the way up.
    """

    def __init__(self, name: str, tag: str):
        super().__init__(name, tag)
        self.peer_radio: Optional[ModuleNode] = None
        self.home_radio: Optional[ModuleNode] = None
        self.air_delay = SimTime(0)

    def forward_down(self, msg: SimMessage) -> None:
        if self.peer_radio is not None:
            target = self.peer_radio
            msg.push_route(self.home_radio)
        else:
            target = msg.pop_route()
            if not isinstance(target, RadioInterface):
                raise NoRadioPeer(
                    f"{self.full_path_or_name()}: no radio peer for downward send")
        relabel(msg, target.parent.phy.tag)
        self.send_direct(msg, target, RADIO_IN, delay=self.air_delay)


class RadioInterface(SimpleModule):
    """Receives direct air deliveries and hands them to the PHY, unrenamed."""

    def __init__(self, name: str = "lte_radio"):
        super().__init__(name, type_name=name)

    def handle_message(self, msg: SimMessage, arrival_gate: str) -> None:
        if gate_base(arrival_gate) != RADIO_IN:
            raise UnknownArrivalGate(
                f"{self.full_path_or_name()}: unexpected arrival on {arrival_gate!r}")
        self.send(msg, OUT_TO_UPPER)


class ReflectorLayer(PassThroughLayer):
    """Top of the PDN-GW: turns traffic around in the same event."""

    def handle_message(self, msg: SimMessage, arrival_gate: str) -> None:
        if gate_base(arrival_gate) != IN_FROM_LOWER:
            raise UnknownArrivalGate(
                f"{self.full_path_or_name()}: unexpected arrival on {arrival_gate!r}")
        self.forward_down(msg)


def wire_vertical(upper: ModuleNode, lower: ModuleNode,
                  channel: ChannelSpec = ChannelSpec(),
                  vector_on_upper: bool = False) -> None:
    """Join two stack neighbors with an opposed pair of one-way channels."""
    if vector_on_upper:
        u_out = upper.add_vector_gate(OUT_TO_LOWER, Direction.OUT)
        u_in = upper.add_vector_gate(IN_FROM_LOWER, Direction.IN)
    else:
        u_out = upper.add_gate(OUT_TO_LOWER, Direction.OUT)
        u_in = upper.add_gate(IN_FROM_LOWER, Direction.IN)
    l_in = lower.add_gate(IN_FROM_UPPER, Direction.IN)
    l_out = lower.add_gate(OUT_TO_UPPER, Direction.OUT)
    connect(u_out, l_in, channel)
    connect(l_out, u_in, channel)
    if isinstance(upper, PassThroughLayer) and isinstance(lower, PassThroughLayer):
        upper.set_lower_tag(lower.tag)
        lower.set_upper_tag(upper.tag)


def _build_stack(chain: Sequence[LayerSpec], top_cls, bottom_cls) -> list:
    layers = []
    last = len(chain) - 1
    for i, spec in enumerate(chain):
        cls = top_cls if i == 0 else bottom_cls if i == last else PassThroughLayer
        layers.append(cls(spec.module_name, spec.tag))
    return layers


def build_ue(name: str, attached_enb: Optional[CompoundModule] = None,
             generator_config: Optional[GeneratorConfig] = None,
             with_generator: bool = True,
             stack: Optional[Sequence[LayerSpec]] = None) -> CompoundModule:
    """UE compound: generator, six-layer stack, radio interface."""
    chain = tuple(stack) if stack is not None else UE_STACK
    if len(chain) < 2:
        raise ValueError("a ue stack needs at least a top layer and a PHY")
    node = CompoundModule(name, type_name="ue")
    node.kind = NodeType.UE
    layers = _build_stack(chain, NasLayer, PhyLayer)
    generator = Generator("generator", config=generator_config) if with_generator else None
    if generator is not None:
        node.add_child(generator)
    for layer in layers:
        node.add_child(layer)
    radio = RadioInterface()
    node.add_child(radio)

    if generator is not None:
        generator.add_gate(OUT_TO_LOWER, Direction.OUT)
        generator.add_gate(IN_FROM_LOWER, Direction.IN)
        top = layers[0]
        connect(generator.gate(OUT_TO_LOWER),
                top.add_gate(IN_FROM_UPPER, Direction.IN))
        connect(top.add_gate(OUT_TO_UPPER, Direction.OUT),
                generator.gate(IN_FROM_LOWER))
        generator.dest_tag = top.tag
        top.set_upper_tag(GENERATOR_TAG)
    for upper, lower in zip(layers, layers[1:]):
        wire_vertical(upper, lower)
    phy = layers[-1]
    connect(radio.add_gate(OUT_TO_UPPER, Direction.OUT),
            phy.add_gate(IN_FROM_LOWER, Direction.IN))
    phy.set_upper_tag(layers[-2].tag if len(layers) > 1 else GENERATOR_TAG)
    radio.add_gate(RADIO_IN, Direction.IN)
    phy.home_radio = radio

    node.phy = phy
    node.radio = radio
    node.stack = layers
    node.generator = generator
    if attached_enb is not None:
        attach_ue(node, attached_enb)
    return node


def build_enb(name: str,
              stack: Optional[Sequence[LayerSpec]] = None) -> CompoundModule:
    """eNB compound: radio interface plus a stack from PHY up to GTP."""
    chain = tuple(stack) if stack is not None else ENB_STACK
    if len(chain) < 2:
        raise ValueError("an enb stack needs at least a core layer and a PHY")
    node = CompoundModule(name, type_name="enb")
    node.kind = NodeType.ENB
    layers = _build_stack(chain, PassThroughLayer, PhyLayer)
    radio = RadioInterface()
    node.add_child(radio)
    for layer in reversed(layers):
        node.add_child(layer)
    for upper, lower in zip(layers, layers[1:]):
        wire_vertical(upper, lower)
    phy = layers[-1]
    connect(radio.add_gate(OUT_TO_UPPER, Direction.OUT),
            phy.add_gate(IN_FROM_LOWER, Direction.IN))
    phy.set_upper_tag(layers[-2].tag if len(layers) > 1 else chain[0].tag)
    radio.add_gate(RADIO_IN, Direction.IN)
    phy.home_radio = radio

    node.phy = phy
    node.radio = radio
    node.stack = layers
    node.core_port = layers[0]  # wired toward the S-GW by link_enb_to_sgw
    return node


def build_sgw_mme(name: str,
                  stack: Optional[Sequence[LayerSpec]] = None) -> CompoundModule:
    """S-GW and MME merged into one node: S1 toward eNBs, S5 toward PDN-GW."""
    chain = tuple(stack) if stack is not None else SGW_MME_STACK
    node = CompoundModule(name, type_name="sgw_mme")
    node.kind = NodeType.SGW_MME
    layers = [PassThroughLayer(s.module_name, s.tag) for s in chain]
    layers[-1].lower_is_vector = True  # one gate pair per linked eNB
    for layer in reversed(layers):
        node.add_child(layer)
    for upper, lower in zip(layers, layers[1:]):
        wire_vertical(upper, lower)
    node.stack = layers
    node.core_port = layers[0]   # toward the PDN-GW
    node.access_port = layers[-1]  # toward the eNBs
    return node


def build_pdn_gw(name: str,
                 stack: Optional[Sequence[LayerSpec]] = None) -> CompoundModule:
    """PDN-GW compound; its top layer reflects traffic back downward."""
    chain = tuple(stack) if stack is not None else PDN_GW_STACK
    node = CompoundModule(name, type_name="pdn_gw")
    node.kind = NodeType.PDN_GW
    layers = _build_stack(chain, ReflectorLayer, PassThroughLayer)
    for layer in reversed(layers):
        node.add_child(layer)
    for upper, lower in zip(layers, layers[1:]):
        wire_vertical(upper, lower)
    node.stack = layers
    node.access_port = layers[-1]  # wired toward the S-GW
    return node


def attach_ue(ue: CompoundModule, enb: CompoundModule,
              air_delay: SimTime = SimTime(0)) -> None:
    """Point the UE's PHY at its serving eNB's radio interface."""
    if getattr(enb, "kind", None) is not NodeType.ENB:
        raise SimulationError(f"cannot attach {ue.name!r} to non-eNB {enb.name!r}")
    ue.phy.peer_radio = enb.radio
    ue.phy.air_delay = air_delay
    ue.radio_peer = enb


def link_enb_to_sgw(enb: CompoundModule, sgw: CompoundModule,
                    channel: ChannelSpec = ChannelSpec()) -> None:
    """Backhaul link: the eNB's top layer to a fresh S1 gate pair."""
    wire_vertical(sgw.access_port, enb.core_port, channel, vector_on_upper=True)


def link_sgw_to_pdn(sgw: CompoundModule, pdn: CompoundModule,
                    channel: ChannelSpec = ChannelSpec()) -> None:
    wire_vertical(pdn.access_port, sgw.core_port, channel)


def blueprint_for(node: CompoundModule) -> NodeBlueprint:
    """Describe a built node; handy for inspection and tests."""
    chain = tuple(LayerSpec(layer.tag, layer.name) for layer in node.stack)
    peer = getattr(node, "radio_peer", None)
    return NodeBlueprint(node.kind, chain, peer.name if peer is not None else None)
