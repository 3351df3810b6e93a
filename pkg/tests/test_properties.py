"""Cross-module properties over generated topologies.

Two invariants that should hold for any wellformed network description:
the canonical printing round-trips through the parser unchanged, and a
zero-delay run conserves messages with every visited path matching the
chain-walk oracle.
"""

from hypothesis import given, settings, strategies as st

from lteadv_sim import CollectingSink, build, parse
from lteadv_sim.kernel import MessageKind, SimTime
from lteadv_sim.netconfig import (AttachDecl, GeneratorDecl, LinkDecl, NetworkSpec,
                                  NodeDecl, Selector, SelectorKind, format_spec,
                                  validate)
from lteadv_sim.lte_nodes import NodeType
from lteadv_sim.traffic import GeneratorConfig
from lteadv_sim.trace import summarize, zero_delay_emissions

PERIODS_MS = (5, 10, 20)


def _selector_for(name, count, index, want_all):
    """Some way of addressing instance `index` (or all) of a declaration."""
    if count is None:
        return Selector(name)
    if want_all:
        return Selector(name, SelectorKind.STAR)
    return Selector(name, SelectorKind.INDEX, index)


@st.composite
def network_specs(draw):
    n_ue = draw(st.integers(min_value=1, max_value=3))
    n_enb = draw(st.integers(min_value=1, max_value=2))
    ue_vector = draw(st.booleans()) or n_ue > 1
    enb_vector = draw(st.booleans()) or n_enb > 1

    decls = [
        NodeDecl(NodeType.UE, "u", n_ue if ue_vector else None),
        NodeDecl(NodeType.ENB, "e", n_enb if enb_vector else None),
        NodeDecl(NodeType.SGW_MME, "core", None),
        NodeDecl(NodeType.PDN_GW, "edge", None),
    ]

    attachments = []
    for i in range(n_ue):
        enb_idx = draw(st.integers(min_value=0, max_value=n_enb - 1))
        attachments.append(AttachDecl(
            _selector_for("u", n_ue if ue_vector else None, i, want_all=False),
            _selector_for("e", n_enb if enb_vector else None, enb_idx, want_all=False)))

    links = []
    if draw(st.booleans()):
        delay_ms = draw(st.sampled_from((0, 1, 2)))
        links.append(LinkDecl(
            Selector("core"), Selector("edge"),
            SimTime.from_millis(delay_ms) if delay_ms else None))

    generators = []
    gen_on_all = draw(st.booleans())
    period = SimTime.from_millis(draw(st.sampled_from(PERIODS_MS)))
    kind = draw(st.sampled_from(list(MessageKind)))
    config = GeneratorConfig(
        period=period,
        payload_kind=kind,
        payload_bytes=100 if kind is MessageKind.PACKET else 0)
    if gen_on_all or not ue_vector:
        generators.append(GeneratorDecl(
            _selector_for("u", n_ue if ue_vector else None, 0, want_all=True),
            config))
    else:
        generators.append(GeneratorDecl(
            Selector("u", SelectorKind.INDEX, 0), config))

    return NetworkSpec(
        network_name="Network",
        node_decls=decls,
        attachments=attachments,
        links=links,
        generators=generators,
        until=SimTime.from_millis(draw(st.sampled_from((25, 40, 60)))),
        seed=draw(st.sampled_from((None, 0, 7))),
    )


@given(network_specs())
@settings(max_examples=40, deadline=None)
def test_generated_specs_round_trip_through_printing(spec):
    assert validate(spec) == []
    printed = format_spec(spec)
    result = parse(printed)
    assert result.ok, result.diagnostics
    assert result.spec == spec
    assert format_spec(result.spec) == printed


@given(network_specs())
@settings(max_examples=25, deadline=None)
def test_generated_specs_run_conserved_and_oracle_clean(spec):
    built = build(spec)
    sim = built.simulator()
    sink = CollectingSink()
    summary = sim.run(until=spec.until, sinks=[sink])
    metrics = summarize(sink.records, spec, summary)
    assert metrics.path_mismatches == []
    assert metrics.total_events == summary.events_executed

    zero_delay = not spec.links or all(
        link.delay is None or link.delay.ns == 0 for link in spec.links)
    expected_trips = 0
    in_flight = 0
    for name, node in built.nodes.items():
        gen = getattr(node, "generator", None)
        if gen is None or not gen.enabled:
            continue
        stats = gen.stats
        assert stats.discarded == stats.returned
        assert stats.emitted - stats.discarded in (0, 1)
        in_flight += stats.emitted - stats.discarded
        if zero_delay:
            assert stats.emitted == zero_delay_emissions(
                spec.until, gen.config.period, gen.config.start_time)
            assert stats.emitted == stats.discarded
        expected_trips += stats.discarded
    assert metrics.round_trips == expected_trips
    if zero_delay:
        assert in_flight == 0
        assert all(rtt.ns == 0 for rtt in metrics.per_message_rtt.values())
