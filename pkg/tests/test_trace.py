"""Trace tests: log-line format, structured round-trip, metrics, oracle."""

import io

import pytest
from hypothesis import given, strategies as st

from lteadv_sim import build, parse
from lteadv_sim.kernel import EventRecord, SimTime
from lteadv_sim.netconfig import NetworkSpec
from lteadv_sim.trace import (CollectingSink, MalformedTrace, PaperTraceSink,
                              StructuredTraceSink, data_walk,
                              expected_event_total, format_event_line,
                              parse_structured_line, read_structured,
                              structured_line, summarize, timer_hop,
                              write_structured, zero_delay_emissions)

from conftest import MINIMAL_SOURCE, run_spec


# -- console format -------------------------------------------------------------

def test_format_golden_line_one():
    rec = EventRecord(1, 0, "Network.ue.lte_nas", "lte_nas", 18, "NASMsg", "cMessage", 2)
    assert format_event_line(rec) == (
        "** Event #1 T=0 Network.ue.lte_nas (lte_nas, id=18), "
        "on `NASMsg' (cMessage, id=2)")


def test_format_golden_line_two():
    rec = EventRecord(2, 0, "Network.ue.lte_rrc", "lte_rrc", 17, "RRCMsg", "cMessage", 2)
    assert format_event_line(rec) == (
        "** Event #2 T=0 Network.ue.lte_rrc (lte_rrc, id=17), "
        "on `RRCMsg' (cMessage, id=2)")


def test_format_trims_trailing_zeros():
    rec = EventRecord(9, 1_500_000_000, "Network.x", "x", 1, "m", "cPacket", 3)
    assert "T=1.5 " in format_event_line(rec)


def test_format_never_prints_binary_noise():
    # 0.01 s must print exactly, not as 0.00999...
    rec = EventRecord(1, 10_000_000, "Network.x", "x", 1, "m", "cMessage", 1)
    assert "T=0.01 " in format_event_line(rec)


# -- structured format ------------------------------------------------------------

def test_structured_line_carries_all_fields():
    rec = EventRecord(1, 0, "Network.ue.lte_nas", "lte_nas", 4, "NASMsg", "cMessage", 1)
    line = structured_line(rec)
    assert '"t_ns": 0' in line
    assert '"msg_name": "NASMsg"' in line
    assert parse_structured_line(line) == rec


def test_structured_round_trip_1000_records():
    records = [EventRecord(i + 1, i * 10, f"Network.m{i % 7}", "t", i % 5,
                           f"name{i}", "cMessage" if i % 2 else "cPacket", i)
               for i in range(1000)]
    buf = io.StringIO()
    write_structured(records, buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 1000
    assert read_structured(lines) == records


def test_malformed_trace_reports_line_number():
    lines = [structured_line(EventRecord(1, 0, "a", "t", 1, "m", "cMessage", 1)),
             "{not json",
             ]
    with pytest.raises(MalformedTrace) as exc_info:
        read_structured(lines)
    assert exc_info.value.line_no == 2
    with pytest.raises(MalformedTrace):
        parse_structured_line('{"event_no": 1}', 5)


@given(st.integers(min_value=1, max_value=10**6),
       st.integers(min_value=0, max_value=10**15),
       st.text(st.characters(codec="utf-8", exclude_categories=("Cs",)), max_size=20))
def test_structured_round_trip_property(no, t_ns, name):
    rec = EventRecord(no, t_ns, "Network.p", "t", 1, name, "cMessage", no)
    assert parse_structured_line(structured_line(rec)) == rec


# -- sinks ---------------------------------------------------------------------------

def test_sinks_write_one_line_per_event(minimal_spec):
    paper_buf, struct_buf = io.StringIO(), io.StringIO()
    built = build(minimal_spec)
    sim = built.simulator()
    summary = sim.run(until=SimTime.from_millis(15),
                      sinks=[PaperTraceSink(paper_buf), StructuredTraceSink(struct_buf)])
    paper_lines = paper_buf.getvalue().splitlines()
    struct_lines = struct_buf.getvalue().splitlines()
    assert len(paper_lines) == len(struct_lines) == summary.events_executed
    assert paper_lines[0].startswith("** Event #1 T=0 Network.ue.lte_nas")


def test_two_runs_byte_identical(minimal_spec):
    outputs = []
    for _ in range(2):
        paper_buf, struct_buf = io.StringIO(), io.StringIO()
        built = build(minimal_spec)
        sim = built.simulator()
        sim.run(until=minimal_spec.until,
                sinks=[PaperTraceSink(paper_buf), StructuredTraceSink(struct_buf)])
        outputs.append((paper_buf.getvalue(), struct_buf.getvalue()))
    assert outputs[0] == outputs[1]


# -- oracle ---------------------------------------------------------------------------

def test_zero_delay_emissions_oracle():
    ms = SimTime.from_millis
    assert zero_delay_emissions(SimTime.from_seconds(1), ms(10)) == 100
    assert zero_delay_emissions(SimTime(1), ms(10)) == 1
    assert zero_delay_emissions(ms(10), ms(10)) == 1      # until is exclusive
    assert zero_delay_emissions(SimTime(0), ms(10)) == 0
    assert zero_delay_emissions(ms(25), ms(10), start=ms(5)) == 2


def test_expected_event_total_minimal(minimal_spec):
    # 100 trips of 38 hops plus 99 re-arm timers
    assert expected_event_total(minimal_spec) == 100 * 38 + 99


def test_data_walk_length_is_38(minimal_spec):
    assert len(data_walk(minimal_spec, "ue")) == 38


def test_timer_hop_path(minimal_spec):
    assert timer_hop(minimal_spec, "ue") == ("Network.ue.generator", "GenTimer")


# -- summarize -----------------------------------------------------------------------

def test_summarize_minimal_run(minimal_spec):
    records, summary, built = run_spec(minimal_spec)
    metrics = summarize(records, minimal_spec, summary)
    assert metrics.total_events == summary.events_executed
    assert metrics.round_trips == 100
    assert metrics.path_mismatches == []
    assert all(rtt == SimTime(0) for rtt in metrics.per_message_rtt.values())
    data_ids = [mid for mid, hops in metrics.per_message_hops.items() if hops == 38]
    assert len(data_ids) == 100
    assert metrics.events_per_wall_second is not None
    assert metrics.drops == {}
    # round trips equal the generator's discard count
    assert metrics.round_trips == built.nodes["ue"].generator.stats.discarded


def test_summarize_empty_trace(minimal_spec):
    metrics = summarize([], minimal_spec)
    assert metrics.total_events == 0
    assert metrics.round_trips == 0
    assert metrics.per_message_hops == {}
    assert metrics.path_mismatches == []


def test_summarize_flags_corrupted_sequence(minimal_spec):
    records, summary, built = run_spec(minimal_spec, until=SimTime(1))
    # swap two adjacent hops of the single round trip
    records[3], records[4] = records[4], records[3]
    metrics = summarize(records, minimal_spec, summary)
    assert metrics.round_trips == 0
    assert metrics.path_mismatches


def test_summarize_accepts_in_flight_prefix(minimal_spec):
    records, summary, built = run_spec(minimal_spec, until=SimTime(1), event_limit=10)
    metrics = summarize(records, minimal_spec, summary)
    assert metrics.round_trips == 0
    assert metrics.path_mismatches == []
    assert metrics.per_message_hops[records[0].msg_id] == 10


def test_summarize_counts_drops_for_generatorless_ue():
    # synthetic: a spec whose UE has no generator; a full walk ends at the
    # NAS and counts as a drop there
    source = MINIMAL_SOURCE.replace("    generator on ue { period 10ms; }\n", "")
    spec = parse(source).spec
    walk = data_walk(spec, "ue")
    assert walk[-1] == ("Network.ue.lte_nas", "NASMsg")
    records = [EventRecord(i + 1, 0, path, path.rsplit(".", 1)[1], i + 1, name,
                           "cMessage", 7)
               for i, (path, name) in enumerate(walk)]
    metrics = summarize(records, spec)
    assert metrics.drops == {"Network.ue.lte_nas": 1}
    assert metrics.round_trips == 0
    assert metrics.path_mismatches == []


def test_summarize_repeated_runs_identical(minimal_spec):
    firsts = []
    for _ in range(2):
        records, summary, _ = run_spec(minimal_spec)
        metrics = summarize(records, minimal_spec)
        firsts.append((metrics.total_events, metrics.round_trips,
                       sorted(metrics.per_message_hops.items()),
                       sorted((k, v.ns) for k, v in metrics.per_message_rtt.items())))
    assert firsts[0] == firsts[1]


def test_metrics_json_dict_is_serializable(minimal_spec):
    import json
    records, summary, _ = run_spec(minimal_spec, until=SimTime.from_millis(30))
    metrics = summarize(records, minimal_spec, summary)
    blob = json.dumps(metrics.to_json_dict())
    assert '"round_trips": 3' in blob


def test_nonzero_link_delay_shows_up_in_rtt():
    source = MINIMAL_SOURCE.replace(
        "    attach ue -> enb;",
        "    attach ue -> enb;\n    link enb -> sgw_mme delay 1ms;")
    spec = parse(source).spec
    records, summary, built = run_spec(spec)
    metrics = summarize(records, spec, summary)
    # the backhaul link is crossed twice per trip
    assert set(t.ns for t in metrics.per_message_rtt.values()) == {2_000_000}
    assert metrics.path_mismatches == []  # same walk, later timestamps
    # return-gated emission: one trip per (period + rtt) step
    assert metrics.round_trips == (1_000_000_000 - 1) // 12_000_000 + 1
    assert built.nodes["ue"].generator.stats.discarded == metrics.round_trips
