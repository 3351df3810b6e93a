import pytest

from lteadv_sim import CollectingSink, build, parse

# The smallest interesting network: one of each node, generator on the UE,
# zero delays everywhere.
MINIMAL_SOURCE = """\
network Network {
    ue ue;
    enb enb;
    sgw_mme sgw_mme;
    pdn_gw pdn_gw;
    attach ue -> enb;
    generator on ue { period 10ms; }
    run until 1s;
}
"""

# Four UEs split over two eNBs, shared core.
MULTI_UE_SOURCE = """\
network Network {
    ue ue[4];
    enb enb[2];
    sgw_mme sgw_mme;
    pdn_gw pdn_gw;
    attach ue[0..1] -> enb[0];
    attach ue[2..3] -> enb[1];
    generator on ue[*] { period 10ms; }
    run until 1s;
}
"""


@pytest.fixture
def minimal_spec():
    result = parse(MINIMAL_SOURCE)
    assert result.ok, result.diagnostics
    return result.spec


@pytest.fixture
def multi_ue_spec():
    result = parse(MULTI_UE_SOURCE)
    assert result.ok, result.diagnostics
    return result.spec


def run_spec(spec, until=None, event_limit=None, seed=None):
    """Build and run a spec, returning (records, summary, built network)."""
    built = build(spec)
    sim = built.simulator(seed=seed)
    sink = CollectingSink()
    summary = sim.run(until=until if until is not None else spec.until,
                      event_limit=event_limit, sinks=[sink])
    return sink.records, summary, built
