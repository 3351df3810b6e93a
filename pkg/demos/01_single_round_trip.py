"""
One message, one round trip
============================

Build the minimal network (one UE on one eNB, S-GW/MME and PDN-GW behind
it) and run just past t=0, so exactly one generator message travels down
the UE stack, across the air, through the core to the PDN-GW top, and all
the way back. Every hop prints in the classic event-log format; note how
each layer renames the message for the layer it is sending to, and how
all 38 events share the same timestamp because pass-through layers add
no delay.
"""

from pathlib import Path
import sys

from lteadv_sim import PaperTraceSink, SimTime, build, parse

source = (Path(__file__).parent / "minimal.net").read_text()
result = parse(source)
if not result.ok:
    sys.exit("\n".join(str(d) for d in result.diagnostics))

network = build(result.spec)
sim = network.simulator()
summary = sim.run(until=SimTime(1), sinks=[PaperTraceSink(sys.stdout)])

print()
print(f"executed {summary.events_executed} events, "
      f"clock stopped at T={summary.final_time.seconds_str()}")
