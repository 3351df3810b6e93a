"""
The topology description language
=================================

Configs are plain text: node declarations (singletons or vectors), UE
attachments, optional backhaul links with delays, generator blocks, a run
horizon and a seed. The parser reports every problem it can find with
line:column locations instead of stopping at the first one, and a parsed
spec prints back to canonical text that parses to an equal spec.
"""

from lteadv_sim import format_spec, parse, validate

good = """\
network Demo {
    ue handset[2];
    enb cell;
    sgw_mme core;
    pdn_gw edge;
    attach handset[*] -> cell;
    link cell -> core delay 2ms;
    generator on handset[0] { period 20ms; payload packet 1500; }
    run until 200ms;
    seed 7;
}
"""

print("a valid config round-trips through its canonical printing:\n")
spec = parse(good).spec
print(format_spec(spec))
assert parse(format_spec(spec)).spec == spec

bad = """\
network Broken {
    ue u[2
    enb e;
    pdn_gw p;
    pdn_gw q;
    attach u[5] -> e;
    run until 1s;
}
"""

print("a broken config yields located diagnostics, all in one pass:\n")
result = parse(bad)
for diag in result.diagnostics:
    print(f"  broken.net:{diag}")

# validation problems (topology rules) carry locations too
fixed = bad.replace("ue u[2\n", "ue u[2];\n")
result = parse(fixed)
print()
for diag in validate(result.spec):
    print(f"  broken.net:{diag}")
