"""Command-line runner: parse a topology config, build it, run it, and
write trace/metrics outputs.

Exit codes: 0 success, 1 runtime failure, 2 config problems (printed with
file:line:col locations), 64 usage errors. With no output flags the
console log goes to stdout; LTEADV_SIM_TRACE=paper|structured|both picks
its format. --quiet silences the console trace but never file outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import netconfig, trace
from .kernel import SimulationError

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_USAGE = 64

_TRACE_ENV = "LTEADV_SIM_TRACE"


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # route argparse failures to exit code 64 instead of its default 2
    def error(self, message):
        raise _UsageError(message)


def _duration(text: str):
    try:
        return netconfig.parse_duration(text)
    except (ValueError, SimulationError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_arg_parser() -> argparse.ArgumentParser:
    p = _ArgumentParser(
        prog="lteadv-sim",
        description="Run a discrete-event simulation of an LTE-Advanced "
                    "protocol-stack skeleton network.")
    p.add_argument("--config", required=True, metavar="FILE",
                   help="topology config file")
    p.add_argument("--until", type=_duration, metavar="DURATION",
                   help="override the config's run-until time (e.g. 1s, 10ms)")
    p.add_argument("--seed", type=int, metavar="N",
                   help="override the config's seed")
    p.add_argument("--trace-out", metavar="FILE",
                   help="write the console-format event log here")
    p.add_argument("--structured-out", metavar="FILE",
                   help="write the structured (JSON lines) trace here")
    p.add_argument("--metrics-out", metavar="FILE",
                   help="write post-run metrics as JSON here")
    p.add_argument("--event-limit", type=_positive_int, metavar="N",
                   help="stop after N events")
    p.add_argument("--quiet", action="store_true",
                   help="suppress the console trace (file outputs still written)")
    return p


def _print_diagnostics(path: str, diagnostics) -> None:
    for diag in diagnostics:
        print(f"{path}:{diag}", file=sys.stderr)


def _print_summary(summary) -> None:
    out = sys.stderr
    print(f"events executed: {summary.events_executed}", file=out)
    print(f"final time:      {summary.final_time.seconds_str()} s", file=out)
    print(f"stop reason:     {summary.stop_reason.value}", file=out)
    print(f"seed:            {summary.seed}", file=out)
    # wall-clock figures vary run to run; everything above is deterministic
    print(f"wall clock:      {summary.wall_clock_seconds:.6f} s", file=out)
    if summary.wall_clock_seconds > 0:
        rate = summary.events_executed / summary.wall_clock_seconds
        print(f"events/s:        {rate:.0f}", file=out)


def main(argv: Optional[list] = None) -> int:
    parser = build_arg_parser()
    try:
        opts = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    console_format = os.environ.get(_TRACE_ENV, "paper")
    if console_format not in ("paper", "structured", "both"):
        print(f"{parser.prog}: error: {_TRACE_ENV} must be "
              f"paper, structured or both (got {console_format!r})", file=sys.stderr)
        return EXIT_USAGE

    try:
        with open(opts.config, "r", encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        print(f"{parser.prog}: error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    result = netconfig.parse(source)
    if not result.ok:
        _print_diagnostics(opts.config, result.diagnostics)
        return EXIT_CONFIG
    spec = result.spec
    if opts.until is not None:
        spec.until = opts.until
    if opts.seed is not None:
        spec.seed = opts.seed
    problems = netconfig.validate(spec)
    if problems:
        _print_diagnostics(opts.config, problems)
        return EXIT_CONFIG

    built = netconfig.build(spec)
    sim = built.simulator()

    sinks = []
    open_files = []
    collector = None
    try:
        if opts.trace_out:
            fh = open(opts.trace_out, "w", encoding="utf-8", newline="\n")
            open_files.append(fh)
            sinks.append(trace.PaperTraceSink(fh))
        if opts.structured_out:
            fh = open(opts.structured_out, "w", encoding="utf-8", newline="\n")
            open_files.append(fh)
            sinks.append(trace.StructuredTraceSink(fh))
        if opts.metrics_out:
            collector = trace.CollectingSink()
            sinks.append(collector)
        file_output_requested = bool(opts.trace_out or opts.structured_out
                                     or opts.metrics_out)
        if not file_output_requested and not opts.quiet:
            if console_format in ("paper", "both"):
                sinks.append(trace.PaperTraceSink(sys.stdout))
            if console_format in ("structured", "both"):
                sinks.append(trace.StructuredTraceSink(sys.stdout))

        try:
            summary = sim.run(until=spec.until, event_limit=opts.event_limit,
                              sinks=sinks)
        except SimulationError as exc:
            print(f"{parser.prog}: error: {exc}", file=sys.stderr)
            return EXIT_RUNTIME

        if opts.metrics_out:
            metrics = trace.summarize(collector.records, spec, summary)
            with open(opts.metrics_out, "w", encoding="utf-8") as fh:
                json.dump(metrics.to_json_dict(), fh, indent=2, sort_keys=False)
                fh.write("\n")
    finally:
        for fh in open_files:
            fh.close()

    _print_summary(summary)
    return EXIT_OK


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
