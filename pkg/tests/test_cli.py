"""CLI tests: flags, exit codes, output files, env-selected console format."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from lteadv_sim.cli import EXIT_CONFIG, EXIT_OK, EXIT_USAGE, main

FIXTURES = Path(__file__).parent / "fixtures"
MINIMAL = str(FIXTURES / "minimal.net")


def test_run_writes_trace_file(tmp_path, capsys):
    out = tmp_path / "t.log"
    code = main(["--config", MINIMAL, "--until", "1s", "--trace-out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("** Event #1 T=0")
    assert len(lines) == 3899
    captured = capsys.readouterr()
    assert captured.out == ""  # file output given: no console trace
    assert "events executed: 3899" in captured.err


def test_missing_config_is_usage_error(capsys):
    assert main([]) == EXIT_USAGE
    assert "usage:" in capsys.readouterr().err


def test_bad_duration_is_usage_error(capsys):
    assert main(["--config", MINIMAL, "--until", "fast"]) == EXIT_USAGE


def test_unreadable_config_is_config_error(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "nope.net")]) == EXIT_CONFIG


def test_two_pdn_gw_config_rejected_with_location(capsys):
    code = main(["--config", str(FIXTURES / "bad_two_pdn.net")])
    assert code == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "bad_two_pdn.net:6:5: error:" in err
    assert "exactly one pdn_gw" in err


def test_unclosed_bracket_config_rejected_with_location(capsys):
    code = main(["--config", str(FIXTURES / "bad_unclosed.net")])
    assert code == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "bad_unclosed.net:2:9: error:" in err


def test_dangling_selector_config_rejected(capsys):
    code = main(["--config", str(FIXTURES / "bad_dangling.net")])
    assert code == EXIT_CONFIG
    assert "dangling" in capsys.readouterr().err


def test_console_trace_by_default(capsys):
    code = main(["--config", MINIMAL, "--until", "1ns"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("** Event #1 T=0 Network.ue.lte_nas")
    assert len(out.splitlines()) == 38


def test_quiet_suppresses_console_but_not_files(tmp_path, capsys):
    out = tmp_path / "t.log"
    code = main(["--config", MINIMAL, "--until", "1ns", "--quiet",
                 "--trace-out", str(out)])
    assert code == EXIT_OK
    assert capsys.readouterr().out == ""
    assert len(out.read_text().splitlines()) == 38

    code = main(["--config", MINIMAL, "--until", "1ns", "--quiet"])
    assert code == EXIT_OK
    assert capsys.readouterr().out == ""


def test_env_selects_structured_console(capsys, monkeypatch):
    monkeypatch.setenv("LTEADV_SIM_TRACE", "structured")
    code = main(["--config", MINIMAL, "--until", "1ns"])
    assert code == EXIT_OK
    first = capsys.readouterr().out.splitlines()[0]
    assert first.startswith('{"event_no": 1')


def test_env_both_emits_two_streams(capsys, monkeypatch):
    monkeypatch.setenv("LTEADV_SIM_TRACE", "both")
    code = main(["--config", MINIMAL, "--until", "1ns"])
    out = capsys.readouterr().out
    assert len(out.splitlines()) == 76


def test_env_invalid_value(capsys, monkeypatch):
    monkeypatch.setenv("LTEADV_SIM_TRACE", "fancy")
    assert main(["--config", MINIMAL, "--until", "1ns"]) == EXIT_USAGE


def test_metrics_out(tmp_path):
    metrics_path = tmp_path / "m.json"
    code = main(["--config", MINIMAL, "--metrics-out", str(metrics_path)])
    assert code == EXIT_OK
    blob = json.loads(metrics_path.read_text())
    assert blob["round_trips"] == 100
    assert blob["total_events"] == 3899
    assert blob["path_mismatches"] == []


def test_seed_override_lands_in_summary(capsys):
    code = main(["--config", MINIMAL, "--until", "1ns", "--seed", "99", "--quiet"])
    assert code == EXIT_OK
    assert "seed:            99" in capsys.readouterr().err


def test_until_override_wins_over_config(tmp_path, capsys):
    out = tmp_path / "t.log"
    code = main(["--config", MINIMAL, "--until", "20ms", "--trace-out", str(out)])
    assert code == EXIT_OK
    # two trips plus one timer event
    assert len(out.read_text().splitlines()) == 2 * 38 + 1


def test_event_limit(tmp_path, capsys):
    out = tmp_path / "t.log"
    code = main(["--config", MINIMAL, "--event-limit", "10", "--trace-out", str(out)])
    assert code == EXIT_OK
    assert len(out.read_text().splitlines()) == 10
    assert "stop reason:     EventLimit" in capsys.readouterr().err


def test_identical_invocations_identical_files(tmp_path):
    paths = []
    for i in range(2):
        t = tmp_path / f"t{i}.log"
        s = tmp_path / f"s{i}.ndjson"
        assert main(["--config", MINIMAL, "--trace-out", str(t),
                     "--structured-out", str(s)]) == EXIT_OK
        paths.append((t.read_bytes(), s.read_bytes()))
    assert paths[0] == paths[1]


def test_python_dash_m_entry_point(tmp_path):
    out = tmp_path / "t.log"
    proc = subprocess.run(
        [sys.executable, "-m", "lteadv_sim",
         "--config", MINIMAL, "--until", "1ns", "--trace-out", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().splitlines()[0].startswith("** Event #1")
    assert "events executed: 38" in proc.stderr


def test_python_dash_m_usage_error_exit_64():
    proc = subprocess.run([sys.executable, "-m", "lteadv_sim"],
                          capture_output=True, text=True)
    assert proc.returncode == 64


def test_until_flag_supplies_missing_config_horizon(tmp_path, capsys):
    config = tmp_path / "no_until.net"
    config.write_text(
        "network N {\n"
        "    ue u; enb e; sgw_mme s; pdn_gw p;\n"
        "    attach u -> e;\n"
        "    generator on u { }\n"
        "}\n")
    assert main(["--config", str(config)]) == EXIT_CONFIG  # no horizon anywhere
    capsys.readouterr()
    assert main(["--config", str(config), "--until", "1ns", "--quiet"]) == EXIT_OK
    assert "events executed: 38" in capsys.readouterr().err


def test_structured_file_round_trips_into_metrics(tmp_path):
    from lteadv_sim import parse, read_structured, summarize
    structured = tmp_path / "s.ndjson"
    metrics_path = tmp_path / "m.json"
    assert main(["--config", MINIMAL, "--structured-out", str(structured),
                 "--metrics-out", str(metrics_path)]) == EXIT_OK
    records = read_structured(structured.read_text().splitlines())
    spec = parse(Path(MINIMAL).read_text()).spec
    recomputed = summarize(records, spec)
    blob = json.loads(metrics_path.read_text())
    assert recomputed.round_trips == blob["round_trips"] == 100
    assert recomputed.total_events == blob["total_events"]
    assert [str(k) for k in sorted(recomputed.per_message_hops)] \
        == sorted(blob["per_message_hops"], key=int)
