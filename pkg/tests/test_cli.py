"""CLI contract: subcommands, flags, exit codes, CSV outputs."""

import json

import pytest

from telefid.calio import SynthProfile, read_results, synth_snapshot, write_snapshot
from telefid.cli import main


@pytest.fixture()
def grid_path(tmp_path):
    snap = synth_snapshot(SynthProfile("grid", (3, 3), "balanced", seed=5))
    path = tmp_path / "grid.json"
    write_snapshot(snap, path)
    return str(path)


def test_unknown_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--bogus"])
    assert exc.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_missing_snapshot_is_data_error(tmp_path, capsys):
    code = main(["run", "--snapshot", str(tmp_path / "nope.json"), "--theta", "1.0"])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_run_prints_fidelity(grid_path, capsys):
    assert main(["run", "--snapshot", grid_path, "--theta", "1.5707", "--ns", "0"]) == 0
    out = capsys.readouterr().out
    fields = dict(tok.split("=") for tok in out.split())
    assert float(fields["fidelity"]) == pytest.approx(1.0, abs=1e-9)
    assert float(fields["accept"]) == pytest.approx(1.0, abs=1e-9)


def test_run_writes_record_csv(grid_path, tmp_path):
    out = tmp_path / "run.csv"
    assert main(
        ["run", "--snapshot", grid_path, "--theta", "1.0", "--out", str(out),
         "--repeats", "3"]
    ) == 0
    rows = read_results(out)
    assert len(rows) == 3
    assert rows[0] == rows[1] == rows[2]


def test_sweep_ns_zero_rows(grid_path, tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(
        ["sweep", "--snapshot", grid_path, "--theta", "3.14159", "--ns", "0",
         "--out", str(out)]
    ) == 0
    rows = read_results(out)
    assert {r.mode for r in rows} == {"physical", "encoded"}
    assert all(r.fidelity == pytest.approx(1.0, abs=1e-9) for r in rows)


def test_cascade_monotone_counts(tmp_path, capsys):
    snap = synth_snapshot(SynthProfile("line", (12,), "balanced", seed=11))
    path = tmp_path / "line.json"
    write_snapshot(snap, path)
    out = tmp_path / "cascade.csv"
    assert main(["cascade", "--snapshot", str(path), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    header = lines[0].split(",")
    counts = [int(line.split(",")[header.index("path_count")]) for line in lines[1:]]
    assert counts == sorted(counts, reverse=True)


def test_waterfall_stdout(grid_path, capsys):
    assert main(["waterfall", "--snapshot", grid_path, "--theta", "1.5707"]) == 0
    out = capsys.readouterr().out
    assert "baseline" in out and "+L2" in out and "total gain" in out


def test_synth_then_convert_round(tmp_path, capsys):
    out = tmp_path / "ring.json"
    assert main(["synth", "--topology", "ring:6", "--seed", "3", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["qubits"]) == 6 and len(doc["edges"]) == 6

    # convert a foreign-flavored document
    foreign = {
        "backend_name": "other",
        "qubits": [
            {"T1": 100.0, "T2": 90.0, "prob_meas1_prep0": 0.01,
             "prob_meas0_prep1": 0.02, "sx_error": 0.001}
            for _ in range(2)
        ],
        "edges": [{"qubits": [0, 1], "cz_error": 0.004}],
    }
    fpath = tmp_path / "foreign.json"
    fpath.write_text(json.dumps(foreign))
    conv = tmp_path / "converted.json"
    assert main(["convert-snapshot", str(fpath), "--out", str(conv)]) == 0
    converted = json.loads(conv.read_text())
    assert converted["version"] == 1
    assert converted["qubits"][0]["t1_us"] == 100.0


def test_encoded_run_on_line_is_data_error(tmp_path, capsys):
    # the encoded interaction graph contains a 4-cycle: no line embedding
    snap = synth_snapshot(SynthProfile("line", (8,), "balanced", seed=1))
    path = tmp_path / "line8.json"
    write_snapshot(snap, path)
    code = main(["run", "--snapshot", str(path), "--mode", "encoded", "--theta", "1.0"])
    assert code == 2
    assert "embedding" in capsys.readouterr().err
