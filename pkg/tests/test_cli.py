import json
import re
import shutil
from pathlib import Path

import pytest

from line_addition.cli import main

TOY = Path(__file__).resolve().parents[1] / "sample" / "toy"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def add_line_args(demand=TOY / "demand.csv"):
    return [
        "add-line",
        "--network", TOY,
        "--demand", demand,
        "--construction-config", TOY / "construction.txt",
        "--efficiency-config", TOY / "efficiency.txt",
    ]


def test_add_line_report_and_map(capsys, tmp_path):
    out_map = tmp_path / "map.geojson"
    code, out, err = run(capsys, *add_line_args(), "--out-map", out_map)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "Line:" and "west end -> north park" in lines
    block = lines[lines.index("Metrics:") + 1 :]
    assert [re.sub(r": .*", ":", x) for x in block] == [
        "Total algorithm runtime in minutes:",
        "Old network efficiency:",
        "New network efficiency:",
        "Improvement:",
        "Percentage improvement:",
    ]
    assert "runtime in seconds" in err
    doc = json.loads(out_map.read_text())
    assert sum(f["geometry"]["type"] == "Point" for f in doc["features"]) == 6


def test_missing_demand_file(capsys, tmp_path):
    code, _, err = run(capsys, *add_line_args(demand=tmp_path / "nope.csv"))
    assert code != 0 and "file not found" in err


def test_no_feasible_line(capsys, tmp_path):
    empty = tmp_path / "demand.csv"
    empty.write_text("origin,destination,demand\n")
    code, _, err = run(capsys, *add_line_args(demand=empty))
    assert code == 1 and err.startswith("error:")


def test_evaluate_is_deterministic(capsys):
    args = ["evaluate", "--network", TOY, "--demand", TOY / "demand.csv", "--efficiency-config", TOY / "efficiency.txt"]
    code, first, _ = run(capsys, *args)
    assert code == 0
    assert first.splitlines()[0].startswith("Network efficiency: ")
    values = {k: float(v) for k, v in (x.split(": ") for x in first.splitlines())}
    assert values["Network efficiency"] == pytest.approx(values["Total efficiency"] * values["Total construction cost"])
    assert run(capsys, *args)[1] == first


def test_evaluate_log_of_zero_is_clean(capsys, tmp_path):
    (tmp_path / "demand.csv").write_text("origin,destination,demand\n")
    cfg = tmp_path / "eff.txt"
    cfg.write_text((TOY / "efficiency.txt").read_text().replace("regression:linear-linear", "regression:log-log"))
    code, _, err = run(capsys, "evaluate", "--network", TOY, "--demand", tmp_path / "demand.csv", "--efficiency-config", cfg)
    assert code == 1 and "error:" in err and "Traceback" not in err


def test_path_adjacent_and_two_transfers(capsys):
    code, out, _ = run(capsys, "path", "--network", TOY, "A", "H")
    assert code == 0 and "Transfers: 0" in out and out.count(" on ") == 1
    code, out, _ = run(capsys, "path", "--network", TOY, "B", "A", "--strategy", "min-transfer")
    assert "Stations: B -> M -> H -> A" in out and "Transfers: 2" in out


def test_path_one_transfer(capsys):
    # H to B: blue then green
    code, out, _ = run(capsys, "path", "--network", TOY, "H", "B")
    assert code == 0 and "Transfers: 1" in out


def test_path_disconnected_and_unknown(capsys, tmp_path):
    net = tmp_path / "net"
    shutil.copytree(TOY, net)
    (net / "stations.csv").write_text((TOY / "stations.csv").read_text() + "Z,island,9,9,1\n")
    code, _, err = run(capsys, "path", "--network", net, "A", "Z")
    assert code == 1 and "no path" in err
    code, _, err = run(capsys, "path", "--network", TOY, "A", "Q")
    assert code == 1 and "Q" in err


def test_export_map(capsys, tmp_path):
    out = tmp_path / "m.geojson"
    code, _, _ = run(capsys, "export-map", "--network", TOY, "--line", "A,B", "--out", out)
    assert code == 0
    doc = json.loads(out.read_text())
    assert [f["properties"]["role"] for f in doc["features"] if f["geometry"]["type"] == "LineString"].count("new") == 1
