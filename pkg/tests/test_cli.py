import io
import json
import math
import re

import pytest

import oracles
from zigzag_evasion.cli import main
from zigzag_evasion.evasion import SectionReport
from zigzag_evasion.io import dump_scenario
from zigzag_evasion.scenarios import named_scenarios, two_sensor_cross
from zigzag_evasion.zigzag import ZigzagAb, ZigzagSets, AbGroup


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("scenarios")
    out = {}
    for name, make in named_scenarios().items():
        out[name] = d / f"{name}.json"
        dump_scenario(make(), out[name])
    return out


def run(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


def test_decide_fence_only(files):
    assert run("decide", files["fence_only"]) == (0, "EXISTS lim=1\n")


def test_decide_sweeping_wall(files):
    assert run("decide", files["sweeping_wall"]) == (1, "NONE lim=0\n")


def test_events_match_roots(files):
    code, text = run("events", files["two_sensor_cross"])
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "events: 2"
    times = [float(line.split()[0]) for line in lines[1:3]]
    a, b = two_sensor_cross().sensors
    pa, pb = a.waypoints[0][1], b.waypoints[0][1]
    va = [y - x for x, y in zip(pa, a.waypoints[1][1])]
    vb = [y - x for x, y in zip(pb, b.waypoints[1][1])]
    for t, r in zip(times, oracles.touching_roots(pa, va, pb, vb, a.radius + b.radius)):
        assert abs(t - r) < 1e-6
    assert "ADDED added=[{a,b}]" in lines[1] and "REMOVED" in lines[2]


def test_nerve(files):
    code, text = run("nerve", files["fence_with_ring"], "--time", "0.5")
    assert code == 0 and "betti_1=2" in text


def test_report_round_trip(files, tmp_path):
    out = tmp_path / "r.json"
    assert run("report", files["two_chambers"], "-o", out, "--r1lim", "abelianized")[0] == 0
    obj = json.loads(out.read_text())
    back = SectionReport.from_json(obj)
    assert back.verdict.value == obj["verdict"] == "EXISTS" and back.lim_cardinality == obj["lim_cardinality"] == 2
    assert [r["method"] for r in obj["r1lim"]] == ["ABELIANIZED", "ABELIANIZED"]


def test_report_stdout_with_oracle(files):
    code, text = run("report", files["fence_only"], "--oracle")
    obj = json.loads(text)
    assert code == 0 and obj["oracle"] == {"exists": True, "agrees": True} and obj["witness"]


def test_decide_with_oracle_line(files):
    code, text = run("decide", files["two_chambers"], "--oracle", "--field", "rational")
    assert code == 0 and text.splitlines() == ["EXISTS lim=2", "oracle EXISTS agrees"]


def test_oracle_verb(files, tmp_path):
    w = tmp_path / "w.json"
    assert run("oracle", files["fence_only"], "--witness", w) == (0, "EXISTS\n")
    pts = json.loads(w.read_text())
    assert pts[0][0] == 0 and pts[-1][0] == 1


def test_render(files, tmp_path):
    code, text = run("render", files["two_sensor_cross"], "-o", tmp_path / "frames", "--grid", "32")
    assert code == 0
    n = int(re.match(r"wrote (\d+) frames", text).group(1))
    assert n == 3 == len(list((tmp_path / "frames").glob("*.svg")))


def test_zigzag_sets(tmp_path):
    p = tmp_path / "z.json"
    p.write_text(json.dumps(ZigzagSets([["a1", "a2"], ["c"]], [["b1", "b2"]],
                                       [{"a1": "b1", "a2": "b2"}], [{"c": "b1"}]).to_json()))
    assert run("zigzag", p) == (0, 'lim=1\n["a1", "c"]\n')


def test_zigzag_abelian(tmp_path):
    Z = AbGroup.free(1)
    p = tmp_path / "z.json"
    p.write_text(json.dumps(ZigzagAb([Z, Z], [Z], [[[2]]], [[[2]]]).to_json()))
    assert run("zigzag", p) == (0, "r1lim=Z/2\n")


def test_zigzag_finite(tmp_path):
    p = tmp_path / "z.json"
    p.write_text(json.dumps({"type": "finite", "fibers": [{"table": [[0]]}, {"table": [[0]]}],
                             "spans": [{"table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}],
                             "alpha": [[0]], "beta": [[0]]}))
    assert run("zigzag", p) == (0, "r1lim orbits=3\n")


@pytest.mark.parametrize("argv", [
    ("frobnicate", "x.json"),
    ("decide",),
    ("decide", "missing.json"),
    ("decide", "FENCE", "--bogus"),
    ("decide", "FENCE", "--field", "complex"),
    ("decide", "FENCE", "--grid", "0"),
    ("decide", "FENCE", "--grid", "8"),
])
def test_errors_exit_2(argv, files, capsys):
    argv = [files["fence_only"] if a == "FENCE" else a for a in argv]
    assert run(*argv)[0] == 2
    assert capsys.readouterr().err


def test_bad_json_reports_location(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"dimension": 2,\n "domain": }')
    assert run("decide", p)[0] == 2
    assert "line 2" in capsys.readouterr().err


def test_bad_field_reports_name(tmp_path, files, capsys):
    obj = json.loads(files["fence_only"].read_text())
    obj["sensors"][3]["radius"] = "wide"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(obj))
    assert run("events", p)[0] == 2
    assert "sensors[3].radius" in capsys.readouterr().err


def test_unknown_diagram_type(tmp_path, capsys):
    p = tmp_path / "z.json"
    p.write_text('{"type": "ring"}')
    assert run("zigzag", p)[0] == 2
