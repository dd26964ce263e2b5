import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from reeblift import examples
from reeblift.cli import run
from reeblift.graph import ReebGraph


@pytest.fixture
def files(tmp_path):
    def make(name, dom):
        p = tmp_path / name
        dom.dump(p)
        return str(p)
    return tmp_path, make


def test_example_then_preeb(tmp_path, capsys):
    d = tmp_path / "c1.json"
    assert run(["example", "chain", "--l", "1", "-o", str(d)]) == 0
    assert run(["preeb", str(d)]) == 0
    g = ReebGraph.from_json(json.loads(capsys.readouterr().out))
    assert g.n_edges == 1 and dict(g.degree_counts()) == {1: 2}


def test_example_to_stdout(capsys):
    assert run(["example", "stack", "--l", "3"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["k"] == 2 and len(obj["boundary_polys"]) == 3


def test_validate_exit_codes(files, capsys):
    tmp, make = files
    assert run(["validate", make("d.json", examples.unit_disk())]) == 0
    assert "pass" in capsys.readouterr().out
    assert run(["validate", make("x.json", examples.intersecting_circles()), "--json"]) == 1
    rep = json.loads(capsys.readouterr().out)
    assert rep["disjoint"] is False and "disjointness" in rep["witnesses"]


def test_preeb_outputs(files):
    tmp, make = files
    d = make("s3.json", examples.stack(3))
    out, dot, svg = tmp / "g.json", tmp / "g.dot", tmp / "g.svg"
    assert run(["preeb", d, "--merge-window", "1e-2", "-o", str(out), "--dot", str(dot), "--svg", str(svg)]) == 0
    g = ReebGraph.load(out)
    assert dict(g.degree_counts()) == {1: 2, 4: 2}
    assert dot.read_text().startswith("graph")
    root = ET.parse(svg).getroot()
    assert root.tag.endswith("svg")
    tags = [el.tag.split("}")[-1] for el in root]
    # 3 boundary contours (outer circle, 2 holes), 5 edge polylines, 4 vertex markers
    assert tags.count("polyline") == 3 + 5 and tags.count("circle") == 4


def test_compare_exit_codes(files, capsys):
    tmp, make = files
    for name, dom, mw in [("c3", examples.chain(3), "0"), ("s3", examples.stack(3), "1e-2"),
                          ("c2", examples.chain(2), "0"), ("s2", examples.stack(2), "1e-2")]:
        assert run(["preeb", make(f"{name}.json", dom), "--merge-window", mw, "-o", str(tmp / f"g{name}.json")]) == 0
    assert run(["compare", str(tmp / "gc3.json"), str(tmp / "gs3.json")]) == 1
    assert "isomorphic: no" in capsys.readouterr().out
    assert run(["compare", str(tmp / "gc2.json"), str(tmp / "gs2.json")]) == 0
    assert "witness" in capsys.readouterr().out


def test_lift_mapper_regularity_pipeline(files, capsys):
    tmp, make = files
    d = make("c2.json", examples.chain(2))
    lift = tmp / "l.jsonl"
    assert run(["lift", d, "--k0", "4", "--n-base", str(120 ** 2), "-o", str(lift)]) == 0
    assert run(["verify-regularity", str(lift)]) == 0
    assert run(["mapper", str(lift), "--intervals", "20", "--overlap", "0.35", "-o", str(tmp / "m.json")]) == 0
    assert run(["preeb", d, "--smooth-all", "-o", str(tmp / "p.json")]) == 0
    assert run(["compare", str(tmp / "m.json"), str(tmp / "p.json")]) == 0


def test_verify_regularity_fails_on_broken_fixture(files, capsys):
    tmp, make = files
    lift = tmp / "x.jsonl"
    assert run(["lift", make("x.json", examples.intersecting_circles()), "--k0", "4",
                "--n-base", str(100 ** 2), "-o", str(lift)]) == 0
    assert run(["verify-regularity", str(lift)]) == 1
    assert "singular point near" in capsys.readouterr().out


def test_check_theorem(files, capsys):
    tmp, make = files
    assert run(["check-theorem", make("c2.json", examples.chain(2)), "--k0", "4"]) == 0
    out = capsys.readouterr().out
    assert "isomorphic: yes" in out and "VERIFIED" in out


def test_check_theorem_rejects_invalid_domain(files, capsys):
    tmp, make = files
    assert run(["check-theorem", make("x.json", examples.intersecting_circles()), "--k0", "4"]) == 1


def test_seed_determinism(files):
    tmp, make = files
    d = make("a.json", examples.annulus())
    a, b = tmp / "a.jsonl", tmp / "b.jsonl"
    for p in (a, b):
        assert run(["lift", d, "--k0", "4", "--n-base", "900", "--seed", "5", "-o", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_errors(tmp_path, capsys):
    assert run([]) == 2
    assert run(["bogus"]) == 2
    assert run(["example", "chain"]) == 2
    assert run(["preeb", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["validate", str(bad)]) == 2


def test_math_errors_exit_1(files, capsys):
    tmp, make = files
    d = make("s.json", examples.stack(3, stagger=0.0))
    assert run(["preeb", d]) == 1
    assert "DegeneratePosition" in capsys.readouterr().err
    assert run(["lift", make("d.json", examples.unit_disk()), "--k0", "3"]) == 1


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "reeblift", "example", "chain", "--l", "2"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["k"] == 2
