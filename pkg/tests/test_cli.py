import json
import subprocess
import sys

import pytest

from polyop.cli import main


@pytest.fixture
def write(tmp_path):
    def _write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_freemonad_count_on_binary_trees(capsys, write):
    poly = write("p.json", {"sample": "p_bin"})
    code, rep = run_json(capsys, "freemonad", poly, "--height", "2")
    assert code == 0
    assert rep["count"] == 11 and rep["chain_count"] == 11 and rep["agree"]


def test_output_is_deterministic(capsys, write):
    poly = write("p.json", {"sample": "two_colour"})
    first = run(capsys, "twist", poly, "--seed", "3", "--samples", "4")
    second = run(capsys, "twist", poly, "--seed", "3", "--samples", "4")
    assert first == second and first[0] == 0


def test_validate_and_eval(capsys, write):
    doc = {"I": 1, "E": 2, "B": 2, "J": 1, "s": [0, 0], "p": [1, 1], "t": [0, 0]}
    poly = write("p.json", doc)
    code, rep = run_json(capsys, "validate", poly)
    assert code == 0 and rep["valid"] and rep["arities"] == [0, 2]
    fam = write("x.json", {"sizes": [3]})
    code, rep = run_json(capsys, "eval", poly, fam)
    assert code == 0 and rep["sizes"] == [1 + 9]


def test_compose_reports_arities(capsys, write):
    p = write("p.json", {"sample": "p_unary"})
    code, rep = run_json(capsys, "compose", p, p)
    assert code == 0 and sorted(rep["arities"]) == [0, 0, 1]


def test_trees_and_wtype(capsys, write):
    code, rep = run_json(capsys, "trees", "--max-nodes", "2", "--max-arity", "2")
    assert code == 0 and rep["by_nodes"] == [[0, 1], [1, 3], [2, 6]]
    code, rep = run_json(capsys, "wtype", write("n.json", {"sample": "nilpotent"}))
    assert code == 0 and rep["stabilized"] and rep["sizes_by_colour"] == [1, 1]
    code, rep = run_json(capsys, "wtype", write("b.json", {"sample": "p_bin"}), "--max-iter", "3")
    assert code == 0 and not rep["stabilized"]


def test_laws_and_segal(capsys, write):
    maybe = write("m.json", {"sample": "maybe"})
    code, rep = run_json(capsys, "laws", maybe)
    assert code == 0 and rep["laws"]
    tree = write("t.json", {"kind": "tree", "nested": [[None]]})
    code, rep = run_json(capsys, "segal", maybe, "--tree", tree)
    assert code == 0 and rep["segal"]
    code, rep = run_json(capsys, "segal", maybe, "--to-monad", "1")
    assert code == 0 and rep["laws"]


def test_nerve_round_trips_through_segal(capsys, write, tmp_path):
    maybe = write("m.json", {"sample": "maybe"})
    out = str(tmp_path / "nerve.json")
    code, _ = run(capsys, "nerve", maybe, "--max-nodes", "2", "--max-arity", "1", "--output", out)
    assert code == 0
    code, rep = run_json(capsys, "segal", out)
    assert code == 0 and rep["segal"]


def test_omega_verbs(capsys, write):
    c2 = write("c2.json", {"kind": "tree", "nested": [None, None]})
    big = write("big.json", {"kind": "tree", "nested": [[None, None], None]})
    code, rep = run_json(capsys, "omega", "hom", c2, c2)
    assert code == 0 and rep["count"] == 2
    code, rep = run_json(capsys, "omega", "classify", c2, big, "--f", "[1, 2, 3]")
    assert code == 0 and rep["class"] == "inert"
    code, rep = run_json(capsys, "omega", "factorize", c2, big, "--f", "[1, 2, 3]")
    assert code == 0 and rep["recomposes"]


def test_species_verbs(capsys, write):
    e2 = write("e2.json", {"kind": "symseq", "B": [0, 0, 1]})
    code, rep = run_json(capsys, "card", e2, "--x", "2")
    assert code == 0 and rep["set"] == 3 and rep["groupoid"] == {"num": 2, "den": 1}
    code, rep = run_json(capsys, "egf", e2)
    assert code == 0 and rep["coefficients"][2] == {"num": 1, "den": 2}


def test_text_format(capsys, write):
    code, out = run(capsys, "freemonad", write("p.json", {"sample": "p_bin"}), "--height", "1", "--format", "text")
    assert code == 0
    assert "count: 3" in out.splitlines()


def test_property_failure_exits_1(capsys, write):
    # every composite goes to v, so u is not a unit
    doc = {
        "kind": "monad",
        "poly": {"I": 1, "E": ["xu", "xv"], "B": ["u", "v"], "J": 1, "s": [0, 0], "p": [0, 1], "t": [0, 0]},
        "unit": {"ops": [[0, "u"]], "inputs": [[0, "xu"]]},
        "mult": {
            "ops": [[["u", ["u"]], "v"], [["u", ["v"]], "v"], [["v", ["u"]], "v"], [["v", ["v"]], "v"]],
            "inputs": [[[c, [y], f, e], "xv"] for c, f in (("u", "xu"), ("v", "xv"))
                       for y, e in (("u", "xu"), ("v", "xv"))],
        },
    }
    code, rep = run_json(capsys, "laws", write("bad.json", doc))
    assert code == 1 and not rep["laws"]


def test_usage_errors_exit_2(capsys):
    code, rep = run_json(capsys, "freemonad", "x.json", "--max-height", "-1")
    assert code == 2 and rep["error"]["type"] == "usage"
    code, _ = run(capsys)
    assert code == 2
    code, _ = run(capsys, "frobnicate")
    assert code == 2


def test_input_errors_exit_3(capsys, write, tmp_path):
    code, rep = run_json(capsys, "validate", str(tmp_path / "missing.json"))
    assert code == 3 and rep["error"]["type"] == "input"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _ = run(capsys, "validate", str(bad))
    assert code == 3
    code, rep = run_json(capsys, "validate", write("p.json", {"I": 1, "E": 1, "B": 1, "J": 1,
                                                                "s": [0], "p": [4], "t": [0]}))
    assert code == 3 and "map p" in rep["error"]["message"]


def test_guard_exits_4(capsys, monkeypatch):
    monkeypatch.setenv("POLYOP_GUARD", "5")
    code, rep = run_json(capsys, "trees", "--max-nodes", "3", "--max-arity", "3")
    assert code == 4 and rep["error"]["type"] == "guard"
    monkeypatch.delenv("POLYOP_GUARD")
    code, _ = run(capsys, "trees", "--max-nodes", "3", "--max-arity", "3", "--guard", "5")
    assert code == 4


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "polyop", "trees", "--max-nodes", "1"],
                         capture_output=True, text=True, check=False)
    assert out.returncode == 0
    assert json.loads(out.stdout)["count"] == 4
