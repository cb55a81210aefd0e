import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from catenum.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main, poly_records
from catenum.feynman import VertexTensor, load_library, save_library
from catenum.mixed_complex import load_complex
from catenum.superpoly import add

SRC = str(Path(__file__).resolve().parents[1] / "src")


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), stream=buf)
    return code, buf.getvalue().splitlines()


def run_json(*argv):
    code, lines = run("--format", "json", *argv)
    return code, [json.loads(x) for x in lines]


def fixture_dir(tmp_path, kind="random", **opts):
    extra = []
    for k, v in opts.items():
        extra += [f"--{k}", str(v)]
    code, _ = run("fixture", kind, "--out", str(tmp_path), *extra)
    assert code == EXIT_OK
    return {
        "complex": str(tmp_path / "complex.json"),
        "splitting": str(tmp_path / "splitting.json"),
        "library": str(tmp_path / "library.jsonl")}


def files_args(paths):
    return ["--complex", paths["complex"], "--splitting", paths["splitting"], "--library", paths["library"]]


# -- graphs ---------------------------------------------------------------------------------

def test_graphs_012():
    code, recs = run_json("graphs", "--g", "0", "--k", "1", "--l", "2")
    assert code == EXIT_OK
    classes = [r for r in recs if r["kind"] == "class"]
    assert [r["weight"] for r in classes] == ["1/2"]


def test_graphs_111():
    code, recs = run_json("graphs", "--g", "1", "--k", "1", "--l", "1")
    weights = sorted(r["weight"] for r in recs if r["kind"] == "class")
    assert weights == ["1", "1", "1/2", "1/2", "1/2", "1/2"]
    assert recs[-1] == {"kind": "total", "classes": 6, "weight_sum": "4"}


def test_graphs_unstable_type_is_empty():
    code, lines = run("graphs", "--g", "0", "--k", "1", "--l", "1")
    assert code == EXIT_OK and lines == ["total: 0 classes, weight sum 0"]


def test_graphs_invalid_type():
    code, lines = run("graphs", "--g", "0", "--k", "0", "--l", "3")
    assert code == EXIT_INPUT and lines[0].startswith("error:")


# -- check ---------------------------------------------------------------------------------------

@pytest.mark.parametrize("name,extra", [("comb", ["--max", "12"]), ("aut", ["--max", "5"]),
                                        ("homotopy", ["--trials", "5"]), ("kinv", ["--trials", "2", "--m", "2"])])
def test_check_passes(name, extra):
    code, lines = run("check", name, *extra)
    assert code == EXIT_OK
    assert lines[-1].startswith(f"{name}: ")
    done, total = lines[-1].split()[1].split("/")
    assert done == total


# -- evaluate -----------------------------------------------------------------------------------

def test_evaluate_03_ledger(tmp_path):
    paths = fixture_dir(tmp_path, **{"lambda": 2, "seed": 3})
    code, recs = run_json("evaluate", *files_args(paths), "--g", "0", "--n", "3", "-v")
    assert code == EXIT_OK
    ledger = [r for r in recs if r["kind"] == "ledger"]
    assert [r["weight"] for r in ledger] == ["1/2"]
    assert any(r["kind"] == "F" for r in recs)


def test_evaluate_12_ledger(tmp_path):
    paths = fixture_dir(tmp_path, **{"lambda": 2, "seed": 4})
    code, recs = run_json("evaluate", *files_args(paths), "--g", "1", "--n", "2", "-v")
    assert code == EXIT_OK
    weights = sorted(r["weight"] for r in recs if r["kind"] == "ledger")
    assert weights == ["1", "1", "1/2", "1/2", "1/2", "1/2"]


def test_trivial_fixture_returns_vertex_tensor(tmp_path):
    paths = fixture_dir(tmp_path, "trivial", **{"lambda": 2, "seed": 5, "dim": 3})
    c = load_complex(paths["complex"])
    lib = load_library(c, paths["library"])
    expect = poly_records(c, lib[(1, 1, 0)].poly)
    assert expect
    code, recs = run_json("evaluate", *files_args(paths), "--g", "1", "--n", "1")
    got = [{k: v for k, v in r.items() if k not in ("kind", "g", "n")} for r in recs if r["kind"] == "iotaF"]
    assert code == EXIT_OK and got == expect


def test_missing_vertex_keys(tmp_path):
    paths = fixture_dir(tmp_path, **{"lambda": 1, "seed": 6})
    code, lines = run("evaluate", *files_args(paths), "--g", "1", "--n", "2")
    assert code == EXIT_INPUT
    assert lines[0].startswith("missing vertex keys (g,k,l):") and "(1, 1, 1)" in lines[0]


def test_missing_file():
    code, lines = run("evaluate", "--complex", "/nonexistent/c.json", "--splitting", "x", "--library", "y",
                      "--g", "0", "--n", "3")
    assert code == EXIT_INPUT


# -- degree ---------------------------------------------------------------------------------------

def test_degree_default_fixture():
    code, recs = run_json("degree", "--d", "3", "--lambda", "2")
    assert code == EXIT_OK
    by_key = {(r["g"], r["n"]): r for r in recs if r["kind"] == "degree"}
    assert by_key[(0, 3)]["expected"] == 6 and by_key[(0, 3)]["passed"]


def test_degree_detects_corruption(tmp_path):
    paths = fixture_dir(tmp_path, "graded", **{"lambda": 2, "seed": 2})
    assert run("degree", *files_args(paths), "--lambda", "2")[0] == EXIT_OK
    c = load_complex(paths["complex"])
    lib = load_library(c, paths["library"])
    old = lib[(0, 1, 2)]
    lib[(0, 1, 2)] = VertexTensor(c, 0, 1, 2, _shift_degree(c, old.poly))
    save_library(lib, paths["library"])
    code, lines = run("degree", *files_args(paths), "--lambda", "2")
    assert code == EXIT_FAIL
    assert any(line.startswith("FAIL") for line in lines)


def _shift_degree(c, poly):
    """Add a copy of one monomial with an output swapped for a vector of another degree."""
    out = dict(poly)
    for mono, v in poly.items():
        for pos, gen in enumerate(mono):
            copy, kind, basis, upow = gen
            if kind != 2:
                continue
            for other in range(c.dim):
                if c.parity[other] == c.parity[basis] and c.degree[other] != c.degree[basis]:
                    new = list(mono)
                    new[pos] = (copy, kind, other, upow)
                    mono2 = c.algebra.monomial(new, v)
                    if mono2:
                        return add(out, mono2)
    raise AssertionError("no degree-changing substitution found")


# -- determinism -------------------------------------------------------------------------------

def _cli(args, threads):
    env = dict(os.environ, PYTHONPATH=SRC, CATENUM_THREADS=str(threads))
    res = subprocess.run([sys.executable, "-m", "catenum", "--format", "json", *args],
                         env=env, capture_output=True, check=False)
    return res.returncode, res.stdout


@pytest.mark.parametrize("args", [["graphs", "--g", "1", "--k", "1", "--l", "2"],
                                  ["check", "homotopy", "--trials", "8", "--seed", "7"],
                                  ["degree", "--lambda", "2", "--seed", "1"]])
def test_determinism_across_runs_and_threads(args):
    first = _cli(args, 1)
    assert first[0] == EXIT_OK and first[1]
    assert _cli(args, 1) == first
    assert _cli(args, 4) == first
