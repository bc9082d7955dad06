import json
from fractions import Fraction

import pytest

from nnrank.cli import main
from nnrank.linalg import ExactMatrix, write_matrix
from nnrank.paperdata import EPSILON, Constraint, ConstraintTable, constants, figure4_constraints


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_verify_all_pass(capsys):
    code, rep = run_json(capsys, "verify")
    assert code == 0 and rep["status"] == "pass"
    ids = [c["id"] for c in rep["checks"]]
    assert len(ids) == 16
    assert ids[:8] == [f"certificate.{x}" for x in "abcdefgh"]
    assert "replay.type4" in ids and "exclusion.type2" in ids


def test_verify_mutation_fails(capsys):
    code, rep = run_json(capsys, "verify", "--mutate", "W:1,2:+1e-6")
    assert code == 1
    failed = {c["id"] for c in rep["checks"] if c["status"] == "fail"}
    assert "certificate.a" in failed
    a = next(c for c in rep["checks"] if c["id"] == "certificate.a")
    assert a["defect"].startswith("(1,2)")


def test_verify_relaxed_constraints(capsys, tmp_path):
    relaxed = ConstraintTable(tuple(
        Constraint(c.row, c.col, c.kind, Fraction(1, 10)) if c.kind == "le" and c.bound == EPSILON else c
        for c in figure4_constraints().entries
    ))
    path = tmp_path / "relaxed.csv"
    path.write_text(relaxed.to_csv())
    code, rep = run_json(capsys, "verify", "--constraints", str(path))
    assert code == 1
    assert {c["id"] for c in rep["checks"] if c["status"] == "fail"} >= {"replay.type4"}


def test_bad_mutation_is_error(capsys):
    code, rep = run_json(capsys, "verify", "--mutate", "Q:1,1:1")
    assert code == 2 and rep["status"] == "error"


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "dump")
    assert code == 0 and "# Weps" in out
    code, rep = run_json(capsys, "constants", "check")
    assert code == 0


def test_classify(capsys, tmp_path):
    path = tmp_path / "W.mat"
    write_matrix(path, constants().W)
    code, rep = run_json(capsys, "classify", "--matrix", str(path))
    assert code == 0
    assert rep["result"]["profile"]["type_tag"] == 1
    cols = ExactMatrix.identity(6).columns_subset(range(5))
    write_matrix(path, cols)
    _, rep = run_json(capsys, "classify", "--matrix", str(path))
    assert (rep["result"]["profile"]["k"], rep["result"]["profile"]["type_tag"]) == (3, 4)


def test_geometry(capsys):
    code, rep = run_json(capsys, "geometry", "--plane", "xy", "--start", "1/8")
    assert code == 0 and rep["result"]["support"]["vertex_count"] == 4
    code, rep = run_json(capsys, "geometry", "--plane", "xy", "--start", "2-1s")
    assert rep["result"]["support"]["vertex_count"] == 3
    code, rep = run_json(capsys, "geometry", "--plane", "xz", "--sweep", "0", "1", "5")
    assert [r["verdict"] for r in rep["result"]["sweep"]][:2] == ["three_vertices", "three_vertices"]


def test_geometry_bad_start_is_error(capsys):
    code, rep = run_json(capsys, "geometry", "--plane", "xy", "--start", "2")
    assert code == 2


def test_propagate(capsys):
    code, rep = run_json(capsys, "propagate")
    assert code == 0 and rep["result"]["proof"]["contradiction_in_all_branches"]
    code, rep = run_json(capsys, "propagate", "--mode", "fixpoint")
    assert code == 1 and rep["result"]["fixpoint"]["contradiction"] is None


def test_nmf_small(capsys):
    code, rep = run_json(capsys, "nmf", "--dim", "5", "--restarts", "2", "--max-iters", "50", "--compare-w")
    assert code == 0
    assert sorted(rep["result"]["alignment"]["permutation"]) == [0, 1, 2, 3, 4]


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2
