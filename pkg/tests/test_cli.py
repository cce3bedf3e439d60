"""Command-line behavior: outputs, schemas, exit codes."""

import json

from ednr import instance as inst
from ednr.cli import EXIT_BUDGET, EXIT_OK, EXIT_VALIDATION, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_grid_round_trips(capsys):
    code, out, _ = run(capsys, "gen", "grid", "--n", "3", "--m", "4")
    assert code == EXIT_OK
    parsed = inst.parse(out)
    assert parsed == inst.make_uniform_grid(3, 4)


def test_gen_random_is_seed_deterministic(capsys):
    _, first, _ = run(capsys, "gen", "random", "--vertices", "8", "--seed", "5")
    _, second, _ = run(capsys, "gen", "random", "--vertices", "8", "--seed", "5")
    assert first == second
    _, third, _ = run(capsys, "gen", "random", "--vertices", "8", "--seed", "6")
    assert first != third


def test_minmin_reports_loss(capsys):
    code, out, _ = run(capsys, "minmin", "--n", "7", "--m", "7")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["loss"] == 3246


def test_minmin_emits_tree_and_dot(tmp_path, capsys):
    tree_path = tmp_path / "tree.json"
    code, out, _ = run(
        capsys, "minmin", "--n", "3", "--m", "3", "--emit", str(tree_path)
    )
    assert code == EXIT_OK
    doc = json.loads(tree_path.read_text())
    assert doc["root"] == 0 and len(doc["parent"]) == 8
    dot_path = tmp_path / "tree.dot"
    run(capsys, "minmin", "--n", "3", "--m", "3", "--emit", str(dot_path))
    assert dot_path.read_text().startswith("graph network {")


def test_eval_round_trip(tmp_path, capsys):
    inst_path = tmp_path / "grid.json"
    tree_path = tmp_path / "tree.json"
    run(capsys, "gen", "grid", "--n", "3", "--m", "3", "--output", str(inst_path))
    run(capsys, "minmin", "--n", "3", "--m", "3", "--emit", str(tree_path))
    code, out, _ = run(
        capsys, "eval", "--input", str(inst_path), "--tree", str(tree_path)
    )
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["total"] == 52
    assert doc["per_level"] == [32, 14, 5, 1]


def test_spt(tmp_path, capsys):
    inst_path = tmp_path / "grid.json"
    run(capsys, "gen", "grid", "--n", "2", "--m", "2", "--output", str(inst_path))
    code, out, _ = run(capsys, "spt", "--input", str(inst_path))
    assert code == EXIT_OK
    assert json.loads(out)["loss"] == 6


def test_exact_optimal(tmp_path, capsys):
    inst_path = tmp_path / "grid.json"
    run(capsys, "gen", "grid", "--n", "3", "--m", "3", "--output", str(inst_path))
    code, out, _ = run(capsys, "exact", "--input", str(inst_path))
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["best_loss"] == 52 and doc["status"] == "optimal"


def test_exact_budget_exhausted_exit_code(tmp_path, capsys):
    inst_path = tmp_path / "grid.json"
    run(capsys, "gen", "grid", "--n", "4", "--m", "4", "--output", str(inst_path))
    code, out, _ = run(
        capsys, "exact", "--input", str(inst_path), "--budget-nodes", "10"
    )
    assert code == EXIT_BUDGET
    assert json.loads(out)["status"] == "budget_exhausted"


def test_bound(capsys):
    code, out, _ = run(capsys, "bound", "--n", "2", "--m", "2")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["sum_bound"] == "9/2"


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "--n", "3", "--m", "3")
    assert code == EXIT_OK
    assert json.loads(out)["ratio_upper"] == "13/11"


def test_bauer(capsys):
    code, out, _ = run(capsys, "bauer", "--t", "3", "--c", "12")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["brute_max"] == "54" and doc["tight"] is True


def test_reduce_partition_stdout(capsys):
    code, out, _ = run(capsys, "reduce", "partition", "--a", "1,2,5")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["threshold"] == "32"
    assert doc["instance"]["grid"] == {"n": 3, "m": 4}


def test_reduce_partition_files(tmp_path, capsys):
    out_path = tmp_path / "inst.json"
    code, _, _ = run(
        capsys, "reduce", "partition", "--a", "1,2", "--output", str(out_path)
    )
    assert code == EXIT_OK
    parsed = inst.parse(out_path.read_text())
    assert parsed.grid_shape == (3, 3)
    meta = json.loads((tmp_path / "inst.json.meta.json").read_text())
    assert meta["threshold"] == "9/2"


def test_reduce_3partition(capsys):
    code, out, _ = run(
        capsys, "reduce", "3partition", "--n", "1", "--a", "1,1,1", "--W", "1"
    )
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["threshold"] == 9
    assert doc["params"] == {"W": 1, "R_inf": 28}
    assert doc["instance"]["grid"] == {"n": 7, "m": 5}


def test_reduce_3partition_window_violation(capsys):
    code, _, err = run(capsys, "reduce", "3partition", "--n", "1", "--a", "1,1,2")
    assert code == EXIT_VALIDATION
    assert "window" in err


def test_bench_markdown(capsys):
    code, out, _ = run(capsys, "bench", "table1", "--max-n", "3")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].startswith("| n | Optimal loss |")
    assert "| 2 | 6 | 6 |" in out
    assert "| 3 | 52 | 52 |" in out


def test_bench_csv(capsys):
    code, out, _ = run(capsys, "bench", "table1", "--max-n", "2", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "n,optimal_loss,minmin_loss,status"
    assert "2,6,6,optimal" in out


def test_render(tmp_path, capsys):
    inst_path = tmp_path / "grid.json"
    run(capsys, "gen", "grid", "--n", "2", "--m", "2", "--output", str(inst_path))
    code, out, _ = run(capsys, "render", "--input", str(inst_path))
    assert code == EXIT_OK
    assert out.startswith("graph network {")


def test_malformed_instance_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope")
    code, _, err = run(capsys, "exact", "--input", str(bad))
    assert code == EXIT_VALIDATION
    assert "error" in err


def test_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "exact", "--input", str(tmp_path / "none.json"))
    assert code == EXIT_VALIDATION
    assert "cannot read" in err


def test_usage_error(capsys):
    assert main(["minmin", "--n", "3"]) == EXIT_VALIDATION


def test_invalid_shape_is_validation_error(capsys):
    code, _, err = run(capsys, "minmin", "--n", "1", "--m", "3")
    assert code == EXIT_VALIDATION
    assert "error" in err
