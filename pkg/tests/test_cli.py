"""End-to-end checks on the command-line client.

Each invocation goes through the real argument parser and the in-process
service, so these cover the full request path the installed entry point
takes.  The exit-code contract (0 ok / 1 usage / 2 data / 3 resource) is
pinned here.
"""

import json
import os

import pytest

from snapilp.cli import (
    EXIT_DATA,
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_USAGE,
    Client,
    CliError,
    main,
)
from snapilp.logic import ResourceLimitError
from snapilp.report import RESULT_COLUMNS


def run_cli(capsys, argv):
    """Invoke main() and collect (exit_code, stdout, stderr)."""
    try:
        code = main(argv)
    except SystemExit as e:  # argparse bails out this way
        code = e.code if isinstance(e.code, int) else EXIT_USAGE
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ------------------------------------------------------------ happy paths

def test_learn_grandparent(capsys):
    code, out, _ = run_cli(
        capsys, ["learn", "--task", "grandparent", "--timeout", "10"])
    assert code == EXIT_OK
    body = json.loads(out)
    assert body["hypothesis"].strip() == "gp(A,B):-parent(A,C),parent(C,B)."
    assert body["cost"]["values"] == [3]


def test_global_flags_accepted_before_subcommand(capsys):
    code, out, _ = run_cli(
        capsys, ["--timeout", "10", "learn", "--task", "grandparent"])
    assert code == EXIT_OK
    assert json.loads(out)["cost"]["fn"] == "mdl"


def test_ensemble_final_filter(capsys):
    code, out, _ = run_cli(capsys, [
        "ensemble", "--task", "grandparent", "--filter", "final",
        "--timeout", "10",
    ])
    assert code == EXIT_OK
    body = json.loads(out)
    assert body["pool_size"] == 1
    assert body["members"][0]["weight"] == 1.0


def test_bag_default_seeds(capsys):
    code, out, _ = run_cli(
        capsys, ["bag", "--task", "grandparent", "--timeout", "10"])
    assert code == EXIT_OK
    assert [m["seed"] for m in json.loads(out)["members"]] == [43, 44, 45]


def test_bench_csv_shape_and_determinism(capsys):
    argv = ["bench", "--tasks", "grandparent", "--seeds", "1,2",
            "--timeout", "10"]
    code, first, _ = run_cli(capsys, argv)
    assert code == EXIT_OK
    lines = first.strip().split("\n")
    assert lines[0] == ",".join(RESULT_COLUMNS)
    assert len(lines) == 3  # header + one row per seed
    assert lines[1].startswith("grandparent,mdl,")

    code, second, _ = run_cli(capsys, argv)
    assert code == EXIT_OK
    assert second == first


def test_bench_json_format(capsys):
    code, out, _ = run_cli(capsys, [
        "bench", "--tasks", "grandparent", "--format", "json",
        "--timeout", "10",
    ])
    assert code == EXIT_OK
    rows = json.loads(out)
    assert len(rows) == 1 and rows[0]["seed"] == 1


def test_bench_out_writes_file(capsys, tmp_path):
    dest = tmp_path / "rows.csv"
    code, out, _ = run_cli(capsys, [
        "bench", "--tasks", "grandparent", "--timeout", "10",
        "--out", str(dest),
    ])
    assert code == EXIT_OK
    assert out == ""
    assert dest.read_text().startswith(",".join(RESULT_COLUMNS))


def test_report_from_bench_json(capsys, tmp_path):
    rows_file = tmp_path / "rows.json"
    code, _, _ = run_cli(capsys, [
        "bench", "--tasks", "grandparent", "--format", "json",
        "--timeout", "10", "--out", str(rows_file),
    ])
    assert code == EXIT_OK

    code, out, _ = run_cli(
        capsys, ["report", "--rows", str(rows_file), "--format", "csv"])
    assert code == EXIT_OK
    assert out.startswith(",".join(RESULT_COLUMNS))

    # an object with a "rows" key works the same
    wrapped = tmp_path / "wrapped.json"
    wrapped.write_text(json.dumps({"rows": json.loads(rows_file.read_text())}))
    code, wrapped_out, _ = run_cli(
        capsys, ["report", "--rows", str(wrapped), "--format", "csv"])
    assert code == EXIT_OK
    assert wrapped_out == out


def test_sweep_alpha_points(capsys):
    code, out, _ = run_cli(capsys, [
        "sweep-alpha", "--tasks", "grandparent", "--alphas", "0.001,0.06",
        "--timeout", "10",
    ])
    assert code == EXIT_OK
    points = json.loads(out)["points"]
    assert [p["alpha"] for p in points] == [0.001, 0.06]


def test_export_tasks_and_learn_from_directory(capsys, tmp_path):
    code, out, _ = run_cli(capsys, [
        "export-tasks", "--dest", str(tmp_path), "--names", "grandparent",
    ])
    assert code == EXIT_OK
    task_dir = tmp_path / "grandparent"
    assert sorted(os.listdir(task_dir)) == ["bias.toml", "bk.pl", "exs.pl"]

    code, out, _ = run_cli(
        capsys, ["learn", "--task", str(task_dir), "--timeout", "10"])
    assert code == EXIT_OK
    assert json.loads(out)["task"] == "grandparent"


# ------------------------------------------------------------- exit codes

def test_usage_error_missing_required_flag(capsys):
    code, _, err = run_cli(capsys, ["learn"])
    assert code == EXIT_USAGE
    assert "--task" in err


def test_usage_error_unknown_subcommand(capsys):
    code, _, _ = run_cli(capsys, ["frobnicate"])
    assert code == EXIT_USAGE


def test_usage_error_bad_cost_choice(capsys):
    code, _, _ = run_cli(capsys, ["learn", "--task", "grandparent",
                                  "--cost", "nope"])
    assert code == EXIT_USAGE


def test_usage_error_bad_seed_list(capsys):
    code, _, _ = run_cli(capsys, ["bench", "--tasks", "grandparent",
                                  "--seeds", "1,x"])
    assert code == EXIT_USAGE


def test_data_error_unknown_task(capsys):
    code, _, err = run_cli(capsys, ["learn", "--task", "does-not-exist"])
    assert code == EXIT_DATA
    assert "unknown bundled task" in err


def test_data_error_incomplete_task_directory(capsys, tmp_path):
    partial = tmp_path / "partial"
    partial.mkdir()
    (partial / "bk.pl").write_text("parent(a,b).\n")
    (partial / "exs.pl").write_text("pos(gp(a,b)).\n")
    code, _, err = run_cli(capsys, ["learn", "--task", str(partial)])
    assert code == EXIT_DATA
    assert "bias.toml" in err


def test_data_error_unknown_export_name(capsys, tmp_path):
    code, _, err = run_cli(capsys, [
        "export-tasks", "--dest", str(tmp_path), "--names", "zzz",
    ])
    assert code == EXIT_DATA
    assert "unknown bundled task" in err


def test_data_error_report_bad_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(capsys, ["report", "--rows", str(bad)])
    assert code == EXIT_DATA
    assert "not valid JSON" in err


def test_data_error_report_missing_file(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, ["report", "--rows", str(tmp_path / "absent.json")])
    assert code == EXIT_DATA


def test_data_error_report_rows_not_a_list(capsys, tmp_path):
    scalar = tmp_path / "scalar.json"
    scalar.write_text("42")
    code, _, err = run_cli(capsys, ["report", "--rows", str(scalar)])
    assert code == EXIT_DATA


def test_data_error_report_missing_columns(capsys, tmp_path):
    rows = tmp_path / "rows.json"
    rows.write_text(json.dumps([{"task": "t"}]))
    code, _, err = run_cli(capsys, ["report", "--rows", str(rows)])
    assert code == EXIT_DATA
    assert "missing columns" in err


def test_resource_error_exit_code(capsys, monkeypatch):
    def blown(*args, **kwargs):
        raise ResourceLimitError("atom cap exceeded")

    monkeypatch.setattr("snapilp.service.search", blown)
    code, _, err = run_cli(capsys, ["learn", "--task", "grandparent"])
    assert code == EXIT_RESOURCE
    assert "atom cap" in err


# ------------------------------------------------- transport edge handling

class _FakeResponse:
    def __init__(self, status_code, body=None, text=""):
        self.status_code = status_code
        self._body = body
        self.text = text

    def json(self):
        if self._body is None:
            raise ValueError("no body")
        return self._body


def test_client_handle_maps_kinds():
    ok = Client._handle(_FakeResponse(200, {"fine": True}))
    assert ok == {"fine": True}

    with pytest.raises(CliError) as exc:
        Client._handle(_FakeResponse(
            400, {"error": {"kind": "data", "message": "bad task"}}))
    assert exc.value.code == EXIT_DATA

    with pytest.raises(CliError) as exc:
        Client._handle(_FakeResponse(
            400, {"error": {"kind": "resource", "message": "cap"}}))
    assert exc.value.code == EXIT_RESOURCE

    with pytest.raises(CliError) as exc:
        Client._handle(_FakeResponse(422, text="field required"))
    assert exc.value.code == EXIT_USAGE

    with pytest.raises(CliError) as exc:
        Client._handle(_FakeResponse(500, text="boom"))
    assert exc.value.code == EXIT_USAGE
