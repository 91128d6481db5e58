"""Command-line interface: argument handling, output, and exit codes."""

import pytest

from conftest import FIXTURES
from entitymatch.cli import main


def run_fixture(tmp_path, capsys, name="run"):
    out_dir = tmp_path / name
    exit_code = main([
        "run", "--config", str(FIXTURES / "config.yaml"), "--out-dir", str(out_dir),
    ])
    assert exit_code == 0
    return out_dir, capsys.readouterr().out


def test_run_command_prints_the_summary(tmp_path, capsys):
    out_dir, out = run_fixture(tmp_path, capsys)
    assert "cases:         63" in out
    assert "accepted:      56" in out
    assert "rejected:      4" in out
    assert "doubtful:      3 (enqueued: 3)" in out
    assert "registry hits: 2" in out
    assert str(out_dir) in out
    assert (out_dir / "report.json").exists()


def test_run_command_rejects_missing_config(tmp_path, capsys):
    exit_code = main(["run", "--config", str(tmp_path / "nope.yaml")])
    assert exit_code == 1
    assert "error:" in capsys.readouterr().err


def test_run_backend_override_changes_the_decider(tmp_path, capsys):
    out_dir = tmp_path / "run"
    exit_code = main([
        "run", "--config", str(FIXTURES / "config.yaml"),
        "--out-dir", str(out_dir), "--backend", "levenshtein",
    ])
    assert exit_code == 0
    import json

    report = json.loads((out_dir / "report.json").read_text(encoding="utf-8"))
    assert report["decider"] == "levenshtein"


def test_report_command_formats(tmp_path, capsys):
    out_dir, _ = run_fixture(tmp_path, capsys)

    assert main(["report", "--run-dir", str(out_dir)]) == 0
    delimited = capsys.readouterr().out
    assert delimited.splitlines()[0].startswith("Method,Accuracy,")
    assert any(line.startswith("resolution,") for line in delimited.splitlines())

    assert main(["report", "--run-dir", str(out_dir), "--format", "markdown"]) == 0
    markdown = capsys.readouterr().out
    assert markdown.startswith("| Method |")


def test_report_command_without_metrics(tmp_path, capsys):
    bare = tmp_path / "bare"
    bare.mkdir()
    assert main(["report", "--run-dir", str(bare)]) == 1
    assert "no metrics" in capsys.readouterr().err


def test_review_list_and_decide_and_reprocess(tmp_path, capsys):
    out_dir, _ = run_fixture(tmp_path, capsys)

    assert main(["review", "list", "--run-dir", str(out_dir)]) == 0
    listing = capsys.readouterr().out
    assert "3 case(s)" in listing
    assert "GRANITOS DO MINHO LDA" in listing
    case_id = next(
        line.split()[0] for line in listing.splitlines() if "GRANITOS" in line
    )

    assert main([
        "review", "decide", "--run-dir", str(out_dir), "--case", case_id,
        "--decision", "Accepted", "--reviewer", "alice",
    ]) == 0
    decided = capsys.readouterr().out
    assert f"{case_id} -> Accepted code=PT" in decided

    assert main(["review", "list", "--run-dir", str(out_dir), "--status", "resolved"]) == 0
    assert "1 case(s)" in capsys.readouterr().out

    assert main([
        "review", "reprocess", "--run-dir", str(out_dir), "--case", case_id,
        "--reviewer", "bob",
    ]) == 0
    assert f"{case_id} -> pending" in capsys.readouterr().out

    assert main(["review", "list", "--run-dir", str(out_dir)]) == 0
    assert "3 case(s)" in capsys.readouterr().out


def test_review_decide_validations(tmp_path, capsys):
    out_dir, _ = run_fixture(tmp_path, capsys)
    assert main(["review", "list", "--run-dir", str(out_dir)]) == 0
    case_id = capsys.readouterr().out.split()[0]

    # rejecting without a reason fails cleanly
    assert main([
        "review", "decide", "--run-dir", str(out_dir), "--case", case_id,
        "--decision", "Rejected", "--reviewer", "alice",
    ]) == 1
    assert "reason" in capsys.readouterr().err

    # unknown reason kinds name the vocabulary
    assert main([
        "review", "decide", "--run-dir", str(out_dir), "--case", case_id,
        "--decision", "Rejected", "--reviewer", "alice", "--reason", "Vibes",
    ]) == 1
    err = capsys.readouterr().err
    assert "Vibes" in err and "NameMismatch" in err

    # unknown case id
    assert main([
        "review", "decide", "--run-dir", str(out_dir), "--case", "nope",
        "--decision", "Accepted", "--reviewer", "alice",
    ]) == 1
    assert "nope" in capsys.readouterr().err

    # a KIND:detail reason is parsed and recorded
    assert main([
        "review", "decide", "--run-dir", str(out_dir), "--case", case_id,
        "--decision", "Rejected", "--reviewer", "alice",
        "--reason", "Other:does not exist any more",
    ]) == 0
    assert "-> Rejected" in capsys.readouterr().out


def test_calibrate_command(tmp_path, capsys):
    assert main([
        "calibrate", "--input", str(FIXTURES / "dataset.csv"), "--metric", "levenshtein",
    ]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "threshold sweep for levenshtein (63 cases)"
    assert lines[1] == "threshold,accuracy,fpr"
    assert len(lines) == 22  # 20 thresholds
    assert lines[2].startswith("0.05,")
    assert lines[-1].startswith("1.00,")


def test_calibrate_rejects_unknown_metric(capsys):
    with pytest.raises(SystemExit):
        main(["calibrate", "--input", "x.csv", "--metric", "euclid"])


def test_missing_subcommand_exits_with_usage(capsys):
    with pytest.raises(SystemExit):
        main([])
    assert "usage:" in capsys.readouterr().err
