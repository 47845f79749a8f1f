"""Tests for the command-line front end."""
import csv
import json

import pytest

from lattice_mcts.cli.options import KEYS, flatten, parse_config_file, parse_target_shorthand, resolve
from lattice_mcts.config import settings
from lattice_mcts.errors import ConfigError
from lattice_mcts.main import main
from lattice_mcts.services.output import PROVENANCE_BANNER, RECORD_COLUMNS

RUN = ["run", "--grid", "6", "--target", "delta:3,3", "--mcts.loops", "10", "--trials", "5", "--seed", "42"]


def _data_lines(path):
    return [line for line in path.read_text().splitlines() if not line.startswith("#")]


def test_run_writes_records_summary_and_json(tmp_path):
    """Test the three output files of a run."""
    out = tmp_path / "run.csv"
    assert main(RUN + ["--output", str(out)]) == 0

    text = out.read_text()
    assert text.startswith(PROVENANCE_BANNER + "\n")
    assert "# run.seed=42" in text
    rows = list(csv.DictReader(_data_lines(out)))
    assert list(rows[0]) == RECORD_COLUMNS
    assert [int(r["trial"]) for r in rows] == list(range(5))
    assert all(r["strategy"] == "MCTS-RW" for r in rows)

    summary = list(csv.DictReader(_data_lines(tmp_path / "run.summary.csv")))
    assert len(summary) == 1
    assert summary[0]["experiment"] == "run"
    assert summary[0]["trials"] == "5"

    mirror = json.loads((tmp_path / "run.json").read_text())
    assert mirror["config"]["grid.size"] == "6"
    assert len(mirror["records"]) == 5
    assert "wall_ms" in mirror["records"][0]
    assert set(mirror["rows"][0]) >= {"mean_excess", "mean_ratio", "ci95", "base_seed"}


def test_run_is_byte_identical(tmp_path):
    """Test that the same invocation reproduces the record file exactly."""
    out = tmp_path / "out.csv"
    assert main(RUN + ["--output", str(out)]) == 0
    first = out.read_bytes()
    assert main(RUN + ["--output", str(out)]) == 0
    assert out.read_bytes() == first


def test_run_replays_from_provenance_header(tmp_path):
    """Test that an output file works as the config of its own rerun."""
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"
    assert main(RUN + ["--output", str(first)]) == 0
    assert main(["run", "--config", str(first), "--output", str(second)]) == 0
    assert _data_lines(first) == _data_lines(second)


def test_run_to_stdout(capsys):
    """Test records and summary on standard output when no path is given."""
    assert main(RUN) == 0
    out = capsys.readouterr().out
    assert out.startswith(PROVENANCE_BANNER)
    assert ",".join(RECORD_COLUMNS) in out
    assert "experiment,strategy,N,sigma" in out


def test_unknown_flag_names_key(capsys):
    """Test that an unknown dotted key fails with exit 2 and names the key."""
    assert main(RUN + ["--mcts.gamma", "1"]) == 2
    assert "mcts.gamma" in capsys.readouterr().err


def test_unknown_config_key_names_key_and_line(tmp_path, capsys):
    """Test config-file validation errors."""
    config = tmp_path / "bad.cfg"
    config.write_text("grid.size = 6\nmcts.gamma = 1\n")
    assert main(["run", "--config", str(config), "--target", "uniform"]) == 2
    err = capsys.readouterr().err
    assert "mcts.gamma" in err and "line 2" in err


def test_invalid_value_names_key(capsys):
    """Test that a value failing validation is reported against its key."""
    assert main(RUN + ["--mcts.c", "-1"]) == 2
    assert "mcts.c" in capsys.readouterr().err
    assert main(RUN + ["--grid.vision", "-1"]) == 2
    assert "grid.vision" in capsys.readouterr().err


def test_missing_required_key(capsys):
    """Test that run needs a grid size and a target."""
    assert main(["run", "--target", "uniform"]) == 2
    assert "grid.size" in capsys.readouterr().err


def test_strict_mode_exit_on_cap(monkeypatch, tmp_path):
    """Test exit 4 when a trial is capped and --strict is set."""
    monkeypatch.setattr(settings, "baseline_cap", 1)
    args = [
        "run",
        "--grid", "9",
        "--target", "delta:5,5",
        "--run.strategy", "baseline",
        "--trials", "2",
        "--output", str(tmp_path / "capped.csv"),
    ]
    assert main(args) == 0
    assert main(args + ["--strict"]) == 4


def test_unwritable_output_is_io_error(tmp_path):
    """Test exit 3 when the output path cannot be written."""
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(RUN + ["--output", str(blocker / "out.csv")]) == 3


def test_help_lists_every_key(capsys, monkeypatch):
    """Test that subcommand help shows every registry key."""
    monkeypatch.setenv("COLUMNS", "200")
    for command in ("run", "figure"):
        assert main([command, "--help"]) == 0
        out = capsys.readouterr().out
        for key in KEYS:
            assert f"--{key.name}" in out
    assert "(default: 40)" in out


def test_target_shorthand():
    """Test the --target forms."""
    assert parse_target_shorthand("delta:3,4") == {"target.kind": "delta", "target.x": "3", "target.y": "4"}
    assert parse_target_shorthand("gaussian:2.5") == {"target.kind": "gaussian", "target.sigma": "2.5"}
    assert parse_target_shorthand("gaussian:2,5,6")["target.y"] == "6"
    assert parse_target_shorthand("uniform") == {"target.kind": "uniform"}
    with pytest.raises(ConfigError):
        parse_target_shorthand("delta:3")


def test_config_round_trip(tmp_path):
    """Test that flatten and parse_config_file reproduce a resolved configuration."""
    config = tmp_path / "run.cfg"
    config.write_text(
        "# a comment\n"
        "grid.size = 12\n"
        "grid.vision = 1\n"
        "target.kind = gaussian  # trailing comment\n"
        "target.sigma = 2.5\n"
        "policy.kind = levy\n"
        "mcts.time_budget_ms = 20\n"
    )
    run = resolve(parse_config_file(config))
    assert run.target.x == 6.0
    assert run.mcts.loops is None
    assert run.mcts.time_budget_ms == 20.0

    flat = flatten(run)
    again = tmp_path / "again.cfg"
    again.write_text("".join(f"{k}={v}\n" for k, v in flat.items()))
    assert resolve(parse_config_file(again)) == run


def test_figure_histogram(tmp_path):
    """Test a 40 x 40 histogram of 10^4 sigma=5 targets."""
    out = tmp_path / "hist.csv"
    assert main(["figure", "target-histogram", "--sigma", "5", "--output", str(out)]) == 0
    lines = _data_lines(out)
    assert len(lines) == 40
    grid = [[int(v) for v in line.split(",")] for line in lines]
    assert all(len(row) == 40 for row in grid)
    assert sum(map(sum, grid)) == 10_000


def test_histogram_alias_matches_figure(tmp_path):
    """Test that `histogram` is `figure target-histogram`."""
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ["--grid", "10", "--sigma", "2", "--scale", "0.05"]
    assert main(["figure", "target-histogram", *common, "--output", str(a)]) == 0
    assert main(["histogram", *common, "--output", str(b)]) == 0
    assert _data_lines(a) == _data_lines(b)
    assert sum(int(v) for line in _data_lines(a) for v in line.split(",")) == 500


def test_figure_delta_compare_small(tmp_path):
    """Test a scaled-down delta comparison with every strategy row."""
    out = tmp_path / "delta.csv"
    args = ["figure", "delta-compare", "--grid", "6", "--mcts.loops", "6", "--scale", "0.003", "--output", str(out)]
    assert main(args) == 0
    rows = list(csv.DictReader(_data_lines(out)))
    assert [r["strategy"] for r in rows] == ["MCTS-RW", "MCTS-LFS", "RW", "LFS", "NSARW"]
    assert all(r["trials"] == "3" for r in rows)
    assert (tmp_path / "delta.json").exists()


def test_figure_time_budget_replaces_preset_loops(tmp_path):
    """Test that a per-decision time budget overrides the preset loop count."""
    out = tmp_path / "timed.csv"
    args = [
        "figure", "delta-compare",
        "--grid", "6",
        "--mcts.time_budget_ms", "1",
        "--scale", "0.002",
        "--output", str(out),
    ]
    assert main(args) == 0
    text = out.read_text()
    assert "# mcts.loops=\n" in text
    assert "# mcts.time_budget_ms=1\n" in text
    rows = list(csv.DictReader(_data_lines(out)))
    assert rows[0]["loops"] == ""
    assert float(rows[0]["time_ms"]) == 1.0


def test_flag_budget_replaces_config_budget(tmp_path):
    """Test that a budget flag wins over the other budget set in a config file."""
    config = tmp_path / "loops.cfg"
    config.write_text("grid.size = 6\ntarget.kind = uniform\nmcts.loops = 50\nrun.trials = 2\n")
    out = tmp_path / "out.csv"
    assert main(["run", "--config", str(config), "--mcts.time_budget_ms", "1", "--output", str(out)]) == 0
    assert "# mcts.loops=\n" in out.read_text()
    assert main(["run", "--config", str(config), "--mcts.loops", "7", "--output", str(out)]) == 0
    assert "# mcts.loops=7\n" in out.read_text()


def test_figure_nsarw_visits(tmp_path):
    """Test the visit-count grid of one NSARW search."""
    out = tmp_path / "visits.csv"
    assert main(["figure", "nsarw-visits", "--grid", "8", "--output", str(out)]) == 0
    counts = [int(v) for line in _data_lines(out) for v in line.split(",")]
    assert len(counts) == 64
    assert sum(counts) >= 1


def test_figure_rejects_bad_scale(capsys):
    """Test that --scale must be positive."""
    assert main(["figure", "uniform-compare", "--scale", "0"]) == 2
