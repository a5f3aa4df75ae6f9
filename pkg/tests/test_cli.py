"""Config loading, sweep expansion, result files, and the CLI entry point."""

from __future__ import annotations

import math
import textwrap

import pytest
import yaml

import pfgames.cli as cli
from pfgames.config import (
    CSV_COLUMNS,
    DEFAULT_ETA_GRID,
    DEFAULT_LMO_GRID,
    OUTPUT_DIR_ENV,
    ConfigError,
    load_config,
    write_csv,
)
from pfgames.selfplay import RunRecord, SelfplayError, SelfplayResult


def write_yaml(tmp_path, text, name="config.yaml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return str(path)


SMALL_CONFIG = """\
game: matching_pennies
seed: 3
budget: 60
record_every: 10
averaging: uniform
algorithms:
  - algorithm: ftpl
    eta: 0.05
"""


# -- config loading --------------------------------------------------------------------


def test_sweep_expansion_counts(tmp_path):
    cfg = write_yaml(
        tmp_path,
        """\
        game: kuhn2p
        averaging: [uniform, last]
        algorithms:
          - algorithm: fwomd
            eta: [0.02, 0.04]
            max_lmo_per_iter: [1, 2]
          - algorithm: fp
            eta: 0.0
        """,
    )
    config = load_config(cfg)
    assert len(config.runs) == 2 * 2 * 2 + 1 * 1 * 2
    names = {r.name for r in config.runs}
    assert "kuhn2p__fwomd__eta0p02__m1__uniform" in names
    assert "kuhn2p__fp__eta0__meps__last" in names
    assert len(names) == len(config.runs)


def test_default_grids_fill_omitted_fields(tmp_path):
    cfg = write_yaml(tmp_path, "game: kuhn2p\nalgorithms:\n  - algorithm: fwomd\n")
    config = load_config(cfg)
    assert len(config.runs) == len(DEFAULT_ETA_GRID) * len(DEFAULT_LMO_GRID)
    spec = config.runs[0]
    assert spec.budget == 1e4 and spec.seed == 0 and spec.averaging == "uniform"
    assert spec.learner.eps == "inverse_square" and spec.learner.warmstart


def test_game_params_forwarded_sorted(tmp_path):
    cfg = write_yaml(
        tmp_path,
        """\
        game: leduc
        game_params: {raise_cap: 1, num_ranks: 3}
        algorithms: [{algorithm: fp, eta: 0.0}]
        """,
    )
    spec = load_config(cfg).runs[0]
    assert spec.game_params == (("num_ranks", 3), ("raise_cap", 1))


@pytest.mark.parametrize(
    "body,message",
    [
        ("game: kuhn2p\nextra: 1\nalgorithms: [{algorithm: fp}]", "unknown config keys"),
        ("algorithms: [{algorithm: fp}]", "requires a 'game'"),
        ("game: kuhn2p", "algorithms entry"),
        ("game: kuhn2p\nalgorithms: [{algorithm: cfr}]", "unknown algorithm"),
        ("game: kuhn2p\nalgorithms: [{algorithm: fp, step: 2}]", "unknown algorithm keys"),
        ("game: kuhn2p\nbudget: 0\nalgorithms: [{algorithm: fp}]", "budget"),
        ("game: kuhn2p\nrecord_every: 0\nalgorithms: [{algorithm: fp}]", "record_every"),
        ("game: kuhn2p\naveraging: mean\nalgorithms: [{algorithm: fp}]", "averaging"),
        ("schema: 2\ngame: kuhn2p\nalgorithms: [{algorithm: fp}]", "schema"),
        ("- just\n- a\n- list", "mapping"),
    ],
)
def test_config_rejections(tmp_path, body, message):
    cfg = write_yaml(tmp_path, body)
    with pytest.raises(ConfigError, match=message):
        load_config(cfg)


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.yaml")


def test_output_dir_precedence(tmp_path, monkeypatch):
    cfg = write_yaml(
        tmp_path, "game: kuhn2p\noutput_dir: from_config\nalgorithms: [{algorithm: fp}]"
    )
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
    assert str(load_config(cfg).output_dir) == "from_config"
    monkeypatch.setenv(OUTPUT_DIR_ENV, "from_env")
    assert str(load_config(cfg).output_dir) == "from_env"
    assert str(load_config(cfg, output_dir="from_arg").output_dir) == "from_arg"


# -- result files ----------------------------------------------------------------------


def sample_records():
    return [
        RunRecord(1, (1, 1), 1.0, 0.25, 3.5, -0.125, wall_clock=9.9),
        RunRecord(2, (2, 2), 2.0, 1 / 3, math.nan, math.nan),
    ]


def test_write_csv_format(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(path, sample_records())
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == "1,1,0.25,3.5,-0.125"
    cells = lines[2].split(",")
    assert cells[0] == "2"
    assert float(cells[2]) == 1 / 3  # 17 significant digits round-trip exactly
    assert cells[3] == "nan" and cells[4] == "nan"
    assert not list(tmp_path.glob("*.tmp"))  # atomic rename leaves no temp files


# -- cli: run --------------------------------------------------------------------------


def test_run_writes_csv_manifest_and_figure(tmp_path, capsys):
    cfg = write_yaml(tmp_path, SMALL_CONFIG)
    out = tmp_path / "results"
    rc = cli.main(["run", cfg, "--output-dir", str(out), "--workers", "1"])
    assert rc == 0
    csvs = sorted(out.glob("*.csv"))
    assert [p.name for p in csvs] == ["matching_pennies__ftpl__eta0p05__meps__uniform.csv"]
    body = csvs[0].read_text().splitlines()
    assert body[0] == ",".join(CSV_COLUMNS)
    assert len(body) == 1 + 6  # record_every=10, budget 60 LMO calls
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert manifest["config"]["game"] == "matching_pennies"
    (status,) = manifest["runs"]
    assert status["status"] == "complete" and status["iterations"] == 60
    assert (out / "convergence.png").exists()
    assert "[complete]" in capsys.readouterr().out


def test_run_no_plots(tmp_path):
    cfg = write_yaml(tmp_path, SMALL_CONFIG)
    out = tmp_path / "noplots"
    assert cli.main(["run", cfg, "--output-dir", str(out), "--no-plots", "--workers", "1"]) == 0
    assert not (out / "convergence.png").exists()


def test_rerun_is_byte_identical(tmp_path):
    cfg = write_yaml(tmp_path, SMALL_CONFIG)
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert cli.main(["run", cfg, "--output-dir", str(out), "--no-plots", "--workers", "1"]) == 0
    name = "matching_pennies__ftpl__eta0p05__meps__uniform.csv"
    assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_run_env_var_output_dir(tmp_path, monkeypatch):
    cfg = write_yaml(tmp_path, SMALL_CONFIG)
    out = tmp_path / "from_env"
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(out))
    assert cli.main(["run", cfg, "--no-plots", "--workers", "1"]) == 0
    assert (out / "manifest.yaml").exists()


def test_run_parallel_workers(tmp_path):
    cfg = write_yaml(
        tmp_path,
        """\
        game: matching_pennies
        budget: 50
        algorithms:
          - algorithm: fp
            eta: 0.0
          - algorithm: br
            eta: 0.0
        """,
    )
    out = tmp_path / "par"
    assert cli.main(["run", cfg, "--output-dir", str(out), "--no-plots", "--workers", "2"]) == 0
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert [s["status"] for s in manifest["runs"]] == ["complete", "complete"]
    assert len(list(out.glob("*.csv"))) == 2


def test_bad_config_exits_one(tmp_path, capsys):
    cfg = write_yaml(tmp_path, "game: kuhn2p\nwhoops: 1\nalgorithms: [{algorithm: fp}]")
    assert cli.main(["run", cfg]) == 1
    assert "config error" in capsys.readouterr().err


def test_run_failure_exits_two_and_flags_manifest(tmp_path, monkeypatch, capsys):
    cfg = write_yaml(tmp_path, SMALL_CONFIG)
    out = tmp_path / "boom"

    def explode(*args, **kwargs):
        raise RuntimeError("solver blew up")

    monkeypatch.setattr(cli, "run_selfplay", explode)
    assert cli.main(["run", cfg, "--output-dir", str(out), "--no-plots", "--workers", "1"]) == 2
    (status,) = yaml.safe_load((out / "manifest.yaml").read_text())["runs"]
    assert status["status"] == "failed"
    assert "solver blew up" in status["error"]
    assert not list(out.glob("*.csv"))


def test_partial_run_writes_partial_csv(tmp_path, monkeypatch):
    cfg = write_yaml(tmp_path, SMALL_CONFIG)
    out = tmp_path / "partial"
    partial = SelfplayResult(
        records=sample_records(), averaged=[], last_profile=[],
        learners=[], trackers=[], restart_state=None, metric_lmo_calls=0,
    )

    def interrupted(*args, **kwargs):
        raise SelfplayError("learner failure at iteration 3: diverged", partial)

    monkeypatch.setattr(cli, "run_selfplay", interrupted)
    assert cli.main(["run", cfg, "--output-dir", str(out), "--no-plots", "--workers", "1"]) == 2
    (status,) = yaml.safe_load((out / "manifest.yaml").read_text())["runs"]
    assert status["status"] == "partial"
    assert "iteration 3" in status["error"]
    saved = (out / status["file"]).read_text().splitlines()
    assert len(saved) == 1 + len(partial.records)


# -- cli: verify-fd and list-games -------------------------------------------------------


def test_verify_fd_ok(tmp_path, capsys):
    out = tmp_path / "fd"
    assert cli.main(["verify-fd", "--max-n", "3", "--output-dir", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "VIOLATION" not in printed
    report = (out / "fd_report.csv").read_text().splitlines()
    assert report[0] == "polytope,brute,closed_form,bound,status"
    names = [line.split(",")[0] for line in report[1:]]
    assert names == ["simplex2", "simplex3", "nested3x2", "kuhn2p_p1"]
    assert all(line.endswith(",ok") for line in report[1:])
    assert (out / "fd_verify.png").exists()


def test_verify_fd_violation_exits_three(monkeypatch, capsys):
    monkeypatch.setattr(cli, "lower_bound_vertex_form", lambda gamma, n, k=None: 10.0)
    assert cli.main(["verify-fd", "--max-n", "2"]) == 3
    assert "VIOLATION" in capsys.readouterr().out


def test_list_games(capsys):
    assert cli.main(["list-games"]) == 0
    printed = capsys.readouterr().out
    for game_id in ("kuhn2p", "kuhn3p", "leduc", "leduc1", "liars_dice_2p",
                    "liars_dice_3p", "goofspiel3", "matching_pennies"):
        assert game_id in printed
