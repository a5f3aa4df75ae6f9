"""Experiment configuration, sweep expansion, and result files.

Configs are YAML mappings (schema version 1).  A sweep runs one self-play per
(algorithm entry x eta x per-iteration LMO budget x averaging scheme); every
player runs the same learner, matching the benchmark protocol.  Omitted grids
fall back to the benchmark defaults: eta in 0.01 * 2^[1..14] and LMO budgets
{1, 2, 3, 4, 5, 10, 20, 100, 200}.

Result CSVs carry the columns

    iteration, avg_lmo_calls, metric, rvu_slack, stability_margin

with floats printed to 17 significant digits; files are written to a
temporary name and atomically renamed, so readers never observe partial
output.  A ``manifest.yaml`` echoes the fully resolved configuration, the
seed, and the status of every run file.

The environment variable ``PFGAMES_OUTPUT_DIR`` overrides the configured
output directory.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .learners import ALGORITHMS, LearnerConfig
from .selfplay import AVERAGING_SCHEMES, RunRecord

__all__ = [
    "ConfigError",
    "RunSpec",
    "ExperimentConfig",
    "load_config",
    "write_csv",
    "write_manifest",
    "OUTPUT_DIR_ENV",
]

OUTPUT_DIR_ENV = "PFGAMES_OUTPUT_DIR"

DEFAULT_ETA_GRID = tuple(0.01 * 2**k for k in range(1, 15))
DEFAULT_LMO_GRID = (1, 2, 3, 4, 5, 10, 20, 100, 200)

CSV_COLUMNS = ("iteration", "avg_lmo_calls", "metric", "rvu_slack", "stability_margin")


class ConfigError(Exception):
    """Invalid experiment configuration (exit code 1)."""


@dataclass(frozen=True)
class RunSpec:
    """One fully resolved self-play run."""

    name: str
    game: str
    game_params: tuple[tuple[str, object], ...]
    learner: LearnerConfig
    averaging: str
    restart: bool
    budget: float
    record_every: int | None
    seed: int


@dataclass
class ExperimentConfig:
    game: str
    runs: list[RunSpec]
    output_dir: Path
    plots: bool
    seed: int
    resolved: dict = field(default_factory=dict)


def _as_list(value) -> list:
    return value if isinstance(value, list) else [value]


def _fmt_eta(eta: float) -> str:
    return f"{eta:g}".replace(".", "p")


def load_config(path: str | os.PathLike, output_dir: str | None = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    if raw.get("schema", 1) != 1:
        raise ConfigError(f"unsupported schema version {raw.get('schema')!r}")

    unknown = set(raw) - {
        "schema", "game", "game_params", "seed", "budget", "record_every",
        "restart", "averaging", "algorithms", "output_dir", "plots",
    }
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    try:
        game = raw["game"]
    except KeyError:
        raise ConfigError("config requires a 'game'") from None
    game_params = raw.get("game_params") or {}
    if not isinstance(game_params, dict):
        raise ConfigError("game_params must be a mapping")
    seed = int(raw.get("seed", 0))
    budget = float(raw.get("budget", 10**4))
    if budget <= 0:
        raise ConfigError("budget must be positive")
    record_every = raw.get("record_every")
    if record_every is not None:
        record_every = int(record_every)
        if record_every < 1:
            raise ConfigError("record_every must be a positive count")
    restart = bool(raw.get("restart", False))
    averagings = _as_list(raw.get("averaging", "uniform"))
    for avg in averagings:
        if avg not in AVERAGING_SCHEMES:
            raise ConfigError(f"unknown averaging scheme {avg!r}")

    algo_entries = raw.get("algorithms")
    if not algo_entries:
        raise ConfigError("config requires at least one algorithms entry")

    runs: list[RunSpec] = []
    resolved_algos = []
    for entry in algo_entries:
        if not isinstance(entry, dict) or "algorithm" not in entry:
            raise ConfigError("each algorithms entry needs an 'algorithm' name")
        bad = set(entry) - {"algorithm", "eta", "max_lmo_per_iter", "eps", "warmstart"}
        if bad:
            raise ConfigError(f"unknown algorithm keys: {sorted(bad)}")
        name = entry["algorithm"]
        if name not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {name!r} (have {sorted(ALGORITHMS)})")
        etas = [float(e) for e in _as_list(entry.get("eta", list(DEFAULT_ETA_GRID)))]
        is_prox = name in ("fwromd", "fwomd")
        if is_prox:
            budgets = _as_list(entry.get("max_lmo_per_iter", list(DEFAULT_LMO_GRID)))
        else:
            budgets = [None]
        eps = entry.get("eps", "inverse_square")
        if eps != "inverse_square":
            eps = float(eps)
        warmstart = bool(entry.get("warmstart", True))
        resolved_algos.append(
            {"algorithm": name, "eta": etas, "max_lmo_per_iter": budgets,
             "eps": eps, "warmstart": warmstart}
        )
        for eta in etas:
            for m in budgets:
                if m is not None:
                    m = int(m)
                for avg in averagings:
                    mtag = f"m{m}" if m is not None else "meps"
                    rname = f"{game}__{name}__eta{_fmt_eta(eta)}__{mtag}__{avg}"
                    if restart:
                        rname += "__restart"
                    runs.append(
                        RunSpec(
                            name=rname,
                            game=game,
                            game_params=tuple(sorted(game_params.items())),
                            learner=LearnerConfig(
                                algorithm=name, eta=eta,
                                max_lmo_per_iter=m, eps=eps, warmstart=warmstart,
                            ),
                            averaging=avg,
                            restart=restart,
                            budget=budget,
                            record_every=record_every,
                            seed=seed,
                        )
                    )

    out = output_dir or os.environ.get(OUTPUT_DIR_ENV) or raw.get("output_dir") or "results"
    resolved = {
        "schema": 1,
        "game": game,
        "game_params": dict(game_params),
        "seed": seed,
        "budget": budget,
        "record_every": record_every,
        "restart": restart,
        "averaging": list(averagings),
        "algorithms": resolved_algos,
        "output_dir": str(out),
        "plots": bool(raw.get("plots", True)),
    }
    return ExperimentConfig(
        game=game,
        runs=runs,
        output_dir=Path(out),
        plots=bool(raw.get("plots", True)),
        seed=seed,
        resolved=resolved,
    )


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_cell(value) -> str:
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def write_csv(path: Path, records: list[RunRecord]) -> None:
    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        lines.append(
            ",".join(
                _csv_cell(v)
                for v in (r.iteration, r.avg_lmo_calls, r.metric, r.rvu_slack, r.stability_margin)
            )
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def write_manifest(path: Path, resolved: dict, run_statuses: list[dict]) -> None:
    doc = {"config": resolved, "runs": run_statuses}
    _atomic_write(path, yaml.safe_dump(doc, sort_keys=True))
