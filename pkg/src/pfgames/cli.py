"""Command-line interface.

    pfgames run CONFIG [--workers N] [--output-dir DIR] [--no-plots]
    pfgames verify-fd [--max-n N] [--output-dir DIR]
    pfgames list-games

``run`` executes the sweep described by a YAML config, writing one CSV per
run plus ``manifest.yaml`` and a convergence figure into the output
directory.  ``verify-fd`` checks brute-force facial distances against the
closed form on simplices and the certified lower bounds on treeplex
fixtures.  Exit codes: 0 success, 1 configuration error, 2 runtime failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import (
    ConfigError,
    ExperimentConfig,
    RunSpec,
    load_config,
    write_csv,
    write_manifest,
)
from .facial import facial_distance_bruteforce, lower_bound_vertex_form
from .games import GAME_REGISTRY, load_sequence_form
from .selfplay import SelfplayError, run_selfplay
from .treeplex import DecisionPoint, TreeplexPolytope

__all__ = ["main"]

_GAME_CACHE: dict = {}


def _cached_game(game_id: str, params: tuple):
    key = (game_id, params)
    if key not in _GAME_CACHE:
        _GAME_CACHE[key] = load_sequence_form(game_id, **dict(params))
    return _GAME_CACHE[key]


def _execute_run(spec: RunSpec) -> dict:
    game = _cached_game(spec.game, spec.game_params)
    try:
        result = run_selfplay(
            game,
            spec.learner,
            budget_avg_lmo=spec.budget,
            averaging=spec.averaging,
            restart=spec.restart,
            record_every=spec.record_every,
            seed=spec.seed,
        )
    except SelfplayError as exc:
        return {
            "name": spec.name,
            "records": exc.partial.records,
            "status": "partial",
            "error": str(exc),
        }
    last = result.records[-1]
    return {
        "name": spec.name,
        "records": result.records,
        "status": "complete",
        "iterations": last.iteration,
        "final_metric": float(last.metric),
    }


def _run_command(args) -> int:
    config = load_config(args.config, output_dir=args.output_dir)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    statuses = []
    failed = False

    def handle(spec: RunSpec, outcome: dict | None, error: str | None) -> None:
        nonlocal failed
        entry = {"name": spec.name, "file": f"{spec.name}.csv"}
        if outcome is None:
            entry["status"] = "failed"
            entry["error"] = error
            failed = True
        else:
            write_csv(out / f"{spec.name}.csv", outcome["records"])
            entry["status"] = outcome["status"]
            if outcome["status"] == "complete":
                entry["iterations"] = outcome["iterations"]
                entry["final_metric"] = outcome["final_metric"]
            else:
                entry["error"] = outcome["error"]
                failed = True
        statuses.append(entry)
        print(f"[{entry['status']}] {spec.name}", flush=True)

    if args.workers > 1 and len(config.runs) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            futures = [(spec, pool.submit(_execute_run, spec)) for spec in config.runs]
            for spec, fut in futures:
                try:
                    handle(spec, fut.result(), None)
                except Exception:
                    handle(spec, None, traceback.format_exc(limit=4))
    else:
        for spec in config.runs:
            try:
                handle(spec, _execute_run(spec), None)
            except Exception:
                handle(spec, None, traceback.format_exc(limit=4))

    write_manifest(out / "manifest.yaml", config.resolved, statuses)
    if config.plots and not args.no_plots:
        from .plots import plot_convergence

        csvs = [out / s["file"] for s in statuses if s["status"] == "complete"]
        if csvs:
            plot_convergence(csvs, out / "convergence.png", title=config.game)
    return 2 if failed else 0


def _nested_fixture() -> TreeplexPolytope:
    """Depth-2 fixture: a 3-way choice, each branch owning a 2-way choice."""
    return TreeplexPolytope(
        10,
        [
            DecisionPoint(0, (1, 2, 3)),
            DecisionPoint(1, (4, 5)),
            DecisionPoint(2, (6, 7)),
            DecisionPoint(3, (8, 9)),
        ],
    )


def _verify_fd_command(args) -> int:
    rows = []
    for n in range(2, args.max_n + 1):
        poly = TreeplexPolytope.simplex(n)
        brute = facial_distance_bruteforce(poly)
        closed = math.sqrt(1.0 / (n // 2) + 1.0 / ((n + 1) // 2))
        bound = lower_bound_vertex_form(1.0, n)
        ok = abs(brute - closed) <= 1e-6 and brute >= bound - 1e-9
        rows.append(
            {"name": f"simplex{n}", "brute": brute, "closed": closed, "bound": bound, "ok": ok}
        )

    fixtures = [("nested3x2", _nested_fixture())]
    kuhn = load_sequence_form("kuhn2p")
    fixtures.append(("kuhn2p_p1", kuhn.treeplexes[1]))
    for name, poly in fixtures:
        brute = facial_distance_bruteforce(poly)
        bound = lower_bound_vertex_form(1.0, poly.num_sequences)
        ok = brute >= bound - 1e-9
        rows.append({"name": name, "brute": brute, "closed": None, "bound": bound, "ok": ok})

    header = f"{'polytope':<12} {'brute':>12} {'closed form':>12} {'bound':>12}  status"
    print(header)
    print("-" * len(header))
    lines = ["polytope,brute,closed_form,bound,status"]
    for r in rows:
        closed = f"{r['closed']:.8f}" if r["closed"] is not None else "-"
        status = "ok" if r["ok"] else "VIOLATION"
        print(f"{r['name']:<12} {r['brute']:>12.8f} {closed:>12} {r['bound']:>12.8f}  {status}")
        lines.append(
            f"{r['name']},{r['brute']:.17g},"
            f"{'' if r['closed'] is None else format(r['closed'], '.17g')},"
            f"{r['bound']:.17g},{status}"
        )

    if args.output_dir:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "fd_report.csv").write_text("\n".join(lines) + "\n")
        from .plots import plot_facial_distance

        plot_facial_distance(rows, out / "fd_verify.png")
    return 0 if all(r["ok"] for r in rows) else 3


def _list_games_command(_args) -> int:
    width = max(len(k) for k in GAME_REGISTRY)
    for game_id in sorted(GAME_REGISTRY):
        _, description = GAME_REGISTRY[game_id]
        print(f"{game_id:<{width}}  {description}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pfgames", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a sweep from a YAML config")
    run.add_argument("config")
    run.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    run.add_argument("--output-dir", default=None)
    run.add_argument("--no-plots", action="store_true")
    run.set_defaults(func=_run_command)

    fd = sub.add_parser("verify-fd", help="verify facial-distance bounds")
    fd.add_argument("--max-n", type=int, default=5)
    fd.add_argument("--output-dir", default=None)
    fd.set_defaults(func=_verify_fd_command)

    lg = sub.add_parser("list-games", help="list available game generators")
    lg.set_defaults(func=_list_games_command)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
