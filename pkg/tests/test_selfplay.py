"""Self-play loop: averaging, restarts, audits, budgets, determinism."""

from __future__ import annotations

import math

import numpy as np
import pytest

import pfgames.learners as learners_mod
from pfgames.learners import LearnerConfig
from pfgames.selfplay import (
    AVERAGING_SCHEMES,
    RestartState,
    SelfplayError,
    adaptive_restart_hook,
    averaging_weight,
    run_selfplay,
)


# -- averaging ------------------------------------------------------------------------


def test_averaging_weight_closed_forms():
    assert averaging_weight("uniform", 0) == 1.0
    assert averaging_weight("uniform", 4) == pytest.approx(1 / 5)
    assert averaging_weight("linear", 0) == 1.0
    assert averaging_weight("linear", 3) == pytest.approx(2 / 5)
    assert averaging_weight("quadratic", 0) == 1.0
    assert averaging_weight("quadratic", 1) == pytest.approx(4 / 5)
    assert averaging_weight("last", 17) == 1.0
    for scheme in AVERAGING_SCHEMES:
        for k in range(1000):
            w = averaging_weight(scheme, k)
            assert 0.0 < w <= 1.0
    with pytest.raises(ValueError, match="averaging"):
        averaging_weight("harmonic", 0)


def test_incremental_average_matches_weighted_mean():
    # f(k) telescopes into weights proportional to 1, t, t^2 over iterates
    rng = np.random.default_rng(3)
    xs = rng.normal(size=50)
    t = np.arange(1, 51, dtype=float)
    targets = {
        "uniform": xs.mean(),
        "linear": float((t * xs).sum() / t.sum()),
        "quadratic": float((t**2 * xs).sum() / (t**2).sum()),
        "last": xs[-1],
    }
    for scheme, want in targets.items():
        xbar = 0.0
        for k, x in enumerate(xs):
            xbar += averaging_weight(scheme, k) * (x - xbar)
        assert xbar == pytest.approx(want, abs=1e-12)


def test_adaptive_restart_hook_halving():
    state = RestartState(threshold=1.0)
    assert not adaptive_restart_hook(state, 0.6)
    assert (state.counter, state.restarts) == (1, 0)
    assert adaptive_restart_hook(state, 0.5)  # exactly half triggers
    assert (state.threshold, state.counter, state.restarts) == (0.5, 0, 1)
    assert not adaptive_restart_hook(state, 0.26)
    assert adaptive_restart_hook(state, 0.25)
    assert state.restarts == 2


# -- validation -----------------------------------------------------------------------


def test_config_count_mismatch(kuhn2p):
    cfgs = [LearnerConfig("fp", eta=0.0)] * 3
    with pytest.raises(ValueError, match="learner configs"):
        run_selfplay(kuhn2p, cfgs, budget_avg_lmo=10)


def test_unknown_averaging_rejected(kuhn2p):
    with pytest.raises(ValueError, match="averaging"):
        run_selfplay(kuhn2p, LearnerConfig("fp", eta=0.0), 10, averaging="mean")


def test_restart_requires_two_player_zero_sum(kuhn3p):
    with pytest.raises(ValueError, match="zero-sum"):
        run_selfplay(kuhn3p, LearnerConfig("fp", eta=0.0), 10, restart=True)


# -- audited frank-wolfe run ------------------------------------------------------------


@pytest.fixture(scope="module")
def fwromd_run(kuhn2p):
    cfg = LearnerConfig("fwromd", eta=0.25)
    return run_selfplay(
        kuhn2p, cfg, budget_avg_lmo=math.inf, max_iterations=300, record_every=1
    )


def test_rvu_slack_nonnegative(fwromd_run):
    assert all(rec.rvu_slack >= -1e-6 for rec in fwromd_run.records)


def test_stability_margin_nonpositive(fwromd_run):
    assert all(rec.stability_margin <= 1e-6 for rec in fwromd_run.records)


def test_uniform_average_gap_bound(kuhn2p, fwromd_run):
    # T * gap(average at T) stays below the regret-sum bound 2(Omega+2)/eta
    omega = max(p.diameter_squared() / 2.0 for p in kuhn2p.treeplexes)
    bound = 2.0 * (omega + 2.0) / 0.25
    assert fwromd_run.social_regret() <= bound
    for rec in fwromd_run.records:
        assert rec.iteration * rec.metric <= bound + 1e-9


def test_metric_and_lmo_monotonicity(fwromd_run, kuhn2p):
    recs = fwromd_run.records
    assert [r.iteration for r in recs] == list(range(1, 301))
    assert all(r.metric >= -1e-12 for r in recs)
    for a, b in zip(recs, recs[1:]):
        assert b.avg_lmo_calls > a.avg_lmo_calls
    for poly, xbar in zip(kuhn2p.treeplexes, fwromd_run.averaged):
        assert poly.feasibility_error(xbar) <= 1e-9


def test_audit_columns_nan_without_prox_learners(pennies):
    res = run_selfplay(pennies, LearnerConfig("fp", eta=0.0), math.inf, max_iterations=5)
    assert all(math.isnan(r.rvu_slack) for r in res.records)
    assert all(math.isnan(r.stability_margin) for r in res.records)


def test_budgeted_prox_has_stability_but_no_rvu(kuhn2p):
    cfg = LearnerConfig("fwomd", eta=1.28, max_lmo_per_iter=4)
    res = run_selfplay(kuhn2p, cfg, math.inf, max_iterations=20, record_every=5)
    assert all(math.isnan(r.rvu_slack) for r in res.records)
    assert all(math.isfinite(r.stability_margin) for r in res.records)


# -- dynamics -------------------------------------------------------------------------


def test_pennies_best_response_cycles(pennies):
    # last-iterate gap is stuck on the four-profile cycle while the uniform
    # average of the same play converges toward the mixed equilibrium
    last = run_selfplay(
        pennies, LearnerConfig("br", eta=0.0), math.inf,
        averaging="last", max_iterations=40, record_every=1,
    )
    assert all(rec.metric >= 0.4 for rec in last.records)
    avg = run_selfplay(
        pennies, LearnerConfig("br", eta=0.0), math.inf,
        averaging="uniform", max_iterations=40, record_every=1,
    )
    assert avg.records[-1].metric <= 0.05


def test_restart_run_reaches_halving(kuhn2p):
    res = run_selfplay(
        kuhn2p, LearnerConfig("fp", eta=0.0), math.inf,
        restart=True, max_iterations=400,
    )
    assert res.restart_state is not None
    assert res.restart_state.restarts >= 1
    # the threshold tracks the best averaged gap seen, so it only falls
    assert res.restart_state.threshold < res.records[0].metric


def test_three_players_force_uniform_averaging(kuhn3p):
    runs = [
        run_selfplay(kuhn3p, LearnerConfig("fp", eta=0.0), math.inf,
                     averaging=scheme, max_iterations=25)
        for scheme in ("quadratic", "uniform")
    ]
    for a, b in zip(runs[0].averaged, runs[1].averaged):
        assert np.array_equal(a, b)
    assert runs[0].records == runs[1].records


# -- accounting -----------------------------------------------------------------------


def test_leader_lmo_calls_track_iterations(kuhn2p):
    res = run_selfplay(kuhn2p, LearnerConfig("fp", eta=0.0), math.inf,
                       max_iterations=50, record_every=1)
    for rec in res.records:
        assert rec.lmo_calls == (rec.iteration, rec.iteration)
        assert rec.avg_lmo_calls == rec.iteration
    assert res.metric_lmo_calls >= 2 * len(res.records)


def test_prox_lmo_calls_respect_budget(kuhn2p):
    cfg = LearnerConfig("fwomd", eta=1.28, max_lmo_per_iter=4)
    res = run_selfplay(kuhn2p, cfg, math.inf, max_iterations=30, record_every=1)
    prev = (0, 0)
    for rec in res.records:
        for p in range(2):
            assert rec.lmo_calls[p] - prev[p] <= 4
        prev = rec.lmo_calls


def test_budget_stops_run(kuhn2p):
    res = run_selfplay(kuhn2p, LearnerConfig("fp", eta=0.0), budget_avg_lmo=100)
    assert res.records[-1].iteration == 100
    assert res.records[-1].avg_lmo_calls >= 100
    assert len(res.records) == 100  # default schedule records every t <= 1000


def test_default_record_schedule_goes_log_spaced(pennies):
    res = run_selfplay(pennies, LearnerConfig("fp", eta=0.0), math.inf,
                       max_iterations=1200)
    iters = [r.iteration for r in res.records]
    assert iters[:1000] == list(range(1, 1001))
    tail = iters[1000:]
    assert tail[0] == 1001 and tail[-1] == 1200
    for a, b in zip(tail, tail[1:]):
        assert b == max(a + 1, math.ceil(a * 1.05)) or b == 1200


def test_identical_arguments_reproduce_records(kuhn2p):
    kw = dict(budget_avg_lmo=math.inf, max_iterations=40, record_every=1, seed=123)
    cfg = LearnerConfig("ftpl", eta=0.5)
    a = run_selfplay(kuhn2p, cfg, **kw)
    b = run_selfplay(kuhn2p, cfg, **kw)
    assert a.records == b.records  # wall_clock excluded from comparison
    kw["seed"] = 124
    c = run_selfplay(kuhn2p, cfg, **kw)
    assert any(x != y for x, y in zip(a.records, c.records))


def test_players_get_distinct_noise_streams():
    from pfgames.selfplay import _player_seed

    assert len({_player_seed(0, i) for i in range(4)}) == 4
    assert _player_seed(7, 1) == int(
        np.random.SeedSequence([7, 1]).generate_state(1)[0]
    )


def test_learner_failure_carries_partial_records(kuhn2p, monkeypatch):
    real_apo = learners_mod.apo
    calls = [0]

    def bomb(*args, **kwargs):
        calls[0] += 1
        if calls[0] >= 15:
            raise RuntimeError("prox solve diverged")
        return real_apo(*args, **kwargs)

    monkeypatch.setattr(learners_mod, "apo", bomb)
    cfg = LearnerConfig("fwomd", eta=1.28, max_lmo_per_iter=1)
    with pytest.raises(SelfplayError, match="iteration 8") as info:
        run_selfplay(kuhn2p, cfg, math.inf, max_iterations=100, record_every=1)
    partial = info.value.partial
    assert [r.iteration for r in partial.records] == list(range(1, 8))
    assert len(partial.averaged) == 2
