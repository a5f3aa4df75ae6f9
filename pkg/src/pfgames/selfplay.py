"""Self-play orchestration, iterate averaging, restarts, and theory audits.

Every iteration all players commit strategies simultaneously, observe the
loss gradients of the joint profile, and update.  Optimistic learners receive
the previous observed loss as the prediction of the upcoming one.

Convergence is reported on averaged strategies for 2-player zero-sum games
(duality gap) and as the maximum time-averaged external regret otherwise
(distance of the empirical play distribution from coarse correlated
equilibrium).  Gap and regret evaluations spend LMO calls of their own; those
are tracked separately and never count against the learning budget.

Weighted averaging follows the incremental rule ``xbar += f(k) (x - xbar)``
with k counting iterations since the last restart:

    uniform    f(k) = 1/(k+1)
    linear     f(k) = 2/(k+2)
    quadratic  f(k) = (6k+6)/((k+2)(2k+3))
    last       f(k) = 1

Adaptive restarting (2-player zero-sum only) halves a threshold: when the
averaged-profile gap drops to half the best seen, the averaging window and
counter reset.

Two per-player audits certify implementation health on Frank-Wolfe runs:

* RVU slack: regret minus its refined bound
  ``(Omega+2)/eta + eta * sum ||l^t - l^{t-1}||^2 - 1/(4 eta) sum ||x^{t+1}-x^t||^2``
  must be non-negative (the final path term of the bound is not yet
  observable at time T, so the audited bound omits it, which only loosens
  the bound).  Applies to optimistic prox learners with the inverse-square
  accuracy schedule; Omega is half the squared vertex diameter, exact on
  enumerable treeplexes.
* Stability margin: each step must satisfy
  ``||x^t - x^{t-1}|| <= 3 eta + sqrt(2 eta eps_t)`` where eps_t is the
  certified prox suboptimality (Wolfe-gap certificate, or the trivial
  diameter bound when a budgeted call produced no certificate).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .games.sequence_form import RegretTracker, SequenceFormGame, duality_gap, loss_gradient
from .learners import Learner, LearnerConfig, make_learner

__all__ = [
    "AVERAGING_SCHEMES",
    "RunRecord",
    "RestartState",
    "SelfplayError",
    "SelfplayResult",
    "run_selfplay",
    "averaging_weight",
    "adaptive_restart_hook",
]

AVERAGING_SCHEMES = ("uniform", "linear", "quadratic", "last")


def averaging_weight(scheme: str, k: int) -> float:
    """Incremental weight f(k) for the k-th update since the last restart."""
    if scheme == "uniform":
        return 1.0 / (k + 1)
    if scheme == "linear":
        return 2.0 / (k + 2)
    if scheme == "quadratic":
        return (6.0 * k + 6.0) / ((k + 2) * (2 * k + 3))
    if scheme == "last":
        return 1.0
    raise ValueError(f"unknown averaging scheme {scheme!r}")


@dataclass
class RestartState:
    threshold: float
    counter: int = 0
    restarts: int = 0


def adaptive_restart_hook(state: RestartState, gap: float) -> bool:
    """Restart once the gap halves; otherwise the counter keeps growing."""
    if gap <= state.threshold / 2.0:
        state.threshold = gap
        state.counter = 0
        state.restarts += 1
        return True
    state.counter += 1
    return False


@dataclass
class RunRecord:
    iteration: int
    lmo_calls: tuple[int, ...]
    avg_lmo_calls: float
    metric: float
    rvu_slack: float
    stability_margin: float
    wall_clock: float = field(compare=False, default=0.0)


@dataclass
class SelfplayResult:
    records: list[RunRecord]
    averaged: list[np.ndarray]
    last_profile: list[np.ndarray]
    learners: list[Learner]
    trackers: list[RegretTracker]
    restart_state: RestartState | None
    metric_lmo_calls: int

    def social_regret(self) -> float:
        return sum(tr.regret() for tr in self.trackers)


class SelfplayError(RuntimeError):
    """A learner failed mid-run; ``partial`` carries the records collected."""

    def __init__(self, message: str, partial: SelfplayResult):
        super().__init__(message)
        self.partial = partial


def _player_seed(master: int, player: int) -> int:
    return int(np.random.SeedSequence([master, player]).generate_state(1)[0])


def run_selfplay(
    game: SequenceFormGame,
    configs,
    budget_avg_lmo: float,
    averaging: str = "uniform",
    restart: bool = False,
    record_every: int | None = None,
    seed: int = 0,
    max_iterations: int | None = None,
) -> SelfplayResult:
    """Run simultaneous self-play until the average LMO budget is spent.

    ``configs`` is one LearnerConfig (replicated) or one per player.  Noise
    streams are derived per player from ``seed``; identical arguments yield
    identical records.
    """
    n = game.num_players
    if isinstance(configs, LearnerConfig):
        configs = [configs] * n
    if len(configs) != n:
        raise ValueError(f"need {n} learner configs, got {len(configs)}")
    if averaging not in AVERAGING_SCHEMES:
        raise ValueError(f"unknown averaging scheme {averaging!r}")
    two_player_zs = n == 2 and game.zero_sum
    if n >= 3:
        averaging = "uniform"
    if restart and not two_player_zs:
        raise ValueError("adaptive restarting applies to 2-player zero-sum games only")

    learners: list[Learner] = []
    for i, cfg in enumerate(configs):
        cfg = LearnerConfig(
            algorithm=cfg.algorithm, eta=cfg.eta, max_lmo_per_iter=cfg.max_lmo_per_iter,
            eps=cfg.eps, warmstart=cfg.warmstart, seed=_player_seed(seed, i),
        )
        learners.append(make_learner(game.treeplexes[i], cfg))

    averaged = [p.uniform_point() for p in game.treeplexes]
    prev_strategy = [p.uniform_point() for p in game.treeplexes]
    trackers = [RegretTracker(p) for p in game.treeplexes]
    metric_lmo = [0]

    def gap_metric() -> float:
        metric_lmo[0] += 2
        return duality_gap(game, averaged)

    def regret_metric() -> float:
        metric_lmo[0] += n
        return max(tr.average_regret() for tr in trackers)

    # Audit accumulators (Frank-Wolfe learners only).
    prox_players = [i for i, c in enumerate(configs) if c.algorithm in ("fwromd", "fwomd")]
    rvu_players = [
        i for i in prox_players
        if configs[i].algorithm == "fwromd"
        and configs[i].max_lmo_per_iter is None
        and configs[i].eps == "inverse_square"
    ]
    omega = {i: game.treeplexes[i].diameter_squared() / 2.0 for i in rvu_players}
    diam_sq = {i: game.treeplexes[i].diameter_squared() for i in prox_players}
    sum_dl2 = dict.fromkeys(rvu_players, 0.0)
    sum_dx2 = dict.fromkeys(rvu_players, 0.0)
    stability_worst = dict.fromkeys(prox_players, -math.inf)

    def rvu_slack_now() -> float:
        slack = math.inf
        for i in rvu_players:
            metric_lmo[0] += 1
            eta = configs[i].eta
            bound = (omega[i] + 2.0) / eta + eta * sum_dl2[i] - sum_dx2[i] / (4.0 * eta)
            slack = min(slack, bound - trackers[i].regret())
        return slack

    restart_state = None
    if restart:
        restart_state = RestartState(threshold=gap_metric())

    records: list[RunRecord] = []
    start = time.perf_counter()
    next_log_record = 1001
    t = 0

    def _result() -> SelfplayResult:
        return SelfplayResult(
            records=records,
            averaged=averaged,
            last_profile=list(prev_strategy),
            learners=learners,
            trackers=trackers,
            restart_state=restart_state,
            metric_lmo_calls=metric_lmo[0],
        )

    while True:
        t += 1
        profile = []
        try:
            for ln in learners:
                m = ln.last_loss if ln.optimistic else None
                profile.append(ln.next_strategy(m))
        except Exception as exc:
            raise SelfplayError(f"learner failure at iteration {t}: {exc}", _result()) from exc
        losses = [loss_gradient(game, i, profile) for i in range(n)]

        for i in prox_players:
            eta = configs[i].eta
            step = float(np.linalg.norm(profile[i] - prev_strategy[i]))
            eps_eff = min(learners[i].last_certificate, diam_sq[i] / (2.0 * eta))
            allowed = 3.0 * eta + math.sqrt(max(2.0 * eta * eps_eff, 0.0))
            stability_worst[i] = max(stability_worst[i], step - allowed)
        for i in rvu_players:
            sum_dl2[i] += float(np.linalg.norm(losses[i] - learners[i].last_loss) ** 2)
            if t >= 2:
                sum_dx2[i] += float(np.linalg.norm(profile[i] - prev_strategy[i]) ** 2)

        for i in range(n):
            trackers[i].update(profile[i], losses[i])
            learners[i].observe(losses[i])
            prev_strategy[i] = profile[i]

        w = averaging_weight(averaging, restart_state.counter if restart_state else t - 1)
        for i in range(n):
            averaged[i] = averaged[i] + w * (profile[i] - averaged[i])

        if restart_state is not None:
            adaptive_restart_hook(restart_state, gap_metric())

        avg_lmo = sum(ln.lmo_calls for ln in learners) / n
        done = avg_lmo >= budget_avg_lmo or (max_iterations is not None and t >= max_iterations)
        if record_every is not None:
            due = t % record_every == 0
        elif t <= 1000:
            due = True
        else:
            due = t >= next_log_record
        if due or done:
            if record_every is None and t >= next_log_record:
                next_log_record = max(t + 1, math.ceil(t * 1.05))
            metric = gap_metric() if two_player_zs else regret_metric()
            records.append(
                RunRecord(
                    iteration=t,
                    lmo_calls=tuple(ln.lmo_calls for ln in learners),
                    avg_lmo_calls=avg_lmo,
                    metric=metric,
                    rvu_slack=rvu_slack_now() if rvu_players else math.nan,
                    stability_margin=(
                        max(stability_worst[i] for i in prox_players)
                        if prox_players else math.nan
                    ),
                    wall_clock=time.perf_counter() - start,
                )
            )
        if done:
            break

    return _result()
