"""Projection-free no-regret learners over treeplexes.

All eight learners share one interface: ``next_strategy(prediction)`` returns
the strategy to commit this round, ``observe(loss)`` feeds back the realized
linear loss.  Optimistic variants use the supplied prediction of the upcoming
loss (self-play passes the previous observed loss); the others ignore it.

* ``fwromd`` / ``fwomd``: optimistic / plain online mirror descent with the
  Euclidean proximal step approximated by away-step Frank-Wolfe.  The prox
  call either runs to a Wolfe-gap accuracy schedule or spends a fixed budget
  of best-response (LMO) calls per round.
* ``ftpl`` / ``oftpl``: follow the perturbed leader; one LMO per round on the
  cumulative (plus predicted) loss minus Gumbel(0, eta) noise.  Noise uses
  the inverse-CDF transform ``-eta * log(-log(U))`` with uniforms from a
  seeded numpy PCG64 generator, so runs reproduce bit-for-bit across
  platforms; ``eta=0`` recovers the unperturbed leader exactly.
* ``fp`` / ``ofp``: fictitious play (follow the leader) and its optimistic
  variant; one LMO per round.
* ``br`` / ``obr``: best response to the last observed loss, optionally with
  the optimistic correction; one LMO per round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .afw import MaxLmoCalls, WolfeGap, apo
from .treeplex import TreeplexPolytope

__all__ = ["LearnerConfig", "Learner", "make_learner", "ALGORITHMS"]


@dataclass(frozen=True)
class LearnerConfig:
    algorithm: str
    eta: float
    max_lmo_per_iter: Optional[int] = None   # FW family: budget termination
    eps: object = "inverse_square"           # FW family: gap schedule (or fixed float)
    warmstart: bool = True                   # FW family: carry the active set over
    seed: int = 0                            # leader family: perturbation stream

    def eps_at(self, t: int) -> float:
        if self.eps == "inverse_square":
            return 1.0 / (t * t)
        return float(self.eps)


class Learner:
    """Shared state: step counter, last/cumulative losses, LMO accounting."""

    optimistic = False

    def __init__(self, polytope: TreeplexPolytope, config: LearnerConfig):
        self.polytope = polytope
        self.config = config
        n = polytope.num_sequences
        self.steps = 0
        self.last_loss = np.zeros(n)
        self.cumulative_loss = np.zeros(n)
        self.last_prediction = np.zeros(n)
        self.current = polytope.uniform_point()
        self.lmo_calls = 0
        # Certified prox suboptimality of the last strategy (FW family only).
        self.last_certificate = 0.0

    def next_strategy(self, prediction: Optional[np.ndarray] = None) -> np.ndarray:
        raise NotImplementedError

    def observe(self, loss: np.ndarray) -> None:
        loss = np.asarray(loss, dtype=float)
        self.cumulative_loss += loss
        self.last_loss = loss
        self.steps += 1

    def _prediction(self, prediction) -> np.ndarray:
        if prediction is None:
            return np.zeros(self.polytope.num_sequences)
        return np.asarray(prediction, dtype=float)


class _ProxLearner(Learner):
    """Online mirror descent with an approximate Euclidean prox oracle."""

    def __init__(self, polytope, config):
        super().__init__(polytope, config)
        self.active = None

    def next_strategy(self, prediction=None):
        t = self.steps + 1
        combo = self.last_loss.copy()
        if self.optimistic:
            m = self._prediction(prediction)
            combo += m - self.last_prediction
            self.last_prediction = m
        if self.config.max_lmo_per_iter is not None:
            termination = MaxLmoCalls(self.config.max_lmo_per_iter)
            requested = math.inf
        else:
            requested = self.config.eps_at(t)
            termination = WolfeGap(requested)
        warm = self.active if self.config.warmstart else None
        result = apo(combo, self.config.eta, self.current, self.polytope,
                     termination, warmstart=warm)
        self.active = result.active_set
        self.current = result.point
        self.lmo_calls += result.lmo_calls
        self.last_certificate = min(result.wolfe_gap, requested)
        return self.current


class FwRomd(_ProxLearner):
    optimistic = True


class FwOmd(_ProxLearner):
    optimistic = False


class _LeaderLearner(Learner):
    """lmo on cumulative loss, optionally predicted and perturbed."""

    noisy = False

    def __init__(self, polytope, config):
        super().__init__(polytope, config)
        self._rng = np.random.Generator(np.random.PCG64(config.seed))

    def _gumbel(self) -> np.ndarray:
        u = self._rng.random(self.polytope.num_sequences)
        u = np.maximum(u, 2.0**-53)  # random() may return exactly 0
        return -self.config.eta * np.log(-np.log(u))

    def next_strategy(self, prediction=None):
        target = self.cumulative_loss.copy()
        if self.optimistic:
            m = self._prediction(prediction)
            target += m
            self.last_prediction = m
        if self.noisy:
            target -= self._gumbel()
        vertex = self.polytope.lmo(target)
        self.lmo_calls += 1
        self.current = vertex.as_array(self.polytope.num_sequences)
        return self.current


class Ftpl(_LeaderLearner):
    noisy = True


class Oftpl(_LeaderLearner):
    noisy = True
    optimistic = True


class Fp(_LeaderLearner):
    pass


class Ofp(_LeaderLearner):
    optimistic = True


class _ResponseLearner(Learner):
    """Best response to the last loss (optionally optimistically corrected)."""

    def next_strategy(self, prediction=None):
        target = self.last_loss.copy()
        if self.optimistic:
            m = self._prediction(prediction)
            target += m - self.last_prediction
            self.last_prediction = m
        vertex = self.polytope.lmo(target)
        self.lmo_calls += 1
        self.current = vertex.as_array(self.polytope.num_sequences)
        return self.current


class Br(_ResponseLearner):
    pass


class Obr(_ResponseLearner):
    optimistic = True


ALGORITHMS = {
    "fwromd": FwRomd,
    "fwomd": FwOmd,
    "ftpl": Ftpl,
    "oftpl": Oftpl,
    "fp": Fp,
    "ofp": Ofp,
    "br": Br,
    "obr": Obr,
}


def make_learner(polytope: TreeplexPolytope, config: LearnerConfig) -> Learner:
    try:
        cls = ALGORITHMS[config.algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {config.algorithm!r}") from None
    if config.eta <= 0 and config.algorithm not in ("ftpl", "oftpl", "fp", "ofp", "br", "obr"):
        raise ValueError("eta must be positive")
    if config.eta < 0:
        raise ValueError("eta must be non-negative")
    if config.max_lmo_per_iter is not None and config.max_lmo_per_iter < 1:
        raise ValueError("per-iteration LMO budget must be at least 1")
    return cls(polytope, config)
