"""Away-step Frank-Wolfe over treeplexes, and the approximate prox oracle.

The solver minimizes a smooth convex function over a sequence-form polytope
using only linear minimization (best-response) calls.  Away steps remove decayed
atoms from the current convex combination, which is what buys linear
convergence on polytopes for strongly convex objectives.

The step size is the exact line-search minimizer for quadratics,
``gamma = <-grad, d> / curvature(d)`` clipped to the feasible range, where
``curvature(d)`` is the second derivative of the objective along ``d``.

Suboptimality certificates come from the Frank-Wolfe (Wolfe) gap
``g = max_v <-grad(x), v - x>``: convexity gives ``f(x) - f* <= g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .treeplex import ActiveSet, TreeplexPolytope, Vertex

__all__ = [
    "WolfeGap",
    "MaxLmoCalls",
    "Termination",
    "ProxObjective",
    "AfwResult",
    "afw_minimize",
    "apo",
]


@dataclass(frozen=True)
class WolfeGap:
    """Stop once the Frank-Wolfe gap is at most ``eps``."""

    eps: float


@dataclass(frozen=True)
class MaxLmoCalls:
    """Stop after exactly ``calls`` linear minimizations (budget mode)."""

    calls: int


Termination = Union[WolfeGap, MaxLmoCalls]


@dataclass
class ProxObjective:
    """f(x) = <linear, x> + ||x - center||^2 / (2 eta).

    (1/eta)-smooth and (1/eta)-strongly convex; its minimizer over the
    polytope is the Euclidean proximal step from ``center`` against the
    linear loss.  ``center`` need not be feasible (projections set linear=0).
    """

    linear: np.ndarray
    center: np.ndarray
    eta: float

    def value(self, x: np.ndarray) -> float:
        diff = x - self.center
        return float(self.linear @ x + (diff @ diff) / (2.0 * self.eta))

    def grad(self, x: np.ndarray) -> np.ndarray:
        return self.linear + (x - self.center) / self.eta

    def curvature(self, d: np.ndarray) -> float:
        """Second directional derivative along ``d`` (exact: quadratic)."""
        return float(d @ d) / self.eta


@dataclass
class AfwResult:
    point: np.ndarray
    active_set: ActiveSet
    value: float
    wolfe_gap: float  # best certificate seen; inf when no gap was evaluated
    lmo_calls: int
    iterations: int


def afw_minimize(
    objective,
    polytope: TreeplexPolytope,
    init: ActiveSet,
    termination: Termination,
    iteration_cap: int = 10**6,
    on_iterate: Optional[Callable[[np.ndarray, float, float], None]] = None,
    early_stop: Optional[Callable[[float, float], bool]] = None,
) -> AfwResult:
    """Run away-step Frank-Wolfe from ``init`` until ``termination``.

    ``objective`` must provide ``value(x)``, ``grad(x)`` and ``curvature(d)``.
    ``init`` is mutated in place (it carries the warm-start state between
    calls).  Returns the best iterate seen with a valid suboptimality
    certificate: monotone descent means the final point is at least as good
    as the iterate whose gap was smallest.

    ``on_iterate(x, f(x), gap)`` is invoked once per iteration after the gap
    is computed, before any step is taken.  ``early_stop(f(x), gap)`` may end
    the run before the termination rule fires (used to abandon doomed solves).
    """
    active = init
    x = active.point
    fval = float(objective.value(x))
    best_val = fval
    best_x = x.copy()
    cert = math.inf
    lmo_calls = 0
    iterations = 0

    budget = termination.calls if isinstance(termination, MaxLmoCalls) else None
    eps = termination.eps if isinstance(termination, WolfeGap) else None

    while True:
        if budget is not None and lmo_calls >= budget:
            break
        if iterations >= iteration_cap:
            raise RuntimeError(
                f"AFW iteration cap {iteration_cap} exceeded "
                f"(value={fval!r}, certificate={cert!r})"
            )
        grad = objective.grad(x)
        s = polytope.lmo(grad)
        lmo_calls += 1
        s_arr = s.as_array(polytope.num_sequences)
        d_fw = s_arr - x
        gap_fw = float(-(grad @ d_fw))
        cert = min(cert, gap_fw)
        if on_iterate is not None:
            on_iterate(x, fval, gap_fw)
        if eps is not None and gap_fw <= eps:
            break
        if early_stop is not None and early_stop(fval, gap_fw):
            break
        if gap_fw <= 0.0:
            break  # numerically optimal; no descent direction remains

        # Away direction: move mass off the worst atom of the support.
        away_vertex = None
        away_score = -math.inf
        for v, _w in active.atoms:
            score = float(grad[list(v.selected)].sum())
            if score > away_score:
                away_vertex, away_score = v, score
        x_dot = float(grad @ x)
        gap_away = away_score - x_dot

        if gap_fw >= gap_away or len(active) == 1:
            d = d_fw
            gap_d = gap_fw
            gamma_max = 1.0
            is_away = False
        else:
            v_arr = away_vertex.as_array(polytope.num_sequences)
            d = x - v_arr
            gap_d = gap_away
            w = active.weights[away_vertex]
            gamma_max = w / (1.0 - w)
            is_away = True

        curv = float(objective.curvature(d))
        if curv <= 0.0:
            gamma = gamma_max
        else:
            gamma = min(gap_d / curv, gamma_max)
        if not math.isfinite(gamma) or gamma <= 0.0:
            break

        if is_away:
            active.away_step(away_vertex, gamma)
        else:
            active.frank_wolfe_step(s, gamma)
        x = active.point
        fval = float(objective.value(x))
        iterations += 1
        if fval < best_val:
            best_val = fval
            best_x = x.copy()

    return AfwResult(
        point=best_x,
        active_set=active,
        value=best_val,
        wolfe_gap=cert,
        lmo_calls=lmo_calls,
        iterations=iterations,
    )


def apo(
    loss_combo: np.ndarray,
    eta: float,
    center: np.ndarray,
    polytope: TreeplexPolytope,
    termination: Termination,
    warmstart: Optional[ActiveSet] = None,
) -> AfwResult:
    """Approximate proximal step: near-minimize <loss, x> + D(x, center)/eta.

    With ``WolfeGap(eps)`` termination the returned point is an eps-accurate
    prox step.  With ``MaxLmoCalls(m)`` the call consumes at most m linear
    minimizations in total, including the one used to seed a cold start.
    """
    objective = ProxObjective(np.asarray(loss_combo, dtype=float), center, eta)
    setup_calls = 0
    if warmstart is None:
        seed = polytope.lmo(objective.linear)
        setup_calls = 1
        warmstart = ActiveSet.singleton(polytope, seed)
        if isinstance(termination, MaxLmoCalls):
            remaining = termination.calls - 1
            if remaining <= 0:
                return AfwResult(
                    point=warmstart.point.copy(),
                    active_set=warmstart,
                    value=float(objective.value(warmstart.point)),
                    wolfe_gap=math.inf,
                    lmo_calls=1,
                    iterations=0,
                )
            termination = MaxLmoCalls(remaining)
    result = afw_minimize(objective, polytope, warmstart, termination)
    result.lmo_calls += setup_calls
    return result
