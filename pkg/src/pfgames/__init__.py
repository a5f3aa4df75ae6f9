"""Projection-free learning in extensive-form games.

Sequence-form strategy polytopes with linear-minimization oracles,
away-step Frank-Wolfe, approximate proximal steps, regret-minimizing
learners built on those oracles, and self-play orchestration with
convergence metrics.
"""

from .afw import AfwResult, MaxLmoCalls, ProxObjective, WolfeGap, afw_minimize, apo
from .facial import (
    facial_distance_bruteforce,
    lower_bound_integral_form,
    lower_bound_vertex_form,
)
from .games import GAME_REGISTRY, build_game, load_sequence_form
from .games.sequence_form import (
    RegretTracker,
    SequenceFormGame,
    duality_gap,
    loss_gradient,
    max_avg_regret,
    to_sequence_form,
    utility,
)
from .learners import ALGORITHMS, LearnerConfig, make_learner
from .selfplay import RunRecord, SelfplayResult, run_selfplay
from .treeplex import ActiveSet, DecisionPoint, TreeplexPolytope, Vertex

__version__ = "0.1.0"

__all__ = [
    "ActiveSet",
    "AfwResult",
    "ALGORITHMS",
    "DecisionPoint",
    "GAME_REGISTRY",
    "LearnerConfig",
    "MaxLmoCalls",
    "ProxObjective",
    "RegretTracker",
    "RunRecord",
    "SelfplayResult",
    "SequenceFormGame",
    "TreeplexPolytope",
    "Vertex",
    "WolfeGap",
    "afw_minimize",
    "apo",
    "build_game",
    "duality_gap",
    "facial_distance_bruteforce",
    "load_sequence_form",
    "loss_gradient",
    "lower_bound_integral_form",
    "lower_bound_vertex_form",
    "make_learner",
    "max_avg_regret",
    "run_selfplay",
    "to_sequence_form",
    "utility",
]
