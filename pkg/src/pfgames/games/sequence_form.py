"""Sequence-form representation of game trees, payoffs, and gap metrics.

``to_sequence_form`` converts a perfect-recall game tree into one treeplex
per player plus a flat table of leaves; each leaf stores its chance
probability, the last sequence of every player on the path, and payoffs.
Expected utility is then a multilinear form over the players' sequence-form
strategies, evaluated with numpy gathers over the leaf table.

Payoff normalization keeps the no-regret theory applicable out of the box:
player i's payoffs are scaled by 1/B_i where B_i bounds both the Euclidean
norm of any loss gradient (via subtree-cumulative absolute payoff mass: each
sequence's coefficient counts every leaf at or below it, a conservative
envelope of the exact per-sequence coefficients) and the loss smoothness
constant with respect to each opponent (via the Schur bound
``sqrt(max row sum * max column sum)`` on the pairwise absolute-coefficient
matrix).  After scaling, ||loss|| <= 1 and losses are 1-Lipschitz in the
opponents' strategy changes.  Zero-sum games use the common scale
``1/max_i B_i`` so that the zero-sum structure (and the duality-gap metric)
survives scaling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..treeplex import TreeplexPolytope, DecisionPoint
from .tree import ChanceNode, DecisionNode, GameTree, TerminalNode

__all__ = [
    "SequenceFormGame",
    "to_sequence_form",
    "utility",
    "loss_gradient",
    "duality_gap",
    "max_avg_regret",
    "RegretTracker",
]


@dataclass
class SequenceFormGame:
    tree: GameTree
    treeplexes: tuple[TreeplexPolytope, ...]
    sequence_labels: tuple[tuple[str, ...], ...]
    leaf_chance: np.ndarray          # (L,)
    leaf_sequences: np.ndarray       # (N, L) int
    leaf_payoffs: np.ndarray         # (N, L) scaled payoffs
    raw_leaf_payoffs: np.ndarray     # (N, L) original payoffs
    scale: np.ndarray                # (N,) payoff multipliers applied
    zero_sum: bool

    @property
    def num_players(self) -> int:
        return len(self.treeplexes)

    def uniform_profile(self) -> list[np.ndarray]:
        return [p.uniform_point() for p in self.treeplexes]


def to_sequence_form(tree: GameTree, normalize: bool = True) -> SequenceFormGame:
    """Convert a perfect-recall tree; raises ValueError on recall violations."""
    n_players = tree.num_players
    # infoset key -> (parent_sequence, first_child_sequence, num_actions)
    infosets: list[dict[str, tuple[int, int, int]]] = [{} for _ in range(n_players)]
    num_sequences = [1] * n_players
    seq_labels: list[list[str]] = [["∅"] for _ in range(n_players)]
    leaves: list[tuple[float, tuple[int, ...], tuple[float, ...]]] = []

    def walk(idx: int, chance: float, seqs: tuple[int, ...]) -> None:
        node = tree.nodes[idx]
        if isinstance(node, TerminalNode):
            leaves.append((chance, seqs, node.payoffs))
            return
        if isinstance(node, ChanceNode):
            for p, child in node.outcomes:
                walk(child, chance * p, seqs)
            return
        p = node.player
        record = infosets[p].get(node.infoset)
        if record is None:
            first = num_sequences[p]
            infosets[p][node.infoset] = (seqs[p], first, len(node.actions))
            num_sequences[p] += len(node.actions)
            for a in node.actions:
                seq_labels[p].append(f"{node.infoset}/{a}")
        else:
            parent, first, count = record
            if parent != seqs[p]:
                raise ValueError(
                    f"imperfect recall: infoset {node.infoset!r} of player {p} "
                    f"reached from sequences {parent} and {seqs[p]}"
                )
            if count != len(node.actions):
                raise ValueError(f"inconsistent action count at infoset {node.infoset!r}")
        first = infosets[p][node.infoset][1]
        for k, child in enumerate(node.children):
            new_seqs = seqs[:p] + (first + k,) + seqs[p + 1 :]
            walk(child, chance, new_seqs)

    walk(tree.root, 1.0, (0,) * n_players)

    treeplexes = []
    for p in range(n_players):
        points = [
            DecisionPoint(parent, tuple(range(first, first + count)))
            for parent, first, count in infosets[p].values()
        ]
        treeplexes.append(TreeplexPolytope(num_sequences[p], points))

    chance = np.array([c for c, _, _ in leaves])
    seq_idx = np.array([s for _, s, _ in leaves], dtype=np.int64).T.copy()
    raw_pay = np.array([u for _, _, u in leaves]).T.copy()
    zero_sum = bool(np.all(np.abs(raw_pay.sum(axis=0)) <= 1e-9))

    scale = np.ones(n_players)
    if normalize:
        bounds = np.empty(n_players)
        for i in range(n_players):
            mass = np.abs(raw_pay[i]) * chance
            g = np.bincount(seq_idx[i], weights=mass, minlength=num_sequences[i])
            smooth_bound = 0.0
            max_row = float(g.max(initial=0.0))
            cumulative = g.copy()
            for dp in reversed(treeplexes[i].decision_points):
                cumulative[dp.parent] += cumulative[list(dp.children)].sum()
            grad_bound = float(np.sqrt((cumulative * cumulative).sum()))
            for j in range(n_players):
                if j == i:
                    continue
                col = np.bincount(seq_idx[j], weights=mass, minlength=num_sequences[j])
                smooth_bound = max(smooth_bound, np.sqrt(max_row * float(col.max(initial=0.0))))
            bounds[i] = max(grad_bound, smooth_bound)
        bounds[bounds == 0.0] = 1.0
        scale = (1.0 / bounds.max()) * np.ones(n_players) if zero_sum else 1.0 / bounds

    return SequenceFormGame(
        tree=tree,
        treeplexes=tuple(treeplexes),
        sequence_labels=tuple(tuple(lbl) for lbl in seq_labels),
        leaf_chance=chance,
        leaf_sequences=seq_idx,
        leaf_payoffs=raw_pay * scale[:, None],
        raw_leaf_payoffs=raw_pay,
        scale=scale,
        zero_sum=zero_sum,
    )


def utility(game: SequenceFormGame, profile, player: int | None = None, raw: bool = False):
    """Expected payoff(s) under a sequence-form strategy profile.

    ``raw=True`` reports in the game's original payoff units (undoing the
    normalization); otherwise scaled units, which is what learners observe.
    """
    reach = game.leaf_chance.copy()
    for i, x in enumerate(profile):
        reach *= np.asarray(x)[game.leaf_sequences[i]]
    pay = game.raw_leaf_payoffs if raw else game.leaf_payoffs
    if player is not None:
        return float(pay[player] @ reach)
    return pay @ reach


def loss_gradient(game: SequenceFormGame, player: int, profile) -> np.ndarray:
    """The loss vector fed to player's learner: minus the utility gradient."""
    reach = game.leaf_chance * game.leaf_payoffs[player]
    for j, x in enumerate(profile):
        if j != player:
            reach = reach * np.asarray(x)[game.leaf_sequences[j]]
    grad = np.bincount(
        game.leaf_sequences[player], weights=reach,
        minlength=game.treeplexes[player].num_sequences,
    )
    return -grad


def duality_gap(game: SequenceFormGame, profile) -> float:
    """Sum of best-response improvements for a 2-player zero-sum game.

    Equals max_y <A xbar, y> - min_x <A x, ybar>; two LMO calls total.
    Clamped to 0 against rounding (threshold -1e-12).
    """
    if game.num_players != 2 or not game.zero_sum:
        raise ValueError("duality gap is defined for 2-player zero-sum games")
    gap = 0.0
    for i in range(2):
        loss = loss_gradient(game, i, profile)
        best = game.treeplexes[i].lmo(loss)
        gap += float(loss @ np.asarray(profile[i])) - float(loss[list(best.selected)].sum())
    if gap < 0.0:
        if gap < -1e-12:
            return gap  # genuinely negative: let callers see the bug
        gap = 0.0
    return gap


class RegretTracker:
    """Streaming external regret of one player against its loss sequence."""

    def __init__(self, polytope: TreeplexPolytope):
        self.polytope = polytope
        self.cumulative_loss = np.zeros(polytope.num_sequences)
        self.played = 0.0
        self.steps = 0

    def update(self, strategy: np.ndarray, loss: np.ndarray) -> None:
        self.played += float(loss @ strategy)
        self.cumulative_loss += loss
        self.steps += 1

    def regret(self) -> float:
        """Total regret so far; one LMO call per evaluation."""
        best = self.polytope.lmo(self.cumulative_loss)
        return self.played - float(self.cumulative_loss[list(best.selected)].sum())

    def average_regret(self) -> float:
        if self.steps == 0:
            return 0.0
        return self.regret() / self.steps


def max_avg_regret(game: SequenceFormGame, strategies, losses) -> float:
    """Max over players of time-averaged external regret.

    ``strategies[t][i]`` and ``losses[t][i]`` are player i's play and observed
    loss at iteration t.  The CCE convergence metric for 3+ player runs.
    """
    trackers = [RegretTracker(p) for p in game.treeplexes]
    for profile, loss_vecs in zip(strategies, losses):
        for tr, x, l in zip(trackers, profile, loss_vecs):
            tr.update(np.asarray(x), np.asarray(l))
    return max(tr.average_regret() for tr in trackers)
