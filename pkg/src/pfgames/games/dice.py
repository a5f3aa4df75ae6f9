"""Liar's dice generator.

Each player privately rolls one fair ``faces``-sided die.  Player 0 opens the
bidding; play proceeds cyclically.  A bid names (count, face): "at least
``count`` dice across all players show ``face``".  Bids are strictly
increasing along the ladder ordered by count, then face.  Instead of raising,
a player may call "liar", ending the game: the challenged bid is checked
against the actual dice, the last bidder gets +1 if it holds and -1 otherwise,
the challenger the opposite, and everyone else 0.

Defaults follow the benchmark instances: 6 faces for 2 players, 3 for 3.
"""

from __future__ import annotations

import itertools

from .tree import ChanceNode, DecisionNode, GameTree, TerminalNode

__all__ = ["build_liars_dice"]


def build_liars_dice(players: int = 2, faces: int | None = None) -> GameTree:
    if players not in (2, 3):
        raise ValueError("liar's dice is built here for 2 or 3 players")
    if faces is None:
        faces = 6 if players == 2 else 3
    if faces < 2:
        raise ValueError("need at least 2 faces")
    num_bids = players * faces  # counts 1..players, faces 1..faces

    def bid_name(b: int) -> str:
        count, face = divmod(b, faces)
        return f"{count + 1}x{face + 1}"

    nodes = []

    def add(node) -> int:
        nodes.append(node)
        return len(nodes) - 1

    def resolve(dice, history) -> tuple[float, ...]:
        last = history[-1]
        count, face = divmod(last, faces)
        actual = sum(d == face + 1 for d in dice)
        bidder = (len(history) - 1) % players
        challenger = len(history) % players
        payoffs = [0.0] * players
        if actual >= count + 1:
            payoffs[bidder], payoffs[challenger] = 1.0, -1.0
        else:
            payoffs[bidder], payoffs[challenger] = -1.0, 1.0
        return tuple(payoffs)

    def bidding(dice, history) -> int:
        actor = len(history) % players
        last = history[-1] if history else -1
        actions = []
        children = []
        for b in range(last + 1, num_bids):
            actions.append(bid_name(b))
            children.append(bidding(dice, history + (b,)))
        if history:
            actions.append("liar")
            children.append(add(TerminalNode(resolve(dice, history))))
        hist_key = ",".join(bid_name(b) for b in history)
        key = f"{dice[actor]}|{hist_key}"
        return add(DecisionNode(actor, key, tuple(actions), tuple(children)))

    rolls = list(itertools.product(range(1, faces + 1), repeat=players))
    prob = 1.0 / len(rolls)
    outcomes = tuple((prob, bidding(dice, ())) for dice in rolls)
    root = add(ChanceNode(outcomes))
    return GameTree(players, nodes, root=root)
