"""Three-player limited-information Goofspiel with 3 ranks.

Card values are {-1, 0, 1} for both hands and the prize stack.  The prize
order is shuffled by chance (6 permutations, uniform).  Each turn the next
prize is revealed, then players bid simultaneously with a card from their
hand; bids go to a referee, so a player never observes the others' bids.  The
highest bid takes the prize value; ties split it evenly among the tied
highest bidders.  Scores are the summed prize shares.

Simultaneity is serialized in fixed player order with information sets that
hide the earlier bids of the same turn; across turns a player remembers the
revealed prizes and their own bids only.
"""

from __future__ import annotations

import itertools

from .tree import ChanceNode, DecisionNode, GameTree, TerminalNode

__all__ = ["build_goofspiel3"]

_VALUES = (-1, 0, 1)


def build_goofspiel3() -> GameTree:
    nodes = []

    def add(node) -> int:
        nodes.append(node)
        return len(nodes) - 1

    def settle(prizes, bids_by_turn) -> tuple[float, ...]:
        scores = [0.0, 0.0, 0.0]
        for prize, bids in zip(prizes, bids_by_turn):
            top = max(bids)
            winners = [i for i, b in enumerate(bids) if b == top]
            for i in winners:
                scores[i] += prize / len(winners)
        return tuple(scores)

    def play(prizes, turn, hands, bids_by_turn, turn_bids, actor) -> int:
        if actor == 3:
            done = bids_by_turn + (tuple(turn_bids),)
            if turn == 2:
                return add(TerminalNode(settle(prizes, done)))
            return play(prizes, turn + 1, hands, done, (), 0)
        hand = hands[actor]
        revealed = ",".join(str(p) for p in prizes[: turn + 1])
        own = ",".join(str(b) for bids in bids_by_turn for b in (bids[actor],))
        key = f"{revealed}|{own}"
        actions, children = [], []
        for card in hand:
            next_hands = tuple(
                tuple(c for c in h if not (i == actor and c == card))
                for i, h in enumerate(hands)
            )
            child = play(prizes, turn, next_hands, bids_by_turn, turn_bids + (card,), actor + 1)
            actions.append(str(card))
            children.append(child)
        return add(DecisionNode(actor, key, tuple(actions), tuple(children)))

    orders = list(itertools.permutations(_VALUES))
    prob = 1.0 / len(orders)
    hands = (_VALUES, _VALUES, _VALUES)
    outcomes = tuple((prob, play(order, 0, hands, (), (), 0)) for order in orders)
    root = add(ChanceNode(outcomes))
    return GameTree(3, nodes, root=root)
