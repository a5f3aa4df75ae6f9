"""Two-player zero-sum normal-form games as depth-1 trees.

The row player moves first; the column player's single information set hides
that move, so both strategy sets are probability simplices.
"""

from __future__ import annotations

import numpy as np

from .tree import DecisionNode, GameTree, TerminalNode

__all__ = ["build_matrix_game", "build_matching_pennies"]


def build_matrix_game(row_payoffs) -> GameTree:
    a = np.asarray(row_payoffs, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("payoff matrix must be 2-d and non-empty")
    rows, cols = a.shape
    nodes = []
    col_actions = tuple(f"c{j}" for j in range(cols))
    col_children = []
    for i in range(rows):
        terminals = []
        for j in range(cols):
            nodes.append(TerminalNode((float(a[i, j]), float(-a[i, j]))))
            terminals.append(len(nodes) - 1)
        nodes.append(DecisionNode(1, "·", col_actions, tuple(terminals)))
        col_children.append(len(nodes) - 1)
    row_actions = tuple(f"r{i}" for i in range(rows))
    nodes.append(DecisionNode(0, "·", row_actions, tuple(col_children)))
    return GameTree(2, nodes, root=len(nodes) - 1)


def build_matching_pennies() -> GameTree:
    return build_matrix_game([[1.0, -1.0], [-1.0, 1.0]])
