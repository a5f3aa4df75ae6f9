from __future__ import annotations

import numpy as np
import pytest

from pfgames.games import load_sequence_form


@pytest.fixture(scope="session")
def kuhn2p():
    return load_sequence_form("kuhn2p")


@pytest.fixture(scope="session")
def kuhn3p():
    return load_sequence_form("kuhn3p")


@pytest.fixture(scope="session")
def pennies():
    return load_sequence_form("matching_pennies")


def behavioral_to_sequence(game, player: int, policy: dict) -> np.ndarray:
    """Fill a sequence-form vector from a behavioral policy keyed on infoset labels."""
    poly = game.treeplexes[player]
    labels = game.sequence_labels[player]
    x = np.zeros(poly.num_sequences)
    x[0] = 1.0
    for dp in poly.decision_points:
        for c in dp.children:
            infoset, action = labels[c].rsplit("/", 1)
            x[c] = x[dp.parent] * policy[infoset][action]
    return x


def random_sequence_point(poly, rng) -> np.ndarray:
    """A random interior point: Dirichlet-ish behavioral mixing at every decision point."""
    x = np.zeros(poly.num_sequences)
    x[0] = 1.0
    for dp in poly.decision_points:
        w = rng.random(len(dp.children)) + 1e-3
        w /= w.sum()
        for c, wc in zip(dp.children, w):
            x[c] = x[dp.parent] * wc
    return x


def random_treeplex(rng, max_points: int = 6, max_children: int = 4):
    """Small random treeplex; children are appended after their parent, so the
    index ordering is automatically topological."""
    from pfgames.treeplex import DecisionPoint, TreeplexPolytope

    num_sequences = 1
    points = []
    for _ in range(int(rng.integers(1, max_points + 1))):
        parent = int(rng.integers(0, num_sequences))
        k = int(rng.integers(2, max_children + 1))
        children = tuple(range(num_sequences, num_sequences + k))
        points.append(DecisionPoint(parent, children))
        num_sequences += k
    return TreeplexPolytope(num_sequences, points)


def kuhn_equilibrium_policies(gamma: float) -> tuple[dict, dict]:
    """The classic one-parameter Kuhn equilibrium family (cards 0 < 1 < 2).

    First mover bets 0/3*gamma/0-never/3*gamma on jack/queen/king and calls a
    check-raise with queen at probability gamma + 1/3; second mover bluffs
    jack at 1/3 and calls with queen at 1/3.  Every member yields first-mover
    value -1/18.
    """
    p0 = {
        "0|": {"bet": gamma, "check": 1 - gamma},
        "1|": {"bet": 0.0, "check": 1.0},
        "2|": {"bet": 3 * gamma, "check": 1 - 3 * gamma},
        "0|cb": {"fold": 1.0, "call": 0.0},
        "1|cb": {"fold": 2 / 3 - gamma, "call": 1 / 3 + gamma},
        "2|cb": {"fold": 0.0, "call": 1.0},
    }
    p1 = {
        "0|b": {"fold": 1.0, "call": 0.0},
        "1|b": {"fold": 2 / 3, "call": 1 / 3},
        "2|b": {"fold": 0.0, "call": 1.0},
        "0|c": {"check": 2 / 3, "bet": 1 / 3},
        "1|c": {"check": 1.0, "bet": 0.0},
        "2|c": {"check": 0.0, "bet": 1.0},
    }
    return p0, p1
