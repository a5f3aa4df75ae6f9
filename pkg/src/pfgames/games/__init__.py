"""Benchmark game generators, sequence-form conversion, and gap metrics."""

from __future__ import annotations

from .dice import build_liars_dice
from .goofspiel import build_goofspiel3
from .matrix import build_matching_pennies, build_matrix_game
from .poker import build_kuhn, build_leduc
from .sequence_form import (
    RegretTracker,
    SequenceFormGame,
    duality_gap,
    loss_gradient,
    max_avg_regret,
    to_sequence_form,
    utility,
)
from .tree import (
    ChanceNode,
    DecisionNode,
    GameTree,
    TerminalNode,
    parse_tree,
    serialize_tree,
)

GAME_REGISTRY = {
    "kuhn2p": (lambda **kw: build_kuhn(players=2, **kw), "2-player Kuhn poker (3 ranks)"),
    "kuhn3p": (lambda **kw: build_kuhn(players=3, **kw), "3-player Kuhn poker (4 ranks)"),
    "leduc": (lambda **kw: build_leduc(**kw), "2-player Leduc poker (6 cards, 2 raises/round)"),
    "leduc1": (
        lambda **kw: build_leduc(raise_cap=1, **kw),
        "2-player Leduc poker (6 cards, 1 raise/round)",
    ),
    "liars_dice_2p": (lambda **kw: build_liars_dice(players=2, **kw), "2-player liar's dice (6 faces)"),
    "liars_dice_3p": (lambda **kw: build_liars_dice(players=3, **kw), "3-player liar's dice (3 faces)"),
    "goofspiel3": (lambda **kw: build_goofspiel3(**kw), "3-player limited-info Goofspiel (3 ranks)"),
    "matching_pennies": (lambda **kw: build_matrix_game([[1, -1], [-1, 1]], **kw), "matching pennies"),
}


def build_game(game_id: str, **params) -> GameTree:
    try:
        builder, _ = GAME_REGISTRY[game_id]
    except KeyError:
        raise ValueError(f"unknown game {game_id!r}; see list-games") from None
    return builder(**params)


def load_sequence_form(game_id: str, normalize: bool = True, **params) -> SequenceFormGame:
    return to_sequence_form(build_game(game_id, **params), normalize=normalize)


__all__ = [
    "GAME_REGISTRY",
    "build_game",
    "load_sequence_form",
    "build_kuhn",
    "build_leduc",
    "build_liars_dice",
    "build_goofspiel3",
    "build_matrix_game",
    "build_matching_pennies",
    "GameTree",
    "ChanceNode",
    "DecisionNode",
    "TerminalNode",
    "serialize_tree",
    "parse_tree",
    "SequenceFormGame",
    "to_sequence_form",
    "utility",
    "loss_gradient",
    "duality_gap",
    "max_avg_regret",
    "RegretTracker",
]
