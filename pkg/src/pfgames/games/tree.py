"""Extensive-form game trees.

Nodes live in a flat list and reference children by index; the root is node 0
unless stated otherwise.  Information sets are string labels scoped per
player: two decision nodes of the same player with the same label are
indistinguishable to that player and must offer the same actions.

A line-oriented text serialization supports golden-file regression tests:

    game players=<N> root=<idx>
    <idx> C <prob>:<child> ...
    <idx> D p=<player> i=<infoset> <action>:<child> ...
    <idx> T <payoff> ...

Floats are written with 17 significant digits so parsing round-trips exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

__all__ = [
    "ChanceNode",
    "DecisionNode",
    "TerminalNode",
    "GameTree",
    "serialize_tree",
    "parse_tree",
]


@dataclass(frozen=True)
class ChanceNode:
    outcomes: tuple[tuple[float, int], ...]  # (probability, child index)


@dataclass(frozen=True)
class DecisionNode:
    player: int
    infoset: str
    actions: tuple[str, ...]
    children: tuple[int, ...]


@dataclass(frozen=True)
class TerminalNode:
    payoffs: tuple[float, ...]


Node = Union[ChanceNode, DecisionNode, TerminalNode]


class GameTree:
    def __init__(self, num_players: int, nodes: list[Node], root: int = 0):
        if num_players < 2:
            raise ValueError("need at least two players")
        self.num_players = num_players
        self.nodes: tuple[Node, ...] = tuple(nodes)
        self.root = root
        self._validate()

    def _validate(self) -> None:
        seen = [0] * len(self.nodes)
        for node in self.nodes:
            if isinstance(node, ChanceNode):
                total = sum(p for p, _ in node.outcomes)
                if abs(total - 1.0) > 1e-12:
                    raise ValueError(f"chance probabilities sum to {total!r}")
                if any(p < 0 for p, _ in node.outcomes):
                    raise ValueError("negative chance probability")
                kids = [c for _, c in node.outcomes]
            elif isinstance(node, DecisionNode):
                if not 0 <= node.player < self.num_players:
                    raise ValueError(f"player {node.player} out of range")
                if len(node.actions) != len(node.children) or not node.children:
                    raise ValueError("actions and children must align and be non-empty")
                kids = list(node.children)
            else:
                if len(node.payoffs) != self.num_players:
                    raise ValueError("terminal payoff length must equal num_players")
                kids = []
            for c in kids:
                if not 0 <= c < len(self.nodes):
                    raise ValueError(f"child index {c} out of range")
                seen[c] += 1
        if seen[self.root] != 0:
            raise ValueError("root must have no parent")
        for idx, count in enumerate(seen):
            if idx != self.root and count != 1:
                raise ValueError(f"node {idx} has {count} parents; tree required")

    def __len__(self) -> int:
        return len(self.nodes)

    def terminal_count(self) -> int:
        return sum(isinstance(n, TerminalNode) for n in self.nodes)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def serialize_tree(tree: GameTree) -> str:
    lines = [f"game players={tree.num_players} root={tree.root}"]
    for idx, node in enumerate(tree.nodes):
        if isinstance(node, ChanceNode):
            parts = " ".join(f"{_fmt(p)}:{c}" for p, c in node.outcomes)
            lines.append(f"{idx} C {parts}")
        elif isinstance(node, DecisionNode):
            parts = " ".join(f"{a}:{c}" for a, c in zip(node.actions, node.children))
            lines.append(f"{idx} D p={node.player} i={node.infoset} {parts}")
        else:
            lines.append(f"{idx} T " + " ".join(_fmt(u) for u in node.payoffs))
    return "\n".join(lines) + "\n"


def parse_tree(text: str) -> GameTree:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split()
    if header[0] != "game":
        raise ValueError("missing game header")
    meta = dict(part.split("=", 1) for part in header[1:])
    num_players = int(meta["players"])
    root = int(meta.get("root", "0"))
    nodes: list[Node] = []
    for line in lines[1:]:
        fields = line.split()
        idx, kind = int(fields[0]), fields[1]
        if idx != len(nodes):
            raise ValueError(f"node records out of order at {idx}")
        if kind == "C":
            outcomes = []
            for part in fields[2:]:
                p, c = part.rsplit(":", 1)
                outcomes.append((float(p), int(c)))
            nodes.append(ChanceNode(tuple(outcomes)))
        elif kind == "D":
            player = int(fields[2].removeprefix("p="))
            infoset = fields[3].removeprefix("i=")
            actions, children = [], []
            for part in fields[4:]:
                a, c = part.rsplit(":", 1)
                actions.append(a)
                children.append(int(c))
            nodes.append(DecisionNode(player, infoset, tuple(actions), tuple(children)))
        elif kind == "T":
            nodes.append(TerminalNode(tuple(float(u) for u in fields[2:])))
        else:
            raise ValueError(f"unknown node kind {kind!r}")
    return GameTree(num_players, nodes, root=root)
