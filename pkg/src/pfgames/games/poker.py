"""Kuhn and Leduc poker generators.

Cards are integer ranks (higher wins).  Information set labels are
"<own card>|<public history>\", which encodes exactly what the player has
observed; history letters are c=check, b=bet, f=fold, k=call, r=raise.

Kuhn (2 players, default 3 ranks): one card each, ante 1, a single round of
check/bet(1)/fold/call, showdown between non-folded players.

Kuhn (3 players, default 4 ranks): same ante and bet size; the betting order
is P0, P1, P2; once someone bets, the remaining players respond fold/call in
cyclic order after the bettor.

Leduc (default 3 ranks x 2 suits): one private card each, ante 1, a betting
round (wager 2), a public board card, a second betting round (wager 4), then
showdown where pairing the board beats rank.  ``raise_cap`` wagers are allowed
per round (1 or 2).  Cards are dealt and observed as distinct deck cards
(standard encoding); only the rank matters at showdown.
"""

from __future__ import annotations

from fractions import Fraction

from .tree import ChanceNode, DecisionNode, GameTree, TerminalNode

__all__ = ["build_kuhn", "build_leduc"]


class _Builder:
    def __init__(self) -> None:
        self.nodes = []

    def add(self, node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def finish(self, num_players: int, root: int) -> GameTree:
        return GameTree(num_players, self.nodes, root=root)


def build_kuhn(players: int = 2, ranks: int | None = None) -> GameTree:
    if players == 2:
        return _kuhn_two(3 if ranks is None else ranks)
    if players == 3:
        return _kuhn_three(4 if ranks is None else ranks)
    raise ValueError("Kuhn poker is defined here for 2 or 3 players")


def _showdown(cards, contribs, participants) -> tuple[float, ...]:
    pot = sum(contribs)
    winner = max(participants, key=lambda i: cards[i])
    return tuple(
        (pot - contribs[i]) if i == winner else -float(contribs[i])
        for i in range(len(contribs))
    )


def _kuhn_two(ranks: int) -> GameTree:
    if ranks < 2:
        raise ValueError("need at least 2 ranks")
    b = _Builder()
    deal_roots = []
    for c0 in range(ranks):
        for c1 in range(ranks):
            if c0 == c1:
                continue
            cards = (c0, c1)
            # P0 bets: P1 folds or calls.
            bet_fold = b.add(TerminalNode((1.0, -1.0)))
            bet_call = b.add(TerminalNode(_showdown(cards, (2, 2), (0, 1))))
            p1_vs_bet = b.add(DecisionNode(1, f"{c1}|b", ("fold", "call"), (bet_fold, bet_call)))
            # P0 checks: P1 checks (showdown) or bets (P0 folds or calls).
            check_check = b.add(TerminalNode(_showdown(cards, (1, 1), (0, 1))))
            cb_fold = b.add(TerminalNode((-1.0, 1.0)))
            cb_call = b.add(TerminalNode(_showdown(cards, (2, 2), (0, 1))))
            p0_vs_bet = b.add(DecisionNode(0, f"{c0}|cb", ("fold", "call"), (cb_fold, cb_call)))
            p1_vs_check = b.add(
                DecisionNode(1, f"{c1}|c", ("check", "bet"), (check_check, p0_vs_bet))
            )
            p0_root = b.add(
                DecisionNode(0, f"{c0}|", ("check", "bet"), (p1_vs_check, p1_vs_bet))
            )
            deal_roots.append(p0_root)
    prob = 1.0 / len(deal_roots)
    root = b.add(ChanceNode(tuple((prob, n) for n in deal_roots)))
    return b.finish(2, root)


def _kuhn_three(ranks: int) -> GameTree:
    if ranks < 3:
        raise ValueError("need at least 3 ranks")
    b = _Builder()

    def respond(cards, history, bettor, responders, callers, idx) -> int:
        """Players after a bet fold or call in order; then showdown."""
        if idx == len(responders):
            participants = [bettor] + callers
            contribs = [2 if i in participants else 1 for i in range(3)]
            return b.add(TerminalNode(_showdown(cards, contribs, participants)))
        p = responders[idx]
        fold_child = respond(cards, history + "f", bettor, responders, callers, idx + 1)
        call_child = respond(cards, history + "k", bettor, responders, callers + [p], idx + 1)
        return b.add(
            DecisionNode(p, f"{cards[p]}|{history}", ("fold", "call"), (fold_child, call_child))
        )

    deal_roots = []
    for c0 in range(ranks):
        for c1 in range(ranks):
            for c2 in range(ranks):
                if len({c0, c1, c2}) < 3:
                    continue
                cards = (c0, c1, c2)
                ccc = b.add(TerminalNode(_showdown(cards, (1, 1, 1), (0, 1, 2))))
                ccb = respond(cards, "ccb", 2, (0, 1), [], 0)
                p2_cc = b.add(DecisionNode(2, f"{c2}|cc", ("check", "bet"), (ccc, ccb)))
                cb = respond(cards, "cb", 1, (2, 0), [], 0)
                p1_c = b.add(DecisionNode(1, f"{c1}|c", ("check", "bet"), (p2_cc, cb)))
                bet = respond(cards, "b", 0, (1, 2), [], 0)
                p0 = b.add(DecisionNode(0, f"{c0}|", ("check", "bet"), (p1_c, bet)))
                deal_roots.append(p0)
    prob = 1.0 / len(deal_roots)
    root = b.add(ChanceNode(tuple((prob, n) for n in deal_roots)))
    return b.finish(3, root)


_LEDUC_WAGER = (2, 4)  # per-round bet/raise amounts


def build_leduc(
    raise_cap: int = 2, num_ranks: int = 3, cards_per_rank: int = 2
) -> GameTree:
    if raise_cap not in (1, 2):
        raise ValueError("raise_cap must be 1 or 2")
    if num_ranks < 2 or cards_per_rank < 1:
        raise ValueError("deck must have at least 2 ranks and 1 card per rank")
    deck_size = num_ranks * cards_per_rank
    if deck_size < 3:
        raise ValueError("deck too small to deal two privates and a board")
    b = _Builder()

    def rank(card: int) -> int:
        return card // cards_per_rank

    def leduc_showdown(privates, board, contribs) -> tuple[float, ...]:
        pot = sum(contribs)
        r0, r1, rb = rank(privates[0]), rank(privates[1]), rank(board)
        if r0 == rb and r1 != rb:
            winner = 0
        elif r1 == rb and r0 != rb:
            winner = 1
        elif r0 != r1:
            winner = 0 if r0 > r1 else 1
        else:
            return (pot / 2 - contribs[0], pot / 2 - contribs[1])
        return tuple((pot - c) if i == winner else -float(c) for i, c in enumerate(contribs))

    def infoset(player, privates, round_idx, hist0, hist1, board):
        if round_idx == 0:
            return f"{privates[player]}|{hist0}"
        return f"{privates[player]}|{hist0}|{board}|{hist1}"

    def betting(privates, board, round_idx, hist0, hist1, actor, outstanding,
                raises_used, contribs, on_round_end) -> int:
        hist = hist1 if round_idx == 1 else hist0
        wager = _LEDUC_WAGER[round_idx]
        actions: list[str] = []
        children: list[int] = []

        def recurse(new_hist, new_actor, new_out, new_raises, new_contribs):
            h0, h1 = (hist0, new_hist) if round_idx == 1 else (new_hist, hist1)
            return betting(privates, board, round_idx, h0, h1, new_actor,
                           new_out, new_raises, new_contribs, on_round_end)

        if outstanding == 0:
            actions.append("check")
            if hist.endswith("c"):  # both checked: round over
                h0, h1 = (hist0, hist + "c") if round_idx == 1 else (hist + "c", hist1)
                children.append(on_round_end(contribs, h0, h1))
            else:
                children.append(recurse(hist + "c", 1 - actor, 0, raises_used, contribs))
            if raises_used < raise_cap:
                actions.append("raise")
                nc = list(contribs)
                nc[actor] += wager
                children.append(recurse(hist + "r", 1 - actor, wager, raises_used + 1, tuple(nc)))
        else:
            actions.append("fold")
            pot = sum(contribs)
            fold_pay = tuple(
                (pot - c) if i != actor else -float(c) for i, c in enumerate(contribs)
            )
            children.append(b.add(TerminalNode(fold_pay)))
            actions.append("call")
            nc = list(contribs)
            nc[actor] += outstanding
            h0, h1 = (hist0, hist + "k") if round_idx == 1 else (hist + "k", hist1)
            children.append(on_round_end(tuple(nc), h0, h1))
            if raises_used < raise_cap:
                actions.append("raise")
                nr = list(contribs)
                nr[actor] += outstanding + wager
                children.append(recurse(hist + "r", 1 - actor, wager, raises_used + 1, tuple(nr)))

        key = infoset(actor, privates, round_idx, hist0, hist1, board)
        return b.add(DecisionNode(actor, key, tuple(actions), tuple(children)))

    deal_roots: list[tuple[Fraction, int]] = []
    for c0 in range(deck_size):
        for c1 in range(deck_size):
            if c1 == c0:
                continue
            privates = (c0, c1)
            deal_prob = Fraction(1, deck_size * (deck_size - 1))

            def round_two(board):
                def end(contribs, h0, h1):
                    return b.add(TerminalNode(leduc_showdown(privates, board, contribs)))
                return end

            def round_one_end(contribs, h0, h1):
                outcomes = []
                for board in range(deck_size):
                    if board in privates:
                        continue
                    child = betting(privates, board, 1, h0, "", 0, 0, 0, contribs,
                                    round_two(board))
                    outcomes.append((1.0 / (deck_size - 2), child))
                return b.add(ChanceNode(tuple(outcomes)))

            node = betting(privates, None, 0, "", "", 0, 0, 0, (1, 1), round_one_end)
            deal_roots.append((deal_prob, node))

    root = b.add(ChanceNode(tuple((float(p), n) for p, n in deal_roots)))
    return b.finish(2, root)
