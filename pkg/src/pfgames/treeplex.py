"""Sequence-form strategy polytopes (treeplexes) and their linear oracles.

A treeplex is the convex polytope of sequence-form strategies of one player
in an extensive-form game with perfect recall.  Points are vectors indexed by
the player's sequences; index 0 is the empty sequence and is fixed to 1.  Each
decision point (information set) imposes a flow constraint: the mass of its
parent sequence is split among the children sequences.

Vertices of this polytope are exactly the deterministic strategies: 0/1
vectors that pick one child at every reachable decision point.  The linear
minimization oracle (best response to a fixed loss vector) is a single
bottom-up/top-down sweep over the decision points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DecisionPoint",
    "TreeplexPolytope",
    "Vertex",
    "ActiveSet",
]


@dataclass(frozen=True)
class DecisionPoint:
    """One information set: ``parent`` sequence splits into ``children``."""

    parent: int
    children: tuple[int, ...]


@dataclass(frozen=True)
class Vertex:
    """A deterministic strategy: the set of sequences played with mass 1.

    ``selected`` is sorted and always contains the empty sequence 0.
    """

    selected: tuple[int, ...]

    def as_array(self, num_sequences: int) -> np.ndarray:
        x = np.zeros(num_sequences)
        x[list(self.selected)] = 1.0
        return x

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.selected)


class TreeplexPolytope:
    """Sequence-form polytope {x >= 0 : x[0] = 1, flow constraints}.

    Parameters
    ----------
    num_sequences:
        Total number of sequences including the empty sequence at index 0.
    decision_points:
        Iterable of ``DecisionPoint``.  Sequence indices must be topological:
        every decision point's parent index is smaller than all its children.
        Each nonzero sequence must be the child of exactly one decision point.
    """

    def __init__(self, num_sequences: int, decision_points) -> None:
        if num_sequences < 1:
            raise ValueError("need at least the empty sequence")
        points = []
        seen_children: set[int] = set()
        for dp in decision_points:
            children = tuple(sorted(dp.children))
            if not children:
                raise ValueError("decision point with no children")
            if dp.parent < 0 or dp.parent >= num_sequences:
                raise ValueError(f"parent {dp.parent} out of range")
            for c in children:
                if c <= dp.parent or c >= num_sequences:
                    raise ValueError(
                        f"child {c} of parent {dp.parent} breaks topological order"
                    )
                if c == 0 or c in seen_children:
                    raise ValueError(f"sequence {c} owned by more than one decision point")
                seen_children.add(c)
            points.append(DecisionPoint(dp.parent, children))
        if seen_children != set(range(1, num_sequences)):
            missing = set(range(1, num_sequences)) - seen_children
            raise ValueError(f"orphan sequences (no owning decision point): {sorted(missing)}")
        points.sort(key=lambda d: (d.parent, d.children))
        self.num_sequences = num_sequences
        self.decision_points: tuple[DecisionPoint, ...] = tuple(points)
        # Contiguous children ranges admit a slice-based oracle fast path.
        self._contiguous = all(
            d.children == tuple(range(d.children[0], d.children[-1] + 1))
            for d in self.decision_points
        )

    # -- constructors -------------------------------------------------------

    @classmethod
    def simplex(cls, num_actions: int) -> "TreeplexPolytope":
        """Probability simplex over ``num_actions`` as a one-level treeplex."""
        if num_actions < 1:
            raise ValueError("simplex needs at least one action")
        return cls(num_actions + 1, [DecisionPoint(0, tuple(range(1, num_actions + 1)))])

    # -- basic geometry ------------------------------------------------------

    @property
    def n(self) -> int:
        return self.num_sequences

    def uniform_point(self) -> np.ndarray:
        """The uniform behavioral strategy as a sequence-form vector."""
        x = np.zeros(self.num_sequences)
        x[0] = 1.0
        for dp in self.decision_points:
            share = x[dp.parent] / len(dp.children)
            for c in dp.children:
                x[c] = share
        return x

    def feasibility_error(self, x: np.ndarray) -> float:
        """Max violation of the defining constraints (0 for interior points)."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.num_sequences,):
            raise ValueError("wrong dimension")
        err = abs(x[0] - 1.0)
        err = max(err, float(-(x.min())) if x.size else 0.0)
        for dp in self.decision_points:
            err = max(err, abs(float(sum(x[c] for c in dp.children) - x[dp.parent])))
        return err

    def is_feasible(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return self.feasibility_error(x) <= tol

    def check_point(self, x: np.ndarray, tol: float = 1e-9) -> None:
        err = self.feasibility_error(x)
        if err > tol:
            raise ValueError(f"infeasible point: constraint violation {err:.3e} > {tol:.1e}")

    # -- oracles -------------------------------------------------------------

    def lmo(self, loss: np.ndarray) -> Vertex:
        """Best response: the vertex minimizing ``<loss, x>``.

        Ties are broken toward the lowest sequence index, so the all-zeros
        loss returns the all-first-child strategy deterministically.
        """
        loss = np.asarray(loss, dtype=float)
        if loss.shape != (self.num_sequences,):
            raise ValueError("loss length must equal num_sequences")
        value = loss.copy()
        best: dict[DecisionPoint, int] = {}
        for dp in reversed(self.decision_points):
            lo, hi = dp.children[0], dp.children[-1]
            if self._contiguous:
                seg = value[lo : hi + 1]
                j = int(np.argmin(seg))  # first occurrence = lowest index
                best[dp] = lo + j
                value[dp.parent] += seg[j]
            else:
                cbest = dp.children[0]
                vbest = value[cbest]
                for c in dp.children[1:]:
                    if value[c] < vbest:
                        cbest, vbest = c, value[c]
                best[dp] = cbest
                value[dp.parent] += vbest
        selected = np.zeros(self.num_sequences, dtype=bool)
        selected[0] = True
        for dp in self.decision_points:
            if selected[dp.parent]:
                selected[best[dp]] = True
        return Vertex(tuple(np.flatnonzero(selected)))

    def enumerate_vertices(self, cap: int = 10**6) -> list[Vertex]:
        """All deterministic strategies, in deterministic DFS order.

        Raises ``ValueError`` when the product of branching factors (a cheap
        upper bound on the number of vertices) exceeds ``cap``.
        """
        bound = 1
        for dp in self.decision_points:
            bound *= len(dp.children)
            if bound > cap:
                raise ValueError(f"vertex enumeration cap {cap} exceeded")
        out: list[Vertex] = []
        selected = {0}

        def rec(i: int) -> None:
            if i == len(self.decision_points):
                out.append(Vertex(tuple(sorted(selected))))
                return
            dp = self.decision_points[i]
            if dp.parent not in selected:
                rec(i + 1)
                return
            for c in dp.children:
                selected.add(c)
                rec(i + 1)
                selected.remove(c)

        rec(0)
        return out

    def diameter_squared(self, enumeration_cap: int = 4096) -> float:
        """Max squared distance between vertices; exact when enumerable.

        Falls back to the generic 0/1-polytope bound ``2 * num_sequences``
        when enumeration would exceed ``enumeration_cap``.
        """
        try:
            verts = self.enumerate_vertices(cap=enumeration_cap)
        except ValueError:
            return 2.0 * self.num_sequences
        v = np.array([w.as_array(self.num_sequences) for w in verts])
        sq = (v * v).sum(axis=1)
        gram = v @ v.T
        d2 = sq[:, None] + sq[None, :] - 2.0 * gram
        return float(d2.max())


class ActiveSet:
    """Convex-combination bookkeeping for away-step Frank-Wolfe iterates.

    Maintains ``point == sum(weight * vertex)`` up to rounding.  Vertices are
    kept in insertion order, which fixes the away-atom tie-break.
    """

    __slots__ = ("polytope", "weights", "_point", "_steps")

    def __init__(self, polytope: TreeplexPolytope, weights: dict[Vertex, float]):
        self.polytope = polytope
        self.weights: dict[Vertex, float] = dict(weights)
        self._point = self._reconstruct()
        self._steps = 0

    @classmethod
    def singleton(cls, polytope: TreeplexPolytope, vertex: Vertex) -> "ActiveSet":
        return cls(polytope, {vertex: 1.0})

    def _reconstruct(self) -> np.ndarray:
        x = np.zeros(self.polytope.num_sequences)
        for v, w in self.weights.items():
            x[list(v.selected)] += w
        return x

    @property
    def point(self) -> np.ndarray:
        return self._point

    @property
    def atoms(self) -> list[tuple[Vertex, float]]:
        return list(self.weights.items())

    def __len__(self) -> int:
        return len(self.weights)

    def reconstruction_error(self) -> float:
        return float(np.abs(self._point - self._reconstruct()).max(initial=0.0))

    def validate(self, tol: float = 1e-10) -> None:
        if not self.weights:
            raise ValueError("empty active set")
        total = sum(self.weights.values())
        if abs(total - 1.0) > tol:
            raise ValueError(f"weights sum to {total!r}, not 1")
        if any(w <= 0 for w in self.weights.values()):
            raise ValueError("non-positive atom weight")
        if self.reconstruction_error() > tol:
            raise ValueError("point drifted from convex combination of atoms")

    # -- step bookkeeping (used by the Frank-Wolfe loop) ---------------------

    def frank_wolfe_step(self, vertex: Vertex, gamma: float) -> None:
        """x <- x + gamma * (vertex - x)."""
        for v in self.weights:
            self.weights[v] *= 1.0 - gamma
        self.weights[vertex] = self.weights.get(vertex, 0.0) + gamma
        self._point *= 1.0 - gamma
        self._point[list(vertex.selected)] += gamma
        self._cleanup()

    def away_step(self, vertex: Vertex, gamma: float) -> None:
        """x <- x + gamma * (x - vertex); ``vertex`` must be an atom."""
        for v in self.weights:
            self.weights[v] *= 1.0 + gamma
        self.weights[vertex] -= gamma
        self._point *= 1.0 + gamma
        self._point[list(vertex.selected)] -= gamma
        self._cleanup()

    _DROP_TOL = 1e-12

    def _cleanup(self) -> None:
        self._steps += 1
        dropped = [v for v, w in self.weights.items() if w <= self._DROP_TOL]
        if dropped:
            for v in dropped:
                del self.weights[v]
            # Renormalize after dropping stray mass so the point stays feasible.
            total = sum(self.weights.values())
            for v in self.weights:
                self.weights[v] /= total
            self._point = self._reconstruct()
        elif self._steps % 256 == 0:
            # Bound incremental rounding drift on long runs.
            self._point = self._reconstruct()

    def copy(self) -> "ActiveSet":
        return ActiveSet(self.polytope, self.weights)
