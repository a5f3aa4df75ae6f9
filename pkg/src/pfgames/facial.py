"""Facial distance of polytopes: certified lower bounds and brute force.

The facial distance of a polytope P is the smallest distance between a proper
face F and the convex hull of the vertices outside F.  It controls the linear
convergence rate of away-step Frank-Wolfe, so cheap lower bounds for
sequence-form polytopes certify per-iteration progress without geometry
computations.

Two closed-form lower bounds are exposed:

* vertex form: ``gamma / sqrt(n)`` where ``gamma`` is the least positive
  coordinate over all vertices and ``n`` the ambient dimension; when every
  vertex has at most ``k`` nonzeros the sharper ``gamma / sqrt(k)`` applies.
* equality form: polytopes ``{x >= 0 : Cx = d}`` with integer ``C`` satisfy
  ``1 / (||C||_inf sqrt(n))`` with the max-absolute-row-sum norm.

Treeplexes are 0/1-vertex polytopes cut out by integer flow constraints, so
both bounds apply with ``gamma = 1``.

``facial_distance_bruteforce`` computes the exact value on small instances by
enumerating candidate faces as zero-coordinate sets and minimizing the
distance between the two vertex hulls with our own away-step Frank-Wolfe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .afw import WolfeGap, afw_minimize
from .treeplex import ActiveSet, DecisionPoint, TreeplexPolytope, Vertex

__all__ = [
    "lower_bound_vertex_form",
    "lower_bound_integral_form",
    "facial_distance_bruteforce",
]


def lower_bound_vertex_form(gamma: float, n: int, k: int | None = None) -> float:
    """gamma / sqrt(n), or gamma / sqrt(k) given a vertex support bound k."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if k is not None:
        if not 1 <= k <= n:
            raise ValueError("support bound k must lie in [1, n]")
        return gamma / math.sqrt(k)
    return gamma / math.sqrt(n)


def lower_bound_integral_form(constraint_matrix: np.ndarray) -> float:
    """1 / (||C||_inf sqrt(n)) for integer equality constraints Cx = d, x >= 0."""
    c = np.asarray(constraint_matrix, dtype=float)
    if c.ndim != 2 or c.size == 0:
        raise ValueError("constraint matrix must be 2-dimensional and non-empty")
    if not np.all(c == np.round(c)):
        raise ValueError("constraint matrix must have integer entries")
    if np.any(c < 0):
        raise ValueError("constraint matrix entries must be nonnegative")
    norm = float(np.abs(c).sum(axis=1).max())
    if norm == 0:
        raise ValueError("constraint matrix is all zeros")
    n = c.shape[1]
    return 1.0 / (norm * math.sqrt(n))


@dataclass
class _HullDistance:
    """f(x0, lam, mu) = 0.5 * ||V lam - W mu||^2 over a product of simplices."""

    face: np.ndarray  # (n, |F|) vertex columns
    rest: np.ndarray  # (n, |R|) vertex columns

    def _split(self, x: np.ndarray):
        f = self.face.shape[1]
        return x[1 : 1 + f], x[1 + f :]

    def residual(self, x: np.ndarray) -> np.ndarray:
        lam, mu = self._split(x)
        return self.face @ lam - self.rest @ mu

    def value(self, x: np.ndarray) -> float:
        r = self.residual(x)
        return 0.5 * float(r @ r)

    def grad(self, x: np.ndarray) -> np.ndarray:
        r = self.residual(x)
        return np.concatenate(([0.0], self.face.T @ r, -(self.rest.T @ r)))

    def curvature(self, d: np.ndarray) -> float:
        dl, dm = self._split(d)
        rd = self.face @ dl - self.rest @ dm
        return float(rd @ rd)


def _hull_distance_squared_half(
    face: np.ndarray, rest: np.ndarray, gap_tol: float, abandon_above: float
) -> float:
    """min 0.5*dist(conv face, conv rest)^2, certified to ``gap_tol``.

    Abandons early (returning a safe overestimate) once the certified lower
    bound ``f(x) - gap`` exceeds ``abandon_above``; callers use this to skip
    faces that cannot improve a running minimum.
    """
    nf, nr = face.shape[1], rest.shape[1]
    poly = TreeplexPolytope(
        1 + nf + nr,
        [
            DecisionPoint(0, tuple(range(1, 1 + nf))),
            DecisionPoint(0, tuple(range(1 + nf, 1 + nf + nr))),
        ],
    )
    obj = _HullDistance(face, rest)
    init = ActiveSet.singleton(poly, poly.lmo(np.zeros(poly.num_sequences)))

    state = {"lb": 0.0}

    def early_stop(value: float, gap: float) -> bool:
        state["lb"] = max(state["lb"], value - gap)
        return state["lb"] >= abandon_above

    result = afw_minimize(
        obj, poly, init, WolfeGap(gap_tol), iteration_cap=10**5, early_stop=early_stop
    )
    if state["lb"] >= abandon_above:
        return max(result.value, abandon_above)
    return result.value


def facial_distance_bruteforce(
    polytope: TreeplexPolytope,
    gap_tol: float = 1e-10,
    max_dim: int = 20,
    enumeration_cap: int = 10**6,
) -> float:
    """Exact facial distance of a small treeplex.

    Candidate faces are generated as the vertex sets avoiding each subset Z of
    coordinates forced to zero; for each distinct split (F, complement) the
    distance between the two hulls is computed by away-step Frank-Wolfe on a
    product of weight simplices to a Wolfe-gap certificate of ``gap_tol``.
    """
    n = polytope.num_sequences
    if n > max_dim:
        raise ValueError(f"brute force limited to dimension {max_dim} (got {n})")
    vertices = polytope.enumerate_vertices(cap=enumeration_cap)
    columns = np.stack([v.as_array(n) for v in vertices], axis=1)
    masks = np.array([sum(1 << i for i in v.selected) for v in vertices], dtype=np.int64)
    num_vertices = len(vertices)

    seen: set[frozenset[int]] = set()
    splits: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for z in range(1, 1 << n):
        if z & 1:
            continue  # the empty sequence is in every support: empty face
        in_face = (masks & z) == 0
        count = int(in_face.sum())
        if count == 0 or count == num_vertices:
            continue
        face_idx = tuple(np.flatnonzero(in_face))
        key = frozenset(face_idx)
        comp_key = frozenset(range(num_vertices)) - key
        if key in seen or comp_key in seen:
            continue
        seen.add(key)
        splits.append((face_idx, tuple(sorted(comp_key))))

    if not splits:
        raise ValueError("polytope has no proper faces (single vertex?)")

    # Solve near faces first: a small running minimum prunes the rest quickly.
    splits.sort(key=lambda fr: min(len(fr[0]), len(fr[1])), reverse=True)
    best_half_sq = math.inf
    for face_idx, rest_idx in splits:
        half_sq = _hull_distance_squared_half(
            columns[:, face_idx], columns[:, rest_idx], gap_tol, abandon_above=best_half_sq
        )
        best_half_sq = min(best_half_sq, half_sq)
    return math.sqrt(2.0 * best_half_sq)
