"""Per-vertex ranked candidate edges: nearest-neighbour or alpha-nearness.

Alpha-nearness ranks an edge by how much longer a minimum 1-tree becomes
when forced to contain it. The 1-tree is built on costs penalised by
per-vertex multipliers, which a subgradient ascent tunes to tighten the
associated lower bound before alphas are read off. Multipliers are kept in
fixed point (scale 2**10) so every comparison stays exact integer work.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import TreeInconsistent
from .tour import Edge, edge_key
from .tsplib import Instance, cost_row

PI_SCALE = 1024


class CandidateKind(Enum):
    ALPHA = "alpha"
    NEAREST = "nearest"


@dataclass
class CandidateSets:
    """Ranked neighbour lists; entries[v] holds (neighbour, rank_key, cost)."""

    kind: CandidateKind
    max_candidates: int
    entries: list[list[tuple[int, int, int]]]

    def neighbors_of(self, v: int) -> list[int]:
        return [nbr for nbr, _, _ in self.entries[v]]


@dataclass
class OneTree:
    """Spanning tree on vertices 2..n plus the two cheapest edges at vertex 1.

    All lengths are in penalised fixed-point units; `pi` is indexed by
    vertex-1 and carries the multipliers the tree was built with.
    """

    mst_edges: list[Edge]
    one_edges: tuple[Edge, Edge]
    total_length: int
    degrees: np.ndarray
    pi: np.ndarray

    def edges(self) -> list[Edge]:
        return list(self.mst_edges) + list(self.one_edges)


def _penalized_row(inst: Instance, v: int, pi: np.ndarray) -> np.ndarray:
    row = cost_row(inst, v) * PI_SCALE + pi + pi[v - 1]
    row[v - 1] = 0
    return row


def nn_candidates(inst: Instance, max_candidates: int) -> CandidateSets:
    """Each vertex's `max_candidates` cheapest neighbours, cost-ascending."""
    if max_candidates < 1:
        raise ValueError("max_candidates must be >= 1")
    n = inst.dimension
    k = min(max_candidates, n - 1)
    huge = np.iinfo(np.int64).max
    entries: list[list[tuple[int, int, int]]] = [[]]
    for v in range(1, n + 1):
        row = cost_row(inst, v)
        row[v - 1] = huge
        kth = np.partition(row, k - 1)[k - 1]
        pool = np.flatnonzero(row <= kth).tolist()
        pool = sorted(pool, key=lambda p: (row[p], p))[:k]
        entries.append([(p + 1, int(row[p]), int(row[p])) for p in pool])
    return CandidateSets(CandidateKind.NEAREST, max_candidates, entries)


def minimum_one_tree(inst: Instance, pi: np.ndarray) -> OneTree:
    """Minimum 1-tree under penalised costs: Prim on 2..n plus vertex-1 edges."""
    n = inst.dimension
    pi = np.asarray(pi, dtype=np.int64)
    if pi.shape != (n,):
        raise ValueError(f"pi must have length {n}")
    huge = np.iinfo(np.int64).max // 2

    best = np.full(n, huge, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True  # vertex 1 joins separately
    degrees = np.zeros(n, dtype=np.int64)
    mst_edges: list[Edge] = []
    total = 0

    cur = 1  # 0-indexed vertex 2
    in_tree[cur] = True
    for _ in range(n - 2):
        prow = _penalized_row(inst, cur + 1, pi)
        upd = ~in_tree & (prow < best)
        best[upd] = prow[upd]
        parent[upd] = cur
        masked = np.where(in_tree, huge, best)
        nxt = int(np.argmin(masked))
        par = int(parent[nxt])
        mst_edges.append((par + 1, nxt + 1))
        total += int(best[nxt])
        degrees[par] += 1
        degrees[nxt] += 1
        in_tree[nxt] = True
        cur = nxt

    row1 = _penalized_row(inst, 1, pi)
    row1[0] = huge
    ranked = np.lexsort((np.arange(n), row1))
    e1, e2 = int(ranked[0]), int(ranked[1])
    one_edges = ((1, e1 + 1), (1, e2 + 1))
    total += int(row1[e1]) + int(row1[e2])
    degrees[0] = 2
    degrees[e1] += 1
    degrees[e2] += 1
    return OneTree(mst_edges, one_edges, total, degrees, pi.copy())


def one_tree_bound(tree: OneTree) -> int:
    """Lower bound w(pi) = tree length - 2*sum(pi), in fixed-point units."""
    return tree.total_length - 2 * int(tree.pi.sum())


def held_karp_ascent(inst: Instance, iterations: int) -> tuple[np.ndarray, float]:
    """Subgradient ascent on the 1-tree bound; returns best multipliers and bound.

    Step size follows t_k = t_0 * 0.9**k with t_0 = initial bound / (2n); the
    subgradient is degree - 2. The best bound seen is returned, so more
    iterations never yield a worse result.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    n = inst.dimension
    pi = np.zeros(n, dtype=np.int64)
    tree = minimum_one_tree(inst, pi)
    best_w = one_tree_bound(tree)
    best_pi = pi.copy()
    t0 = best_w / (2 * n)
    for k in range(iterations):
        step = int(t0 * 0.9**k)
        if step <= 0:
            break
        pi = pi + step * (tree.degrees - 2)
        tree = minimum_one_tree(inst, pi)
        w = one_tree_bound(tree)
        if w > best_w:
            best_w = w
            best_pi = pi.copy()
    return best_pi, best_w / PI_SCALE


class AlphaTable:
    """Lazy per-vertex alpha values (fixed-point units, scale 2**10).

    alpha(i, j) is the extra penalised length a minimum 1-tree incurs when
    forced to contain (i, j): zero on tree edges, cost minus the maximum
    tree-path edge for other pairs, and cost minus the second-cheapest
    vertex-1 edge for pairs at vertex 1.
    """

    def __init__(self, inst: Instance, tree: OneTree):
        n = inst.dimension
        if len(tree.mst_edges) != n - 2 or len(tree.one_edges) != 2:
            raise TreeInconsistent("one-tree does not have n edges")
        if tree.degrees[0] != 2:
            raise TreeInconsistent("vertex 1 must have degree 2")
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
        for u, v in tree.mst_edges:
            w = int(_penalized_cost(inst, tree.pi, u, v))
            adj[u].append((v, w))
            adj[v].append((u, w))
        reached = _reachable(adj, 2, n)
        if reached != n - 1:
            raise TreeInconsistent("mst part does not span vertices 2..n")
        self.inst = inst
        self.tree = tree
        self.n = n
        self._adj = adj
        self._tree_keys = {edge_key(u, v) for u, v in tree.edges()}
        row1 = _penalized_row(inst, 1, tree.pi)
        self._row1 = row1
        self._second_one = int(row1[tree.one_edges[1][1] - 1])
        self._rows: dict[int, np.ndarray] = {}

    def row(self, i: int) -> np.ndarray:
        """Alpha values from vertex i to every vertex (0-indexed, self = 0)."""
        cached = self._rows.get(i)
        if cached is not None:
            return cached
        n = self.n
        if i == 1:
            out = self._row1 - self._second_one
            out[0] = 0
            for _, j in self.tree.one_edges:
                out[j - 1] = 0
        else:
            beta = np.zeros(n, dtype=np.int64)
            visited = bytearray(n + 1)
            visited[i] = 1
            stack: list[tuple[int, int]] = [(i, -1)]
            while stack:
                v, running = stack.pop()
                for w, wcost in self._adj[v]:
                    if not visited[w]:
                        visited[w] = 1
                        m = wcost if running < 0 else max(running, wcost)
                        beta[w - 1] = m
                        stack.append((w, m))
            out = _penalized_row(self.inst, i, self.tree.pi) - beta
            out[i - 1] = 0
            if edge_key(1, i) in self._tree_keys:
                out[0] = 0
            else:
                out[0] = int(self._row1[i - 1]) - self._second_one
        self._rows[i] = out
        return out

    def value(self, i: int, j: int) -> int:
        return int(self.row(i)[j - 1])


def _penalized_cost(inst: Instance, pi: np.ndarray, u: int, v: int) -> int:
    return inst.cost(u, v) * PI_SCALE + int(pi[u - 1]) + int(pi[v - 1])


def _reachable(adj: list[list[tuple[int, int]]], start: int, n: int) -> int:
    seen = bytearray(n + 1)
    seen[start] = 1
    stack = [start]
    count = 1
    while stack:
        v = stack.pop()
        for w, _ in adj[v]:
            if not seen[w]:
                seen[w] = 1
                count += 1
                stack.append(w)
    return count


def alpha_values(inst: Instance, tree: OneTree) -> AlphaTable:
    """Alpha table for a minimum 1-tree (see :class:`AlphaTable`)."""
    return AlphaTable(inst, tree)


def build_candidate_sets(
    inst: Instance,
    kind: CandidateKind,
    max_candidates: int,
    ascent_iterations: int = 100,
) -> CandidateSets:
    """Candidate sets of the requested kind, deterministically ranked.

    ALPHA ranks by (alpha, penalised cost, id) on the ascent-optimised
    1-tree; NEAREST by (cost, id).
    """
    if kind is CandidateKind.NEAREST:
        return nn_candidates(inst, max_candidates)
    n = inst.dimension
    k = min(max_candidates, n - 1)
    pi, _ = held_karp_ascent(inst, ascent_iterations)
    tree = minimum_one_tree(inst, pi)
    table = alpha_values(inst, tree)
    ids = np.arange(n)
    entries: list[list[tuple[int, int, int]]] = [[]]
    for v in range(1, n + 1):
        crow = cost_row(inst, v)
        prow = crow * PI_SCALE + pi + pi[v - 1]
        arow = table.row(v)
        order = np.lexsort((ids, prow, arow))
        picked = [int(p) for p in order if p != v - 1][:k]
        entries.append([(p + 1, int(arow[p]), int(crow[p])) for p in picked])
    return CandidateSets(CandidateKind.ALPHA, max_candidates, entries)


def dump_candidates(cands: CandidateSets) -> str:
    """Debug text form: one "vertex: neighbour(rank_key) ..." line per vertex."""
    lines = [f"# kind={cands.kind.value} max={cands.max_candidates}"]
    for v, row in enumerate(cands.entries[1:], start=1):
        items = " ".join(f"{nbr}({rank})" for nbr, rank, _ in row)
        lines.append(f"{v}: {items}")
    return "\n".join(lines) + "\n"


def load_candidates(text: str, inst: Instance) -> CandidateSets:
    """Parse :func:`dump_candidates` output; costs are recomputed from inst."""
    kind = CandidateKind.NEAREST
    max_candidates = 0
    entries: list[list[tuple[int, int, int]]] = [[] for _ in range(inst.dimension + 1)]
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                key, _, value = token.partition("=")
                if key == "kind":
                    kind = CandidateKind(value)
                elif key == "max":
                    max_candidates = int(value)
            continue
        head, _, rest = line.partition(":")
        v = int(head)
        row = []
        for item in rest.split():
            nbr, _, rank = item.rstrip(")").partition("(")
            row.append((int(nbr), int(rank), inst.cost(v, int(nbr))))
        entries[v] = row
        max_candidates = max(max_candidates, len(row))
    return CandidateSets(kind, max_candidates, entries)
