"""Hamiltonian-cycle bookkeeping and k-opt exchange application.

A tour is stored as an order array plus its inverse position array, which
gives O(1) successor/predecessor/orientation queries. Exchanges are
validated and applied through an arc decomposition: deleting k tour edges
splits the cycle into k arcs, and the result is a single Hamiltonian cycle
exactly when the added edges stitch all arcs into one ring. The walk over
arcs costs O(k log k), independent of n, so feasibility probes during the
search stay cheap; materialising an accepted move is a single O(n) splice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import (
    IndexOutOfRange,
    MoveInfeasible,
    NotAPermutation,
    PathInconsistent,
    VerticesNotDistinct,
)
from .tsplib import Instance, tour_cost

Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    """Canonical undirected form of an edge."""
    return (u, v) if u < v else (v, u)


@dataclass
class ExchangeMove:
    """A k-opt exchange: delete the tour edges X, add the edges Y."""

    deleted: list[Edge]
    added: list[Edge]
    gain: int

    def key(self) -> tuple[tuple[Edge, ...], tuple[Edge, ...]]:
        """Identity of the move as unordered edge sets."""
        return (
            tuple(sorted(edge_key(*e) for e in self.deleted)),
            tuple(sorted(edge_key(*e) for e in self.added)),
        )


class Tour:
    """Cyclic vertex order with O(1) next/prev/between and cached cost.

    A tour belongs to a single search run; the instance it references is
    immutable and may be shared freely across concurrent runs.
    """

    __slots__ = ("inst", "n", "order", "position", "cost")

    def __init__(self, inst: Instance, order: Sequence[int], cost: int | None = None):
        n = inst.dimension
        if len(order) != n or sorted(order) != list(range(1, n + 1)):
            raise NotAPermutation(f"order is not a permutation of 1..{n}")
        self.inst = inst
        self.n = n
        self.order: list[int] = list(order)
        self.position: list[int] = [0] * (n + 1)
        for idx, v in enumerate(self.order):
            self.position[v] = idx
        self.cost: int = tour_cost(inst, self.order) if cost is None else cost

    @classmethod
    def from_order(cls, inst: Instance, seq: Sequence[int]) -> "Tour":
        return cls(inst, seq)

    def copy(self) -> "Tour":
        dup = object.__new__(Tour)
        dup.inst = self.inst
        dup.n = self.n
        dup.order = self.order.copy()
        dup.position = self.position.copy()
        dup.cost = self.cost
        return dup

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise IndexOutOfRange(f"vertex out of range 1..{self.n}: {v}")

    def next(self, v: int) -> int:
        """Cyclic successor of v."""
        self._check_vertex(v)
        idx = self.position[v] + 1
        return self.order[idx if idx < self.n else 0]

    def prev(self, v: int) -> int:
        """Cyclic predecessor of v."""
        self._check_vertex(v)
        return self.order[self.position[v] - 1]

    def between(self, a: int, b: int, c: int) -> bool:
        """True iff walking from a in successor direction meets b before c."""
        if a == b or b == c or a == c:
            raise VerticesNotDistinct(f"between() needs distinct vertices: {a}, {b}, {c}")
        for v in (a, b, c):
            self._check_vertex(v)
        pa, pb, pc = self.position[a], self.position[b], self.position[c]
        return (pb - pa) % self.n < (pc - pa) % self.n

    def has_edge(self, u: int, v: int) -> bool:
        """True iff (u, v) is an edge of the current tour."""
        d = (self.position[u] - self.position[v]) % self.n
        return d == 1 or d == self.n - 1

    def edges(self) -> Iterator[Edge]:
        for idx, v in enumerate(self.order):
            w = self.order[idx + 1] if idx + 1 < self.n else self.order[0]
            yield (v, w)

    def check(self) -> None:
        """Full O(n) invariant audit: permutation, inverse arrays, cached cost."""
        n = self.n
        seen = bytearray(n + 1)
        for v in self.order:
            assert 1 <= v <= n and not seen[v], "order not a permutation"
            seen[v] = 1
        assert all(self.position[v] == i for i, v in enumerate(self.order)), (
            "position is not the inverse of order"
        )
        v = self.order[0]
        for _ in range(n):
            v = self.next(v)
        assert v == self.order[0], "successor walk does not close after n steps"
        assert self.cost == tour_cost(self.inst, self.order), "cached cost is stale"


def _cut_positions(tour: Tour, deleted: Sequence[Edge]) -> list[int]:
    """Map deleted tour edges to cut positions (cut p removes order[p]-order[p+1])."""
    n = tour.n
    cuts = []
    seen = set()
    for u, v in deleted:
        key = edge_key(u, v)
        if key in seen:
            raise PathInconsistent(f"edge deleted twice: {key}")
        seen.add(key)
        if not tour.has_edge(u, v):
            raise PathInconsistent(f"not a tour edge: ({u}, {v})")
        pu, pv = tour.position[u], tour.position[v]
        cuts.append(pu if (pv - pu) % n == 1 else pv)
    cuts.sort()
    return cuts


def _walk_arcs(
    tour: Tour, deleted: Sequence[Edge], added: Sequence[Edge]
) -> list[tuple[int, int, bool]] | None:
    """Stitch the k arcs left by `deleted` along `added`; None if not one cycle.

    Returns the arc tour as (start_pos, end_pos, forward) triples when the
    exchange yields a single Hamiltonian cycle.
    """
    k = len(deleted)
    if k == 0 or len(added) != k:
        raise PathInconsistent(f"need equally many deleted and added edges, got {k}/{len(added)}")
    # Degree balance: every touched vertex must lose and gain equally often.
    balance: dict[int, int] = {}
    for u, v in deleted:
        balance[u] = balance.get(u, 0) + 1
        balance[v] = balance.get(v, 0) + 1
    for u, v in added:
        if u == v:
            return None
        balance[u] = balance.get(u, 0) - 1
        balance[v] = balance.get(v, 0) - 1
    if any(balance.values()):
        return None

    n = tour.n
    cuts = _cut_positions(tour, deleted)
    # Arc j spans positions cuts[j]+1 .. cuts[j+1] (cyclically); record endpoints.
    starts = [(cuts[j] + 1) % n for j in range(k)]
    ends = [cuts[(j + 1) % k] for j in range(k)]
    slot_of: dict[int, list[tuple[int, bool]]] = {}
    for j in range(k):
        slot_of.setdefault(tour.order[starts[j]], []).append((j, True))
        slot_of.setdefault(tour.order[ends[j]], []).append((j, False))
    incident: dict[int, list[int]] = {}
    for e, (u, v) in enumerate(added):
        incident.setdefault(u, []).append(e)
        incident.setdefault(v, []).append(e)

    used = [False] * k
    visited = [False] * k
    arc, entered_at_start = 0, True
    visited[0] = True
    sequence = [(starts[0], ends[0], True)]
    for step in range(k):
        exit_vertex = tour.order[ends[arc]] if entered_at_start else tour.order[starts[arc]]
        edge_idx = next((e for e in incident.get(exit_vertex, ()) if not used[e]), None)
        if edge_idx is None:
            return None
        used[edge_idx] = True
        u, v = added[edge_idx]
        w = v if u == exit_vertex else u
        slots = slot_of.get(w)
        if slots is None:
            return None
        if step == k - 1:
            # Closure: the walk must re-enter arc 0 where it began.
            return sequence if any(j == 0 and fwd for j, fwd in slots) else None
        nxt = next(((j, fwd) for j, fwd in slots if not visited[j]), None)
        if nxt is None:
            return None
        arc, entered_at_start = nxt
        visited[arc] = True
        if entered_at_start:
            sequence.append((starts[arc], ends[arc], True))
        else:
            sequence.append((ends[arc], starts[arc], False))
    return None  # not reached


def _two_exchange_valid(tour: Tour, deleted: Sequence[Edge], added: Sequence[Edge]) -> bool:
    """2-exchange validity without the walk: both added edges must cross arcs."""
    cuts = _cut_positions(tour, deleted)
    n = tour.n
    p1, p2 = cuts
    ends_a = (tour.order[(p1 + 1) % n], tour.order[p2])
    for u, v in added:
        if u == v:
            return False
        if (u in ends_a) == (v in ends_a):
            return False
    # Degree balance at the four slot vertices.
    balance: dict[int, int] = {}
    for u, v in deleted:
        balance[u] = balance.get(u, 0) + 1
        balance[v] = balance.get(v, 0) + 1
    for u, v in added:
        balance[u] = balance.get(u, 0) - 1
        balance[v] = balance.get(v, 0) - 1
    return not any(balance.values())


def close_up_is_tour(tour: Tour, deleted: Sequence[Edge], added: Sequence[Edge]) -> bool:
    """True iff removing `deleted` and inserting `added` leaves one Hamiltonian cycle.

    `added` must already include the closing edge, so both lists have equal
    length. Runs in O(k log k) for a k-edge exchange.
    """
    if len(deleted) == 2 and len(added) == 2:
        return _two_exchange_valid(tour, deleted, added)
    return _walk_arcs(tour, deleted, added) is not None


def apply_move(tour: Tour, move: ExchangeMove) -> Tour:
    """Return the tour obtained by applying `move`; the input is left untouched."""
    sequence = _walk_arcs(tour, move.deleted, move.added)
    if sequence is None:
        raise MoveInfeasible("exchange does not produce a single Hamiltonian cycle")
    n = tour.n
    order = tour.order
    new_order: list[int] = []
    for start, end, forward in sequence:
        if forward:
            if start <= end:
                new_order.extend(order[start : end + 1])
            else:
                new_order.extend(order[start:])
                new_order.extend(order[: end + 1])
        else:
            if end <= start:
                new_order.extend(order[end : start + 1][::-1])
            else:
                seg = order[end:] + order[: start + 1]
                new_order.extend(seg[::-1])
    result = object.__new__(Tour)
    result.inst = tour.inst
    result.n = n
    result.order = new_order
    position = [0] * (n + 1)
    for idx, v in enumerate(new_order):
        position[v] = idx
    result.position = position
    result.cost = tour.cost - move.gain
    return result
