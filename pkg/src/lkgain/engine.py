"""Variable-depth sequential edge exchange over a tour.

From a starting vertex the search grows an alternating path: delete a tour
edge x_i, add a candidate edge y_i admitted by the gain policy, repeat up
to the depth cap. After every deleted edge (from the second onwards) it
tries to close the path back to the start with strictly positive total
gain and applies the first improving exchange found. Candidate edges are
scanned in rank order and only the first admissible one is taken; the
deleted edge is backtracked over both tour edges at depths one and two and
pinned to the first feasible choice deeper, keeping the tree small.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from random import Random

from .candidates import CandidateSets
from .gains import GainCursor, GainKind, GainPolicy, GainState, admits, assumed_g0, record
from .tour import Edge, ExchangeMove, Tour, apply_move, close_up_is_tour, edge_key


@dataclass
class SearchConfig:
    """Depth cap, feasibility period r, gain policy and debug validation."""

    max_depth: int = 5
    feasibility_period: int = 5
    policy: GainPolicy = GainPolicy(GainKind.STRICT)
    validate: bool = False

    def __post_init__(self) -> None:
        if self.max_depth < 2:
            raise ValueError("max_depth must be >= 2")
        if self.feasibility_period < 1:
            raise ValueError("feasibility_period must be >= 1")


@dataclass
class AlternatingPath:
    """In-progress sequence t_1.. with deleted/added edges and prefix gains."""

    nodes: list[int]
    deleted: list[Edge] = field(default_factory=list)
    deleted_costs: list[int] = field(default_factory=list)
    added: list[Edge] = field(default_factory=list)
    added_costs: list[int] = field(default_factory=list)
    gains: list[int] = field(default_factory=list)


@dataclass
class Improvement:
    """An applied exchange: the resulting tour plus its gain ledger."""

    tour: Tour
    gain: int
    move: ExchangeMove
    ledger: list[int]
    start_vertex: int


def find_sequential_edge_to_add(
    tour: Tour,
    path: AlternatingPath,
    gain_prev: int,
    cfg: SearchConfig,
    cands: CandidateSets,
    state: GainState,
) -> tuple[int, int, int] | None:
    """First admissible candidate at t_{2i}, as (t_{2i+1}, cost, G_i).

    `gain_prev` is the numeric G_{i-1} (0 at step one, where the policy's
    assumed G_0 is used for the admission test instead). Candidates equal
    to a tour neighbour of t_{2i} would delete-and-add the same edge and
    are skipped, as are vertices already on the path.
    """
    t_even = path.nodes[-1]
    x_cost = path.deleted_costs[-1]
    i = len(path.deleted)
    nbr_next = tour.next(t_even)
    nbr_prev = tour.prev(t_even)
    nodes = path.nodes
    policy = cfg.policy
    prev_for_test = gain_prev if i > 1 else assumed_g0(policy, state)
    for nbr, _, y_cost in cands.entries[t_even]:
        if nbr == nbr_next or nbr == nbr_prev or nbr in nodes:
            continue
        g_i = gain_prev + x_cost - y_cost
        if admits(policy, state, i, g_i, prev_for_test):
            return nbr, y_cost, g_i
    return None


def select_next_deleted_edge(tour: Tour, path: AlternatingPath, cfg: SearchConfig) -> list[int]:
    """Endpoints t_{2i+2} of tour edges at t_{2i+1} usable as x_{i+1}.

    Already-deleted edges are excluded. When the new depth is a multiple of
    the feasibility period, the edge must not have been added earlier
    (disjunctivity) and deleting it must leave the tour closable.
    """
    t_odd = path.nodes[-1]
    t1 = path.nodes[0]
    depth = len(path.deleted) + 1
    at_period = depth % cfg.feasibility_period == 0
    options: list[int] = []
    for t_even in (tour.next(t_odd), tour.prev(t_odd)):
        key = edge_key(t_odd, t_even)
        if any(edge_key(u, v) == key for u, v in path.deleted):
            continue
        if at_period:
            if any(edge_key(u, v) == key for u, v in path.added):
                continue
            if t_even == t1:
                continue
            closing = path.added + [(t_even, t1)]
            if not close_up_is_tour(tour, path.deleted + [(t_odd, t_even)], closing):
                continue
        options.append(t_even)
    return options


def try_close(tour: Tour, path: AlternatingPath) -> ExchangeMove | None:
    """Close t_{2i} back to t_1 if that yields a valid tour with positive gain."""
    i = len(path.deleted)
    if i < 2:
        return None
    t_even = path.nodes[-1]
    t1 = path.nodes[0]
    if t_even == t1:
        return None
    gain_prev = path.gains[-1] if path.gains else 0
    g_close = gain_prev + path.deleted_costs[-1] - tour.inst.cost(t_even, t1)
    if g_close <= 0:
        return None
    added = path.added + [(t_even, t1)]
    if not close_up_is_tour(tour, path.deleted, added):
        return None
    return ExchangeMove(list(path.deleted), added, g_close)


def _grow(
    tour: Tour,
    path: AlternatingPath,
    cfg: SearchConfig,
    cands: CandidateSets,
    state: GainState,
) -> tuple[ExchangeMove, list[int]] | None:
    """Depth-first growth of a path ending after x_i; first improvement wins."""
    move = try_close(tour, path)
    if move is not None:
        return move, path.gains + [move.gain]
    i = len(path.deleted)
    if i >= cfg.max_depth:
        return None
    gain_prev = path.gains[-1] if path.gains else 0
    found = find_sequential_edge_to_add(tour, path, gain_prev, cfg, cands, state)
    if found is None:
        return None
    t_odd, y_cost, g_i = found
    t_even = path.nodes[-1]
    path.nodes.append(t_odd)
    path.added.append((t_even, t_odd))
    path.added_costs.append(y_cost)
    path.gains.append(g_i)
    next_state = record(cfg.policy, state, i, g_i)
    options = select_next_deleted_edge(tour, path, cfg)
    if i + 1 > 2:
        options = options[:1]
    cost = tour.inst.cost
    for t_even2 in options:
        path.nodes.append(t_even2)
        path.deleted.append((t_odd, t_even2))
        path.deleted_costs.append(cost(t_odd, t_even2))
        result = _grow(tour, path, cfg, cands, next_state)
        if result is not None:
            return result
        path.nodes.pop()
        path.deleted.pop()
        path.deleted_costs.pop()
    path.nodes.pop()
    path.added.pop()
    path.added_costs.pop()
    path.gains.pop()
    return None


def _audit_improvement(old: Tour, new: Tour, move: ExchangeMove, ledger: list[int], cfg: SearchConfig) -> None:
    """Assert the structural invariants of one accepted exchange (O(k))."""
    cost = old.inst.cost
    steps = [cost(u, v) for u, v in move.deleted]
    offsets = [cost(u, v) for u, v in move.added]
    prefix = 0
    for idx, (cx, cy) in enumerate(zip(steps, offsets)):
        prefix += cx - cy
        assert ledger[idx] == prefix, "ledger does not match edge costs"
    assert move.gain == prefix > 0, "accepted exchange must have positive total gain"
    assert new.cost == old.cost - move.gain, "cost bookkeeping broken"
    # C4: edges alternate along t_1..t_{2k}, closing back to t_1.
    t1 = move.deleted[0][0]
    for idx, (u, v) in enumerate(move.added):
        assert u == move.deleted[idx][1], "added edge does not continue the path"
        if idx + 1 < len(move.deleted):
            assert v == move.deleted[idx + 1][0], "deleted edge does not continue the path"
    assert move.added[-1][1] == t1, "closing edge must return to the start vertex"
    # C5: at depths that are multiples of r the deleted edge was never added.
    added_keys = [edge_key(u, v) for u, v in move.added]
    for depth in range(cfg.feasibility_period, len(move.deleted) + 1, cfg.feasibility_period):
        key = edge_key(*move.deleted[depth - 1])
        assert key not in added_keys[: depth - 1], "disjunctivity violated"
    if cfg.policy.kind is not GainKind.STRICT:
        for a, b in zip(ledger, ledger[1:]):
            assert a > 0 or b > 0, "two consecutive non-positive prefix gains"
    else:
        assert all(g > 0 for g in ledger), "strict policy admitted a non-positive gain"


def improve_from_vertex(
    tour: Tour,
    t1: int,
    cfg: SearchConfig,
    cands: CandidateSets,
    cursor: GainCursor,
) -> Improvement | None:
    """Search for an improving exchange rooted at t1 and apply the first found.

    Both tour edges at t1 are tried as x_1 (successor edge first). Returns
    the improved tour with its gain ledger, or None when every branch is
    exhausted.
    """
    cost = tour.inst.cost
    for t2 in (tour.next(t1), tour.prev(t1)):
        path = AlternatingPath(
            nodes=[t1, t2],
            deleted=[(t1, t2)],
            deleted_costs=[cost(t1, t2)],
        )
        result = _grow(tour, path, cfg, cands, cursor.path_state())
        if result is None:
            continue
        move, ledger = result
        new_tour = apply_move(tour, move)
        if cfg.validate:
            _audit_improvement(tour, new_tour, move, ledger, cfg)
        cursor.move_applied(ledger)
        return Improvement(new_tour, move.gain, move, ledger, t1)
    return None


def run_trial(
    tour: Tour,
    cfg: SearchConfig,
    cands: CandidateSets,
    cursor: GainCursor,
    rng: Random,
    deadline: float | None = None,
    history: list[Improvement] | None = None,
) -> Tour:
    """Improve until all n starting vertices fail consecutively.

    Starting vertices are taken from an rng-shuffled ring; an improvement
    resets the failure count and the search carries on from the next vertex
    with the improved tour. The optional deadline (a time.perf_counter
    value) is checked once per lap over the ring.
    """
    n = tour.n
    vertices = list(range(1, n + 1))
    rng.shuffle(vertices)
    failures = 0
    idx = 0
    while failures < n:
        if idx == 0 and deadline is not None and time.perf_counter() >= deadline:
            return tour
        t1 = vertices[idx]
        idx += 1
        if idx == n:
            idx = 0
        found = improve_from_vertex(tour, t1, cfg, cands, cursor)
        if found is None:
            failures += 1
        else:
            tour = found.tour
            failures = 0
            if history is not None:
                history.append(found)
    if cfg.validate:
        tour.check()
    return tour
