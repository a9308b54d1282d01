"""Ground-truth solvers for desk-scale verification.

Exact optima via bitmask dynamic programming or brute permutation search,
plus an exhaustive enumeration of every improving alternating circle a
given gain policy can reach. These stay deliberately independent of the
search engine so they can serve as oracles for it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .candidates import CandidateSets
from .engine import AlternatingPath, SearchConfig, select_next_deleted_edge, try_close
from .errors import InstanceTooLarge
from .gains import GainPolicy, admits, assumed_g0, init_state, path_start, record
from .tour import ExchangeMove, Tour
from .tsplib import Instance, cost_row

HELD_KARP_LIMIT = 16
BRUTE_FORCE_LIMIT = 10
ENUMERATION_LIMIT = 12


@dataclass
class OracleResult:
    optimum: int
    witness_tour: list[int]


def _cost_table(inst: Instance) -> list[list[int]]:
    return [cost_row(inst, v).tolist() for v in range(1, inst.dimension + 1)]


def held_karp_optimum(inst: Instance) -> OracleResult:
    """Exact optimum by dynamic programming over vertex subsets (n <= 16)."""
    n = inst.dimension
    if n > HELD_KARP_LIMIT:
        raise InstanceTooLarge(f"held_karp_optimum handles n <= {HELD_KARP_LIMIT}, got {n}")
    dist = _cost_table(inst)
    m = n - 1  # bit j stands for vertex j+2
    size = 1 << m
    inf = float("inf")
    dp = [[inf] * m for _ in range(size)]
    parent = [[-1] * m for _ in range(size)]
    for j in range(m):
        dp[1 << j][j] = dist[0][j + 1]
    for mask in range(1, size):
        row = dp[mask]
        rest = ~mask & (size - 1)
        for j in range(m):
            if not (mask >> j) & 1:
                continue
            cur = row[j]
            if cur == inf:
                continue
            dj = dist[j + 1]
            rem = rest
            while rem:
                low = rem & -rem
                l = low.bit_length() - 1
                cand = cur + dj[l + 1]
                nm = mask | low
                if cand < dp[nm][l]:
                    dp[nm][l] = cand
                    parent[nm][l] = j
                rem ^= low
    full = size - 1
    best_j = -1
    best = inf
    for j in range(m):
        total = dp[full][j] + dist[j + 1][0]
        if total < best:
            best = total
            best_j = j
    chain = []
    mask, j = full, best_j
    while j != -1:
        chain.append(j)
        mask, j = mask ^ (1 << j), parent[mask][j]
    witness = [1] + [j + 2 for j in reversed(chain)]
    return OracleResult(int(best), witness)


def brute_force_optimum(inst: Instance) -> OracleResult:
    """Exact optimum over all (n-1)!/2 tours (n <= 10)."""
    n = inst.dimension
    if n > BRUTE_FORCE_LIMIT:
        raise InstanceTooLarge(f"brute_force_optimum handles n <= {BRUTE_FORCE_LIMIT}, got {n}")
    dist = _cost_table(inst)
    best = None
    witness: tuple[int, ...] = ()
    for perm in permutations(range(1, n)):
        if perm[0] > perm[-1]:  # each cycle in one orientation only
            continue
        total = dist[0][perm[0]]
        prev = perm[0]
        for v in perm[1:]:
            total += dist[prev][v]
            prev = v
        total += dist[prev][0]
        if best is None or total < best:
            best = total
            witness = perm
    return OracleResult(int(best), [1] + [v + 1 for v in witness])


def enumerate_closing_moves(
    inst: Instance,
    tour: Tour,
    max_depth: int,
    policy: GainPolicy,
    cands: CandidateSets,
) -> list[ExchangeMove]:
    """Every positive-gain alternating circle the policy admits, exhaustively.

    Unlike the engine this explores all admissible candidates and both
    deletable tour edges at every depth, from every starting vertex.
    Duplicate circles (same edge sets) are reported once.
    """
    n = inst.dimension
    if n > ENUMERATION_LIMIT:
        raise InstanceTooLarge(f"enumerate_closing_moves handles n <= {ENUMERATION_LIMIT}")
    if max_depth > 4:
        raise InstanceTooLarge("enumerate_closing_moves handles max_depth <= 4")
    cfg = SearchConfig(max_depth=max(2, max_depth), policy=policy)
    cost = inst.cost
    found: dict[tuple, ExchangeMove] = {}

    def grow(path: AlternatingPath, state) -> None:
        i = len(path.deleted)
        move = try_close(tour, path)
        if move is not None:
            found.setdefault(move.key(), move)
        if i >= max_depth:
            return
        t_even = path.nodes[-1]
        x_cost = path.deleted_costs[-1]
        gain_prev = path.gains[-1] if path.gains else 0
        prev_for_test = gain_prev if i > 1 else assumed_g0(policy, state)
        skip = (tour.next(t_even), tour.prev(t_even))
        for nbr, _, y_cost in cands.entries[t_even]:
            if nbr in skip or nbr in path.nodes:
                continue
            g_i = gain_prev + x_cost - y_cost
            if not admits(policy, state, i, g_i, prev_for_test):
                continue
            path.nodes.append(nbr)
            path.added.append((t_even, nbr))
            path.added_costs.append(y_cost)
            path.gains.append(g_i)
            next_state = record(policy, state, i, g_i)
            for t_even2 in select_next_deleted_edge(tour, path, cfg):
                path.nodes.append(t_even2)
                path.deleted.append((nbr, t_even2))
                path.deleted_costs.append(cost(nbr, t_even2))
                grow(path, next_state)
                path.nodes.pop()
                path.deleted.pop()
                path.deleted_costs.pop()
            path.nodes.pop()
            path.added.pop()
            path.added_costs.pop()
            path.gains.pop()

    for t1 in range(1, n + 1):
        for t2 in (tour.next(t1), tour.prev(t1)):
            path = AlternatingPath(
                nodes=[t1, t2],
                deleted=[(t1, t2)],
                deleted_costs=[cost(t1, t2)],
            )
            grow(path, path_start(policy, init_state(policy)))
    return [found[key] for key in sorted(found)]
