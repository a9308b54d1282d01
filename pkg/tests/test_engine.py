import random

import pytest

from lkgain import (
    AlternatingPath,
    GainCursor,
    GainKind,
    GainPolicy,
    SearchConfig,
    Tour,
    enumerate_closing_moves,
    find_sequential_edge_to_add,
    held_karp_optimum,
    improve_from_vertex,
    nn_candidates,
    run_trial,
    select_next_deleted_edge,
    try_close,
    parse_tsplib,
)

from conftest import OPTIMAL_ORDER, START_ORDER, random_euc_instance, random_tour


def make_path(tour, *vertices):
    """Path t_1, t_2, ... with edges alternating delete/add from the vertex list."""
    cost = tour.inst.cost
    path = AlternatingPath(nodes=[vertices[0]])
    for idx in range(1, len(vertices)):
        u, v = vertices[idx - 1], vertices[idx]
        path.nodes.append(v)
        if idx % 2 == 1:
            path.deleted.append((u, v))
            path.deleted_costs.append(cost(u, v))
        else:
            path.added.append((u, v))
            path.added_costs.append(cost(u, v))
            delta = path.deleted_costs[-1] - path.added_costs[-1]
            path.gains.append((path.gains[-1] if path.gains else 0) + delta)
    return path


def cfg_for(kind, **kwargs):
    return SearchConfig(policy=GainPolicy(kind, k_period=kwargs.pop("k", 5)), **kwargs)


@pytest.fixture()
def full_cands(hexagon):
    return nn_candidates(hexagon, 5)


class TestFindSequentialEdge:
    def test_strict_finds_nothing_from_f(self, hexagon_start, full_cands):
        path = make_path(hexagon_start, 6, 1)  # x_1 = (f, a), cost 3
        cfg = cfg_for(GainKind.STRICT)
        state = GainCursor(cfg.policy).path_state()
        assert find_sequential_edge_to_add(hexagon_start, path, 0, cfg, full_cands, state) is None

    def test_homogeneous_takes_cheapest_fresh_candidate(self, hexagon_start, full_cands):
        path = make_path(hexagon_start, 6, 1)
        cfg = cfg_for(GainKind.HOMOGENEOUS)
        state = GainCursor(cfg.policy).path_state()
        found = find_sequential_edge_to_add(hexagon_start, path, 0, cfg, full_cands, state)
        assert found == (2, 4, -1)  # y_1 = (a, b), G_1 = 3 - 4

    def test_empty_candidate_list(self, hexagon_start):
        from lkgain import CandidateSets, CandidateKind

        empty = CandidateSets(CandidateKind.NEAREST, 1, [[] for _ in range(7)])
        path = make_path(hexagon_start, 6, 1)
        cfg = cfg_for(GainKind.HOMOGENEOUS)
        state = GainCursor(cfg.policy).path_state()
        assert find_sequential_edge_to_add(hexagon_start, path, 0, cfg, empty, state) is None


class TestSelectNextDeletedEdge:
    def test_two_tour_edges_offered(self, hexagon_start):
        path = make_path(hexagon_start, 1, 4, 5)  # x_1=(a,d), y_1=(d,e)
        options = select_next_deleted_edge(hexagon_start, path, cfg_for(GainKind.STRICT))
        assert sorted(options) == [2, 6]  # both tour edges at e

    def test_deleted_edges_excluded(self, hexagon_start):
        # after x_1 = (a,d), y_1 brings the path back next to d: (d,c) remains
        path = make_path(hexagon_start, 4, 1)
        path.nodes.append(4)  # artificial: stand at d with (a,d) deleted
        options = select_next_deleted_edge(hexagon_start, path, cfg_for(GainKind.STRICT))
        assert options == [3]  # only (d,c); (d,a) already deleted

    def test_feasibility_filter_at_period(self, hexagon_start):
        path = make_path(hexagon_start, 1, 4, 5)
        cfg = cfg_for(GainKind.STRICT, feasibility_period=2)
        options = select_next_deleted_edge(hexagon_start, path, cfg)
        # deleting (e,f) would need closing edge (f,a), still a tour edge: filtered
        assert options == [2]

    def test_all_edges_gone(self, hexagon_start):
        path = make_path(hexagon_start, 1, 4)
        path.deleted.append((4, 3))
        path.deleted_costs.append(hexagon_start.inst.cost(4, 3))
        path.nodes.append(3)
        path.nodes.append(4)  # stand at d with both its tour edges deleted
        options = select_next_deleted_edge(hexagon_start, path, cfg_for(GainKind.STRICT))
        assert options == []


class TestTryClose:
    def test_worked_three_exchange_closes(self, hexagon_start):
        # t1=f: x1=(f,e), y1=(e,d), x2=(d,a), y2=(a,b), x3=(b,e): close (e,f), G_3=4
        path = make_path(hexagon_start, 6, 5, 4, 1, 2, 5)
        move = try_close(hexagon_start, path)
        assert move is not None
        assert move.gain == 4
        assert move.added[-1] == (5, 6)

    def test_zero_gain_close_rejected(self):
        text = (
            "NAME: square\nTYPE: TSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EXPLICIT\n"
            "EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n"
            "0 5 4 5\n5 0 5 5\n4 5 0 5\n5 5 5 0\nEOF\n"
        )
        inst = parse_tsplib(text)
        t = Tour(inst, [1, 2, 3, 4])
        # x1=(1,2)=5, y1=(2,4)=5, x2=(4,3)=5: closing (3,1)=4 -> gain 1
        path = make_path(t, 1, 2, 4, 3)
        move = try_close(t, path)
        assert move is not None and move.gain == 1
        # on an equal-cost square every close has gain exactly 0: rejected
        flat = parse_tsplib(text.replace("0 5 4 5", "0 5 5 5").replace("4 5 0 5", "5 5 0 5"))
        t = Tour(flat, [1, 2, 3, 4])
        path = make_path(t, 1, 2, 4, 3)
        assert try_close(t, path) is None

    def test_single_deleted_edge_never_closes(self, hexagon_start):
        path = make_path(hexagon_start, 1, 4)
        assert try_close(hexagon_start, path) is None


class TestImproveFromVertex:
    def test_strict_from_a_finds_worked_two_exchange(self, hexagon_start, full_cands):
        cfg = cfg_for(GainKind.STRICT)
        res = improve_from_vertex(hexagon_start, 1, cfg, full_cands, GainCursor(cfg.policy))
        assert res is not None
        assert res.tour.cost == 20
        assert res.move.key() == (((1, 4), (2, 5)), ((1, 2), (4, 5)))
        assert res.ledger == [2, 4]

    def test_strict_improves_from_exactly_four_vertices(self, hexagon_start, full_cands):
        cfg = cfg_for(GainKind.STRICT)
        improving = {
            t1
            for t1 in range(1, 7)
            if improve_from_vertex(hexagon_start, t1, cfg, full_cands, GainCursor(cfg.policy))
        }
        assert improving == {1, 2, 4, 5}  # c and f are stuck under the strict rule

    def test_strict_from_f_fails_homogeneous_succeeds(self, hexagon_start, full_cands):
        strict = cfg_for(GainKind.STRICT)
        assert improve_from_vertex(hexagon_start, 6, strict, full_cands, GainCursor(strict.policy)) is None
        homog = cfg_for(GainKind.HOMOGENEOUS)
        res = improve_from_vertex(hexagon_start, 6, homog, full_cands, GainCursor(homog.policy))
        assert res is not None
        assert res.tour.cost == 20
        assert res.ledger == [-1, 1, 4]

    def test_optimal_tour_has_no_improvement(self, hexagon, full_cands):
        optimal = Tour(hexagon, OPTIMAL_ORDER)
        for kind in GainKind:
            cfg = cfg_for(kind, validate=True)
            for t1 in range(1, 7):
                assert improve_from_vertex(optimal, t1, cfg, full_cands, GainCursor(cfg.policy)) is None
        # cross-check with the exhaustive enumeration: no closing circle exists
        moves = enumerate_closing_moves(hexagon, optimal, 3, GainPolicy(GainKind.HOMOGENEOUS), full_cands)
        assert moves == []


class TestRunTrial:
    def test_reaches_optimum_from_any_seed(self, hexagon, full_cands):
        for seed in range(8):
            cfg = cfg_for(GainKind.HOMOGENEOUS, validate=True)
            out = run_trial(
                Tour(hexagon, START_ORDER), cfg, full_cands, GainCursor(cfg.policy), random.Random(seed)
            )
            assert out.cost == 20

    def test_locally_optimal_input_unchanged(self, hexagon, full_cands):
        cfg = cfg_for(GainKind.STRICT)
        optimal = Tour(hexagon, OPTIMAL_ORDER)
        out = run_trial(optimal, cfg, full_cands, GainCursor(cfg.policy), random.Random(0))
        assert out.order == optimal.order

    def test_never_beats_exact_optimum(self):
        inst = random_euc_instance(10, 3)
        opt = held_karp_optimum(inst).optimum
        cands = nn_candidates(inst, 5)
        for kind in GainKind:
            cfg = cfg_for(kind, validate=True)
            out = run_trial(random_tour(inst, 2), cfg, cands, GainCursor(cfg.policy), random.Random(5))
            assert out.cost >= opt

    def test_deterministic_for_fixed_seed(self):
        inst = random_euc_instance(30, 12)
        cands = nn_candidates(inst, 5)
        cfg = cfg_for(GainKind.TILTED)
        runs = []
        for _ in range(2):
            out = run_trial(random_tour(inst, 9), cfg, cands, GainCursor(cfg.policy), random.Random(4))
            runs.append((out.cost, tuple(out.order)))
        assert runs[0] == runs[1]

    def test_history_ledgers_satisfy_policy(self):
        inst = random_euc_instance(40, 23)
        cands = nn_candidates(inst, 5)
        for kind in (GainKind.HOMOGENEOUS, GainKind.TILTED):
            cfg = cfg_for(kind, validate=True)
            history = []
            run_trial(random_tour(inst, 6), cfg, cands, GainCursor(cfg.policy), random.Random(7), history=history)
            assert history
            for imp in history:
                assert imp.gain > 0
                assert imp.ledger[-1] == imp.gain
                for a, b in zip(imp.ledger, imp.ledger[1:]):
                    assert a > 0 or b > 0
