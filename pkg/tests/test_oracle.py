import random

import pytest

from lkgain import (
    GainKind,
    GainPolicy,
    apply_move,
    brute_force_optimum,
    enumerate_closing_moves,
    held_karp_optimum,
    nn_candidates,
    parse_tsplib,
    tour_cost,
)
from lkgain.errors import InstanceTooLarge

from conftest import OPTIMAL_ORDER, random_euc_instance, random_tour

STRICT = GainPolicy(GainKind.STRICT)
HOMOG = GainPolicy(GainKind.HOMOGENEOUS)


class TestExactOptima:
    def test_hexagon_held_karp(self, hexagon):
        res = held_karp_optimum(hexagon)
        assert res.optimum == 20
        assert tour_cost(hexagon, res.witness_tour) == 20
        # the outer ring is the unique optimum (up to rotation/reflection)
        ring = set(map(frozenset, zip(OPTIMAL_ORDER, OPTIMAL_ORDER[1:] + [1])))
        got = set(
            map(frozenset, zip(res.witness_tour, res.witness_tour[1:] + [res.witness_tour[0]]))
        )
        assert got == ring

    def test_hexagon_brute_force(self, hexagon):
        res = brute_force_optimum(hexagon)
        assert res.optimum == 20
        assert tour_cost(hexagon, res.witness_tour) == 20

    def test_three_vertices(self):
        inst = random_euc_instance(3, 1)
        res = held_karp_optimum(inst)
        assert res.optimum == tour_cost(inst, [1, 2, 3])

    def test_equal_cost_square(self):
        text = (
            "NAME: sq\nTYPE: TSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EXPLICIT\n"
            "EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n"
            "0 7 7 7\n7 0 7 7\n7 7 0 7\n7 7 7 0\nEOF\n"
        )
        inst = parse_tsplib(text)
        assert brute_force_optimum(inst).optimum == 4 * 7

    @pytest.mark.parametrize("n,seed", [(8, 0), (8, 5), (10, 2)])
    def test_cross_oracle_agreement(self, n, seed):
        inst = random_euc_instance(n, seed)
        assert held_karp_optimum(inst).optimum == brute_force_optimum(inst).optimum

    def test_size_limits(self):
        with pytest.raises(InstanceTooLarge):
            held_karp_optimum(random_euc_instance(17, 0))
        with pytest.raises(InstanceTooLarge):
            brute_force_optimum(random_euc_instance(11, 0))


class TestEnumerateClosingMoves:
    def test_worked_relaxed_circle_only_under_homogeneous(self, hexagon, hexagon_start):
        cands = nn_candidates(hexagon, 5)
        strict_moves = enumerate_closing_moves(hexagon, hexagon_start, 3, STRICT, cands)
        homog_moves = enumerate_closing_moves(hexagon, hexagon_start, 3, HOMOG, cands)
        # the three-exchange rooted at f: delete (f,a),(b,e),(a,d), re-add (f,a) to close
        relaxed_key = (
            tuple(sorted([(1, 6), (2, 5), (1, 4)])),
            tuple(sorted([(1, 2), (4, 5), (1, 6)])),
        )
        strict_keys = {m.key() for m in strict_moves}
        homog_keys = {m.key() for m in homog_moves}
        assert relaxed_key in homog_keys
        assert relaxed_key not in strict_keys
        assert strict_keys <= homog_keys

    def test_depth_one_enumeration_is_empty(self, hexagon, hexagon_start):
        cands = nn_candidates(hexagon, 5)
        assert enumerate_closing_moves(hexagon, hexagon_start, 1, STRICT, cands) == []

    def test_policy_inclusion_on_random_pairs(self):
        rng = random.Random(1)
        for case in range(8):
            n = rng.choice((6, 8, 10))
            inst = random_euc_instance(n, 100 + case)
            tour = random_tour(inst, case)
            cands = nn_candidates(inst, 5)
            strict_keys = {
                m.key() for m in enumerate_closing_moves(inst, tour, 3, STRICT, cands)
            }
            homog_keys = {
                m.key() for m in enumerate_closing_moves(inst, tour, 3, HOMOG, cands)
            }
            assert strict_keys <= homog_keys

    def test_every_move_applies_with_exact_gain(self, hexagon, hexagon_start):
        cands = nn_candidates(hexagon, 5)
        for move in enumerate_closing_moves(hexagon, hexagon_start, 3, HOMOG, cands):
            after = apply_move(hexagon_start, move)
            after.check()
            assert after.cost == hexagon_start.cost - move.gain

    def test_size_guards(self, hexagon, hexagon_start):
        cands = nn_candidates(hexagon, 5)
        with pytest.raises(InstanceTooLarge):
            enumerate_closing_moves(hexagon, hexagon_start, 5, STRICT, cands)
        big = random_euc_instance(13, 0)
        with pytest.raises(InstanceTooLarge):
            enumerate_closing_moves(big, random_tour(big, 0), 3, STRICT, nn_candidates(big, 5))
