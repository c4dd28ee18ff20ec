import random

import pytest

from phylozdd.core import ElementSet, Instance, is_laminar, is_sandwiched
from phylozdd.datagen import compression_family
from phylozdd.feasibility import brute_force_solutions, feasible
from phylozdd.reductions import BipartiteGraph, matching_to_idbpp

from conftest import random_small_instance


def forced_overlap_instance() -> Instance:
    # both characters fully decided; their sets cross
    return Instance.from_bounds(3, [([0, 1], [0, 1]), ([1, 2], [1, 2])])


class TestFeasible:
    def test_forced_overlap_infeasible(self):
        res = feasible(forced_overlap_instance())
        assert not res.feasible
        assert res.witness is None

    def test_compression_family_feasible_everywhere(self):
        for c, k in [(1, 1), (2, 3), (4, 2)]:
            res = feasible(compression_family(c, k))
            assert res.feasible
            assert is_laminar(res.witness.sets)

    def test_shared_endpoint_edges_feasible(self):
        g = BipartiteGraph(2, 1, ((0, 0), (1, 0)))
        inst = matching_to_idbpp(g)
        res = feasible(inst)
        assert res.feasible
        assert len(brute_force_solutions(inst)) == 3

    def test_empty_instance(self):
        res = feasible(Instance(0, 0, (), ()))
        assert res.feasible
        assert res.witness.m == 0

    def test_oracle_agreement_and_witness_validity(self):
        rng = random.Random(20260809)
        checked = 0
        for _ in range(500):
            inst = random_small_instance(rng)
            res = feasible(inst)
            oracle = brute_force_solutions(inst, cap=10**6)
            assert res.feasible == bool(oracle)
            if res.feasible:
                assert is_laminar(res.witness.sets)
                assert is_sandwiched(res.witness, inst)
            checked += 1
        assert checked == 500

    def test_tightening_monotone(self):
        # shrinking U or growing L never makes an infeasible instance feasible
        rng = random.Random(7)
        for _ in range(120):
            inst = random_small_instance(rng, max_m=4, max_n=5, max_k=10)
            was_feasible = feasible(inst).feasible
            lower = list(inst.lower)
            upper = list(inst.upper)
            for _step in range(3):
                candidates = [(i, e, True) for i in range(inst.m)
                              for e in (upper[i] - lower[i])]
                candidates += [(i, e, False) for i in range(inst.m)
                               for e in (upper[i] - lower[i])]
                if not candidates:
                    break
                i, e, grow = candidates[rng.randrange(len(candidates))]
                if grow:
                    lower[i] = lower[i].with_element(e)
                else:
                    upper[i] = ElementSet(inst.n, upper[i].bits & ~(1 << e))
                tightened = Instance(inst.n, inst.m, tuple(lower), tuple(upper))
                now_feasible = feasible(tightened).feasible
                if not was_feasible:
                    assert not now_feasible
                was_feasible = now_feasible


class TestBruteForce:
    def test_fully_decided_laminar_unique(self):
        inst = Instance.from_bounds(4, [([0, 1], [0, 1]), ([2], [2])])
        sols = brute_force_solutions(inst)
        assert len(sols) == 1
        assert sols[0].sets == inst.lower

    def test_compression_family_2_to_kc(self):
        assert len(brute_force_solutions(compression_family(2, 1))) == 4

    def test_forced_overlap_zero(self):
        assert brute_force_solutions(forced_overlap_instance()) == []

    def test_pair_limit_refusal(self):
        inst = compression_family(5, 5)  # k = 25 undecided pairs
        with pytest.raises(ValueError, match="24"):
            brute_force_solutions(inst)

    def test_cap_refusal(self):
        inst = compression_family(4, 3)  # 4096 solutions
        with pytest.raises(ValueError, match="cap"):
            brute_force_solutions(inst, cap=100)
