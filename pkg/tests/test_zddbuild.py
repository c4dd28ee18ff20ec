import random

import pytest

from phylozdd.core import ElementSet, Instance, canonical_key
from phylozdd.datagen import compression_family
from phylozdd.feasibility import brute_force_solutions
from phylozdd.reductions import BipartiteGraph, matching_to_idbpp
from phylozdd.zddbuild import (BuildDeadlineExceeded, build, iter_solutions,
                               make_order, solution_of)

from conftest import random_small_instance


class TestMakeOrder:
    def test_level_count_is_k(self):
        inst = compression_family(3, 2)
        vm = make_order(inst)
        assert vm.num_levels == inst.k == 6

    def test_fully_decided_zero_levels(self):
        inst = Instance.from_bounds(3, [([0], [0]), ([1, 2], [1, 2])])
        assert make_order(inst).num_levels == 0

    def test_character_major_order(self):
        inst = Instance.from_bounds(2, [([], [0, 1]), ([], [0, 1])])
        vm = make_order(inst, "character-major")
        assert vm.level_pairs == ((0, 0), (0, 1), (1, 0), (1, 1))

    def test_element_major_order(self):
        inst = Instance.from_bounds(2, [([], [0, 1]), ([], [0, 1])])
        vm = make_order(inst, "element-major")
        assert vm.level_pairs == ((0, 0), (1, 0), (0, 1), (1, 1))

    def test_classes_partition_the_grid(self):
        rng = random.Random(3)
        for _ in range(50):
            inst = random_small_instance(rng)
            vm = make_order(inst)
            cells = set(vm.level_pairs) | vm.forced_one | vm.forced_zero
            assert len(vm.level_pairs) + len(vm.forced_one) + len(vm.forced_zero) \
                == inst.m * inst.n
            assert cells == {(i, e) for i in range(inst.m) for e in range(inst.n)}

    def test_unknown_policy(self):
        with pytest.raises(ValueError):
            make_order(compression_family(1, 1), "zigzag")


class TestBuildExamples:
    def test_compression_family_counts(self):
        inst = compression_family(1, 1)
        root, _ = build(inst, make_order(inst))
        assert root.store.count(root) == 2

    def test_single_edge_reduction_count(self):
        inst = matching_to_idbpp(BipartiteGraph(1, 1, ((0, 0),)))
        root, _ = build(inst, make_order(inst))
        assert root.store.count(root) == len(brute_force_solutions(inst)) == 2

    def test_infeasible_gives_empty_terminal(self):
        inst = Instance.from_bounds(3, [([0, 1], [0, 1]), ([1, 2], [1, 2])])
        root, stats = build(inst, make_order(inst))
        assert int(root) == 0
        assert root.store.count(root) == 0
        assert stats.pair_steps == 1

    def test_m0_unique_empty_phylogeny(self):
        inst = Instance(4, 0, (), ())
        vm = make_order(inst)
        root, _ = build(inst, vm)
        assert root.store.count(root) == 1
        sols = list(iter_solutions(root, vm, inst))
        assert len(sols) == 1
        assert sols[0].sets == ()


class TestSolutionOf:
    def test_empty_member_gives_lower_bounds(self):
        inst = compression_family(2, 2)
        vm = make_order(inst)
        phylo = solution_of((), vm, inst)
        assert phylo.sets == inst.lower

    def test_full_member_gives_upper_bounds(self):
        inst = compression_family(2, 2)
        vm = make_order(inst)
        phylo = solution_of(tuple(range(vm.num_levels)), vm, inst)
        assert phylo.sets == inst.upper

    def test_unknown_level_rejected(self):
        inst = compression_family(1, 1)
        vm = make_order(inst)
        with pytest.raises(ValueError):
            solution_of((5,), vm, inst)

    def test_round_trip_against_oracle(self):
        rng = random.Random(17)
        for _ in range(60):
            inst = random_small_instance(rng, max_k=12)
            vm = make_order(inst)
            root, _ = build(inst, vm)
            store = root.store
            keys = sorted(canonical_key(p) for p in iter_solutions(root, vm, inst))
            oracle = [canonical_key(p) for p in brute_force_solutions(inst, cap=10**6)]
            assert keys == oracle


class TestBuildProperties:
    def test_oracle_exactness_counts_and_keys(self):
        rng = random.Random(20260810)
        for _ in range(200):
            inst = random_small_instance(rng)
            oracle = brute_force_solutions(inst, cap=10**6)
            vm = make_order(inst)
            root, stats = build(inst, vm)
            assert root.store.count(root) == len(oracle)
            keys = sorted(canonical_key(p) for p in iter_solutions(root, vm, inst))
            assert keys == [canonical_key(p) for p in oracle]
            assert stats.peak_nodes >= stats.final_nodes
            assert stats.pair_steps == inst.m * (inst.m - 1) // 2

    def test_order_invariance(self):
        rng = random.Random(31)
        for _ in range(60):
            inst = random_small_instance(rng, max_k=12)
            roots = {}
            for policy in ("character-major", "element-major"):
                vm = make_order(inst, policy)
                root, _ = build(inst, vm)
                keys = sorted(canonical_key(p) for p in iter_solutions(root, vm, inst))
                roots[policy] = (root.store.count(root), keys)
            a = roots["character-major"]
            b = roots["element-major"]
            assert a == b

    def test_deferral_safety(self):
        rng = random.Random(32)
        for _ in range(60):
            inst = random_small_instance(rng, max_k=12)
            vm = make_order(inst)
            r1, _ = build(inst, vm, pair_schedule="lexicographic")
            r2, _ = build(inst, vm, pair_schedule="deferred")
            k1 = sorted(canonical_key(p) for p in iter_solutions(r1, vm, inst))
            k2 = sorted(canonical_key(p) for p in iter_solutions(r2, vm, inst))
            assert k1 == k2

    def test_output_size_bound(self):
        rng = random.Random(33)
        for _ in range(40):
            inst = random_small_instance(rng, max_k=10)
            vm = make_order(inst)
            root, stats = build(inst, vm)
            h = root.store.count(root)
            assert stats.final_nodes <= vm.num_levels * h + 2

    def test_deadline_raises(self):
        inst = compression_family(5, 4)
        vm = make_order(inst)
        with pytest.raises(BuildDeadlineExceeded) as exc_info:
            build(inst, vm, deadline=0.0)
        assert exc_info.value.stats.wall_time >= 0.0
