"""Build a ZDD whose members are exactly the solutions of an instance.

Only undecided (character, species) pairs become diagram variables; pairs
forced present (species in L_i) or forced absent (species outside U_i) are
substituted as constants, so conditions on them either vanish, collapse to a
single-variable filter, or empty a whole case.

Starting from the family of all subsets of the undecided pairs, each
unordered character pair {i, j} contributes one constraint: the union of
three filtered cases (i inside j, j inside i, disjoint), each case filtering
over all species at once. Processing a pair can only remove members, so the
final family is the intersection of all pair constraints with the box
bounds, i.e. exactly the laminar sandwiched completions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .core import ElementSet, Instance, Phylogeny, bit_indices
from .zdd import ZddRef, ZddStore

_GC_FLOOR = 1 << 16


@dataclass(frozen=True)
class VarMap:
    """Partition of the (character, species) grid into variable classes.

    level_pairs maps diagram level -> (character, species); forced pairs get
    no level at all and are reinstated by solution_of.
    """

    level_pairs: tuple[tuple[int, int], ...]
    forced_one: frozenset[tuple[int, int]]
    forced_zero: frozenset[tuple[int, int]]

    @property
    def num_levels(self) -> int:
        return len(self.level_pairs)

    def level_index(self) -> dict[tuple[int, int], int]:
        return {pair: lvl for lvl, pair in enumerate(self.level_pairs)}


@dataclass(frozen=True)
class BuildStats:
    final_nodes: int
    peak_nodes: int
    pair_steps: int
    wall_time: float


class BuildDeadlineExceeded(Exception):
    """Raised when the deadline expires mid-build; carries partial stats."""

    def __init__(self, stats: BuildStats):
        super().__init__(f"deadline exceeded after {stats.pair_steps} pair steps")
        self.stats = stats


def make_order(inst: Instance, policy: str = "character-major") -> VarMap:
    """Assign diagram levels to the undecided pairs.

    character-major keeps the pairs of one character adjacent (they carry
    the heaviest mutual dependency); element-major groups by species.
    """
    free = []
    forced_one = []
    forced_zero = []
    for i in range(inst.m):
        lo = inst.lower[i].bits
        up = inst.upper[i].bits
        for e in range(inst.n):
            bit = 1 << e
            if lo & bit:
                forced_one.append((i, e))
            elif up & bit:
                free.append((i, e))
            else:
                forced_zero.append((i, e))
    if policy == "character-major":
        free.sort()
    elif policy == "element-major":
        free.sort(key=lambda p: (p[1], p[0]))
    else:
        raise ValueError(f"unknown order policy {policy!r}")
    return VarMap(tuple(free), frozenset(forced_one), frozenset(forced_zero))


def _pair_schedule(inst: Instance, schedule: str) -> list[tuple[int, int]]:
    pairs = [(i, j) for i in range(inst.m) for j in range(i + 1, inst.m)]
    if schedule == "lexicographic":
        return pairs
    if schedule != "deferred":
        raise ValueError(f"unknown pair schedule {schedule!r}")
    # pairs whose relation is not forced by the bounds go last
    single, multi = [], []
    for i, j in pairs:
        li, ui = inst.lower[i].bits, inst.upper[i].bits
        lj, uj = inst.lower[j].bits, inst.upper[j].bits
        possible = (li & ~uj == 0) + (lj & ~ui == 0) + (li & lj == 0)
        (single if possible <= 1 else multi).append((i, j))
    return single + multi


def build(inst: Instance, vm: VarMap,
          pair_schedule: str = "lexicographic",
          deadline: float | None = None,
          backend: str | None = None) -> tuple[ZddRef, BuildStats]:
    """Run the pipeline; returns the root ref and instrumentation.

    deadline is seconds of wall time; expiry raises BuildDeadlineExceeded
    (checked between filter operations). An empty result is a normal
    outcome: the 0-terminal with count 0.
    """
    t0 = time.monotonic()
    deadline_at = None if deadline is None else t0 + deadline
    store = ZddStore(vm.num_levels, backend)
    level_of = vm.level_index()

    def check_deadline(steps: int, peak: int) -> None:
        if deadline_at is not None and time.monotonic() > deadline_at:
            raise BuildDeadlineExceeded(
                BuildStats(-1, peak, steps, time.monotonic() - t0))

    live: dict[str, ZddRef] = {"g": store.all_subsets(range(vm.num_levels))}
    peak = store.node_count(live["g"])
    steps = 0
    watermark = [_GC_FLOOR]

    def maybe_collect() -> None:
        # in-flight filter chains produce garbage proportional to the
        # working family per operation; collect against all named roots so
        # one pair step cannot exhaust memory on its own
        if store.nodes_allocated <= watermark[0]:
            return
        keys = list(live)
        remapped = store.collect([live[k] for k in keys])
        live.update(zip(keys, remapped))
        watermark[0] = max(_GC_FLOOR, 3 * store.nodes_allocated)

    full = (1 << inst.n) - 1
    lo = [s.bits for s in inst.lower]
    up = [s.bits for s in inst.upper]
    free = [up[i] & ~lo[i] for i in range(inst.m)]

    def run_case(out: str, kind: str, i: int, j: int) -> None:
        # filters live["g"] down to one laminarity case, into live[out];
        # all single-variable consequences of forced pairs go in one fused
        # pass, then the genuinely two-variable constraints one by one
        if kind == "nested":
            if lo[i] & ~up[j]:
                live[out] = store.bot
                return
            unit_one = lo[i] & free[j]
            unit_zero = free[i] & (full & ~up[j])
        else:
            if lo[i] & lo[j]:
                live[out] = store.bot
                return
            unit_one = 0
            unit_zero = (lo[i] & free[j]) | (free[i] & lo[j])
        linked = free[i] & free[j]
        live[out] = live["g"]
        if unit_one | unit_zero:
            need = [level_of[(j, e)] for e in bit_indices(unit_one)]
            avoid = [level_of[(i if (1 << e) & free[i] else j, e)]
                     for e in bit_indices(unit_zero)]
            live[out] = store.filter_units(live[out], need, avoid)
            maybe_collect()
            check_deadline(steps, peak)
        for e in bit_indices(linked):
            if int(live[out]) == 0:
                break
            if kind == "nested":
                live[out] = store.filter_implication(
                    live[out], level_of[(i, e)], level_of[(j, e)])
            else:
                live[out] = store.filter_exclusion(
                    live[out], level_of[(i, e)], level_of[(j, e)])
            maybe_collect()
            check_deadline(steps, peak)

    for i, j in _pair_schedule(inst, pair_schedule):
        run_case("ga", "nested", i, j)
        run_case("gb", "nested", j, i)
        run_case("gc", "disjoint", i, j)
        ga = live.pop("ga")
        gb = live.pop("gb")
        gc = live.pop("gc")
        live["u"] = store.union(ga, gb)
        del ga, gb
        live["g"] = store.union(live.pop("u"), gc)
        del gc
        steps += 1
        size = store.node_count(live["g"])
        peak = max(peak, size)
        maybe_collect()
        check_deadline(steps, peak)

    g = live["g"]
    final = store.node_count(g)
    stats = BuildStats(final, max(peak, final), steps, time.monotonic() - t0)
    return g, stats


def solution_of(member: tuple[int, ...], vm: VarMap, inst: Instance) -> Phylogeny:
    """Map a ZDD member (set of levels) back to a phylogeny."""
    bits = [s.bits for s in inst.lower]
    for lvl in member:
        if not 0 <= lvl < vm.num_levels:
            raise ValueError(f"level {lvl} not in the variable map")
        i, e = vm.level_pairs[lvl]
        bits[i] |= 1 << e
    return Phylogeny(tuple(ElementSet(inst.n, b) for b in bits))


def iter_solutions(root: ZddRef, vm: VarMap, inst: Instance):
    """Yield every encoded phylogeny in the diagram's canonical order."""
    store: ZddStore = root.store
    for member in store.iter_sets(root):
        yield solution_of(member, vm, inst)
