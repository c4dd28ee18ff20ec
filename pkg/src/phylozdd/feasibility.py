"""Existence check for sandwiched laminar sequences, with witness.

The decision procedure recursively splits the species set: characters whose
upper bound covers the whole current block are assigned the block itself,
then the block is partitioned into components of the "shares a lower-bound
species" relation. A single component covering the whole block while
characters remain is a dead end: any solution's inclusion-maximal set would
have to be the whole block, so its character would already have been
assigned. Correctness is cross-checked against brute-force completion
enumeration in the test suite rather than argued here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ElementSet, Instance, Phylogeny, bit_indices, canonical_key

BRUTE_FORCE_PAIR_LIMIT = 24


@dataclass(frozen=True, slots=True)
class FeasibilityResult:
    feasible: bool
    witness: Phylogeny | None


def feasible_bits(n: int, lower: list[int], upper: list[int]) -> tuple[bool, list[int] | None]:
    """Bit-vector core of the decision procedure.

    lower/upper are per-character int bitsets; returns (flag, witness bits).
    """
    m = len(lower)
    witness = [0] * m
    chars = [c for c in range(m) if lower[c]]
    full = (1 << n) - 1

    def solve(k_bits: int, cs: list[int]) -> bool:
        rest = []
        for c in cs:
            if k_bits & ~upper[c] == 0:
                witness[c] = k_bits
            else:
                rest.append(c)
        if not rest:
            return True
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for c in rest:
            first = -1
            for e in bit_indices(lower[c]):
                if first < 0:
                    first = e
                else:
                    ra, rb = find(first), find(e)
                    if ra != rb:
                        parent[rb] = ra
        comp_bits: dict[int, int] = {}
        for e in bit_indices(k_bits):
            root = find(e)
            comp_bits[root] = comp_bits.get(root, 0) | (1 << e)
        if len(comp_bits) == 1:
            return False
        by_root: dict[int, list[int]] = {}
        for c in rest:
            root = find(next(bit_indices(lower[c])))
            by_root.setdefault(root, []).append(c)
        for root, group in by_root.items():
            if not solve(comp_bits[root], group):
                return False
        return True

    if solve(full, chars):
        return True, witness
    return False, None


def feasible(inst: Instance) -> FeasibilityResult:
    """Decide whether inst admits a solution; returns one as witness if so."""
    ok, bits = feasible_bits(inst.n, [s.bits for s in inst.lower], [s.bits for s in inst.upper])
    if not ok:
        return FeasibilityResult(False, None)
    return FeasibilityResult(True, Phylogeny(tuple(ElementSet(inst.n, b) for b in bits)))


def brute_force_solutions(inst: Instance, cap: int = 1_000_000) -> list[Phylogeny]:
    """All solutions by exhaustive completion, sorted by canonical key.

    Enumerates every assignment of the undecided pairs and keeps the laminar
    ones. Refuses when more than BRUTE_FORCE_PAIR_LIMIT pairs are undecided
    or more than cap solutions accumulate.
    """
    free_pairs = [(i, e)
                  for i in range(inst.m)
                  for e in bit_indices(inst.upper[i].bits & ~inst.lower[i].bits)]
    k = len(free_pairs)
    if k > BRUTE_FORCE_PAIR_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_PAIR_LIMIT} undecided pairs, got {k}")
    base = [s.bits for s in inst.lower]
    out: list[Phylogeny] = []
    for mask in range(1 << k):
        bits = base[:]
        rem = mask
        while rem:
            low = rem & -rem
            i, e = free_pairs[low.bit_length() - 1]
            bits[i] |= 1 << e
            rem ^= low
        if _laminar_bits(bits):
            if len(out) >= cap:
                raise ValueError(f"more than {cap} solutions; raise the cap to enumerate them")
            out.append(Phylogeny(tuple(ElementSet(inst.n, b) for b in bits)))
    out.sort(key=canonical_key)
    return out


def _laminar_bits(bits: list[int]) -> bool:
    for i in range(len(bits)):
        a = bits[i]
        for j in range(i + 1, len(bits)):
            inter = a & bits[j]
            if inter and inter != a and inter != bits[j]:
                return False
    return True
