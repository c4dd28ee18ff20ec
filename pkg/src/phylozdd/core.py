"""Domain types for species sets, sandwich instances and laminar sequences.

Species are integers 0..n-1. A character i is described by a lower bound set
L_i (species known to carry it) and an upper bound set U_i (species that may
carry it); a solution assigns each character a set S_i with L_i <= S_i <= U_i
such that the sequence (S_1, ..., S_m) is laminar: every pairwise
intersection is one of the two sets or empty.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Iterable, Iterator


def _mask(universe_size: int) -> int:
    return (1 << universe_size) - 1


def bit_indices(bits: int) -> Iterator[int]:
    """Yield the set bit positions of an int, ascending."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


@dataclass(frozen=True, slots=True)
class ElementSet:
    """Immutable subset of a fixed universe {0, ..., universe_size-1}.

    Backed by an int used as a bit vector (bit e set <=> element e present),
    so all set operations are single big-int operations.
    """

    universe_size: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.universe_size < 0:
            raise ValueError("universe_size must be nonnegative")
        if self.bits < 0 or self.bits & ~_mask(self.universe_size):
            raise ValueError("set bits outside [0, universe_size)")

    @classmethod
    def from_iterable(cls, universe_size: int, items: Iterable[int]) -> "ElementSet":
        bits = 0
        for e in items:
            if not 0 <= e < universe_size:
                raise ValueError(f"element {e} outside universe of size {universe_size}")
            bits |= 1 << e
        return cls(universe_size, bits)

    @classmethod
    def full(cls, universe_size: int) -> "ElementSet":
        return cls(universe_size, _mask(universe_size))

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return bit_indices(self.bits)

    def __contains__(self, e: int) -> bool:
        return 0 <= e < self.universe_size and (self.bits >> e) & 1 == 1

    def _check(self, other: "ElementSet") -> None:
        if self.universe_size != other.universe_size:
            raise ValueError("mismatched universe sizes")

    def __and__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.universe_size, self.bits & other.bits)

    def __or__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.universe_size, self.bits | other.bits)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.universe_size, self.bits & ~other.bits)

    def issubset(self, other: "ElementSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def with_element(self, e: int) -> "ElementSet":
        if not 0 <= e < self.universe_size:
            raise ValueError(f"element {e} outside universe of size {self.universe_size}")
        return ElementSet(self.universe_size, self.bits | (1 << e))

    def complement(self) -> "ElementSet":
        return ElementSet(self.universe_size, ~self.bits & _mask(self.universe_size))

    def __repr__(self) -> str:
        return f"ElementSet({self.universe_size}, {{{', '.join(map(str, self))}}})"


@dataclass(frozen=True, slots=True)
class Instance:
    """A sandwich instance: n species, m characters with bounds L_i <= U_i.

    Construction only checks shapes; use validate_instance for the semantic
    invariants so that malformed instances can be diagnosed rather than
    rejected blindly.
    """

    n: int
    m: int
    lower: tuple[ElementSet, ...]
    upper: tuple[ElementSet, ...]

    def __post_init__(self) -> None:
        if len(self.lower) != self.m or len(self.upper) != self.m:
            raise ValueError("lower/upper must each have m entries")

    @classmethod
    def from_bounds(cls, n: int, bounds: Iterable[tuple[Iterable[int], Iterable[int]]]) -> "Instance":
        lower = []
        upper = []
        for lo, up in bounds:
            lower.append(ElementSet.from_iterable(n, lo))
            upper.append(ElementSet.from_iterable(n, up))
        return cls(n, len(lower), tuple(lower), tuple(upper))

    @property
    def k(self) -> int:
        """Total number of undecided (character, species) pairs."""
        return sum((u.bits & ~l.bits).bit_count() for l, u in zip(self.lower, self.upper))


@dataclass(frozen=True, slots=True)
class Phylogeny:
    """A candidate solution: one species set per character."""

    sets: tuple[ElementSet, ...]

    @property
    def m(self) -> int:
        return len(self.sets)


@dataclass(frozen=True, slots=True)
class Violation:
    index: int
    message: str

    def __str__(self) -> str:
        return f"character {self.index + 1}: {self.message}"


def is_laminar(sets: "tuple[ElementSet, ...] | list[ElementSet]") -> bool:
    """True iff every pairwise intersection is one of the operands or empty.

    Duplicates and empty sets are compatible with everything.
    """
    n_sets = len(sets)
    if n_sets == 0:
        return True
    universe = sets[0].universe_size
    bits = []
    for s in sets:
        if s.universe_size != universe:
            raise ValueError("mismatched universe sizes")
        bits.append(s.bits)
    for i in range(n_sets):
        a = bits[i]
        for j in range(i + 1, n_sets):
            b = bits[j]
            inter = a & b
            if inter and inter != a and inter != b:
                return False
    return True


def is_sandwiched(phylo: Phylogeny, inst: Instance) -> bool:
    """True iff L_i <= S_i <= U_i for every character (laminarity not checked)."""
    if phylo.m != inst.m:
        raise ValueError(f"phylogeny has {phylo.m} sets, instance has {inst.m} characters")
    for s, lo, up in zip(phylo.sets, inst.lower, inst.upper):
        if lo.bits & ~s.bits or s.bits & ~up.bits:
            return False
    return True


def validate_instance(inst: Instance) -> list[Violation]:
    """Collect invariant violations (empty list means the instance is well formed)."""
    out: list[Violation] = []
    universe_mask = _mask(inst.n)
    for i, (lo, up) in enumerate(zip(inst.lower, inst.upper)):
        if lo.universe_size != inst.n or up.universe_size != inst.n:
            out.append(Violation(i, "universe size differs from instance n"))
        if lo.bits & ~universe_mask or up.bits & ~universe_mask:
            out.append(Violation(i, "element out of universe"))
        if lo.bits & ~up.bits:
            out.append(Violation(i, "lower not subset of upper"))
    return out


def canonical_key(phylo: Phylogeny) -> bytes:
    """Injective byte encoding of a phylogeny with fixed (m, n).

    Each set is emitted as its universe size (u32 LE) followed by the bit
    vector packed little-endian (element e is bit e%8 of byte e//8). Equal
    keys <=> equal phylogenies.
    """
    parts = []
    for s in phylo.sets:
        nbytes = (s.universe_size + 7) // 8
        parts.append(struct.pack("<I", s.universe_size))
        parts.append(s.bits.to_bytes(nbytes, "little"))
    return b"".join(parts)
