"""Seeded instance generators.

All randomness comes from SplitMix64, a fixed 64-bit-state generator, so a
(config, seed) pair produces bit-identical instances on every platform and
Python version. Draw order is pinned: characters ascending, and within a
character species ascending (removal draws before addition draws).
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ElementSet, Instance, Phylogeny

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 PRNG: state += golden gamma, output mixed by xor-shifts."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), rejection-sampled to avoid modulo bias."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def derive_seed(seed: int, stream: int) -> int:
    """Decorrelated child seed for a named stream."""
    rng = SplitMix64((seed ^ (stream * 0x9E3779B97F4A7C15)) & _MASK64)
    return rng.next_u64()


@dataclass(frozen=True, slots=True)
class GenConfig:
    """One cell of the random-instance grid."""

    m: int
    n: int
    p: float
    seed: int


def gen_ground_truth(m: int, n: int, seed: int) -> Phylogeny:
    """Random laminar sequence of m nonempty species sets.

    Builds a random partition tree over the species (each block split into
    2..4 nonempty sub-blocks until singletons) and samples each set as the
    species of a uniformly chosen tree node, root and leaves included.
    """
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 and n >= 1")
    rng = SplitMix64(seed)
    blocks: list[list[int]] = [list(range(n))]
    nodes: list[int] = []
    while blocks:
        block = blocks.pop()
        bits = 0
        for e in block:
            bits |= 1 << e
        nodes.append(bits)
        if len(block) == 1:
            continue
        arity = 2 + rng.below(min(4, len(block)) - 1)
        items = block[:]
        rng.shuffle(items)
        parts: list[list[int]] = [[] for _ in range(arity)]
        for idx, e in enumerate(items):
            if idx < arity:
                parts[idx].append(e)
            else:
                parts[rng.below(arity)].append(e)
        parts.sort(key=min)
        blocks.extend(reversed(parts))
    sets = tuple(ElementSet(n, nodes[rng.below(len(nodes))]) for _ in range(m))
    return Phylogeny(sets)


def perturb(truth: Phylogeny, p: float, seed: int) -> Instance:
    """Blur a solution into an instance that still admits it.

    L_i drops each member of S_i independently with probability p; U_i adds
    each non-member independently with probability p. The original sequence
    is sandwiched by construction, so the instance is always feasible.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be a probability")
    rng = SplitMix64(seed)
    n = truth.sets[0].universe_size if truth.sets else 0
    lower = []
    upper = []
    for s in truth.sets:
        lo = s.bits
        for e in s:
            if rng.uniform() < p:
                lo &= ~(1 << e)
        up = s.bits
        for e in s.complement():
            if rng.uniform() < p:
                up |= 1 << e
        lower.append(ElementSet(n, lo))
        upper.append(ElementSet(n, up))
    return Instance(n, truth.m, tuple(lower), tuple(upper))


def instance_from_config(cfg: GenConfig) -> Instance:
    """Ground truth from the seed, then perturbation from a derived stream."""
    truth = gen_ground_truth(cfg.m, cfg.n, cfg.seed)
    return perturb(truth, cfg.p, derive_seed(cfg.seed, 1))


def compression_family(c: int, k: int) -> Instance:
    """Adversarial family: c characters with k undecided private species each.

    Character i owns the species block i*(k+1)..i*(k+1)+k; its lower bound
    is the block head, its upper bound the whole block. Blocks are pairwise
    disjoint, so every completion is laminar: there are exactly 2^(k*c)
    solutions, while the diagram stays linear in k*c.
    """
    if c < 1 or k < 1:
        raise ValueError("need c >= 1 and k >= 1")
    n = (k + 1) * c
    lower = []
    upper = []
    for i in range(c):
        head = i * (k + 1)
        lo = 1 << head
        up = ((1 << (k + 1)) - 1) << head
        lower.append(ElementSet(n, lo))
        upper.append(ElementSet(n, up))
    return Instance(n, c, tuple(lower), tuple(upper))
