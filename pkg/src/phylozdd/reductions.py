"""Counting reduction: matchings of a simple bipartite graph <-> phylogenies.

Each edge e = (a, b) becomes a character with L_e = {s_a}, U_e = {s_a, s_b}.
A solution sets S_e to either bound, and the edges with S_e = U_e form a
matching; conversely every matching (including the empty one) yields exactly
one solution. Phylogeny count therefore equals matching count, which makes
the pair an independent end-to-end counting oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ElementSet, Instance

BRUTE_FORCE_EDGE_LIMIT = 24


@dataclass(frozen=True, slots=True)
class BipartiteGraph:
    """Simple bipartite graph; edges as (A-index, B-index) pairs."""

    a_size: int
    b_size: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.a_size and 0 <= v < self.b_size):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v}); graph must be simple")
            seen.add((u, v))


def matching_to_idbpp(g: BipartiteGraph) -> Instance:
    """Build the instance whose phylogeny count equals g's matching count.

    Element layout: A-vertex a -> a, B-vertex b -> a_size + b.
    """
    n = g.a_size + g.b_size
    lower = []
    upper = []
    for a, b in g.edges:
        sa = 1 << a
        sb = 1 << (g.a_size + b)
        lower.append(ElementSet(n, sa))
        upper.append(ElementSet(n, sa | sb))
    return Instance(n, len(g.edges), tuple(lower), tuple(upper))


def brute_force_matching_count(g: BipartiteGraph) -> int:
    """Number of edge subsets that are matchings, empty matching included.

    Inclusion-aware recursion over the edge list: each edge is either left
    out or taken (when both endpoints are free).
    """
    if len(g.edges) > BRUTE_FORCE_EDGE_LIMIT:
        raise ValueError(f"refusing graphs with more than {BRUTE_FORCE_EDGE_LIMIT} edges")
    edges = g.edges

    def rec(idx: int, used_a: int, used_b: int) -> int:
        if idx == len(edges):
            return 1
        a, b = edges[idx]
        total = rec(idx + 1, used_a, used_b)
        if not (used_a >> a) & 1 and not (used_b >> b) & 1:
            total += rec(idx + 1, used_a | (1 << a), used_b | (1 << b))
        return total

    return rec(0, 0, 0)
