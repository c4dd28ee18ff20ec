"""Hash-consed zero-suppressed binary decision diagram store.

A ZddRef denotes a family of sets of variable levels: the sets given by
root-to-1-terminal paths, where a variable skipped along a path is absent
from the set. Structural equality of refs within one store is semantic
equality of families (canonicity), maintained by the two reduction rules:
a node whose 1-edge reaches the 0-terminal is never created, and the unique
table stores at most one node per (var, lo, hi).

A store is single-owner: operations mutate its arenas and caches, so share
refs across threads only by moving the whole store. node_count counts
reachable vertices including reachable terminals (a bare terminal counts 1);
reported sizes may differ by O(1) from conventions that exclude terminals.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Iterator

import numpy as np

from . import _kernels
from .backend import get_kernels

LEVEL_INF = _kernels.LEVEL_INF

_MIN_ARENA = 1 << 12
_MIN_TABLE = 1 << 13
_MIN_CACHE = 1 << 14
# ~24 bytes per node in the arena plus table and scratch; the cap keeps one
# store within a few GB so an exploding build dies with MemoryError instead
# of taking the process down
_MAX_ARENA = 1 << 25
# the op cache is lossy, so capping it trades recomputation for memory
_MAX_CACHE = 1 << 22


class ZddRef(int):
    """Opaque handle to a node (or terminal) of one ZddStore."""

    def __new__(cls, value: int, store: "ZddStore") -> "ZddRef":
        self = super().__new__(cls, value)
        self.store = store
        return self

    def __repr__(self) -> str:
        return f"ZddRef({int(self)})"


class ZddStore:
    """Node arena + unique table + lossy operation cache for one solve."""

    def __init__(self, num_vars: int, backend: str | None = None):
        if num_vars < 0 or num_vars >= 1 << 20:
            raise ValueError("variable count must be in [0, 2^20)")
        self.num_vars = num_vars
        self._k = get_kernels(backend)
        self.backend = self._k.name
        cap = _MIN_ARENA
        self._var = np.empty(cap, np.int64)
        self._lo = np.empty(cap, np.int64)
        self._hi = np.empty(cap, np.int64)
        self._var[0] = self._var[1] = LEVEL_INF
        self._lo[0] = self._lo[1] = -1
        self._hi[0] = self._hi[1] = -1
        self._n_box = np.array([2], np.int64)
        tcap = _MIN_TABLE
        self._tv = np.full(tcap, -1, np.int64)
        self._tl = np.full(tcap, -1, np.int64)
        self._th = np.full(tcap, -1, np.int64)
        self._tr = np.full(tcap, -1, np.int64)
        self._used_box = np.zeros(1, np.int64)
        ccap = _MIN_CACHE
        self._ck1 = np.full(ccap, -1, np.int64)
        self._ck2 = np.zeros(ccap, np.int64)
        self._ck3 = np.zeros(ccap, np.int64)
        self._cval = np.zeros(ccap, np.int64)
        depth = 6 * (num_vars + 4) + 16
        self._fstack = np.empty(3 * depth, np.int64)
        self._vstack = np.empty(2 * depth, np.int64)
        self._visited = np.zeros(cap, np.int64)
        self._nstack = np.empty(cap, np.int64)
        self._umemo = np.zeros(cap, np.int64)
        self._uepoch = np.zeros(cap, np.int64)
        self._epoch = 0

    # terminals are built on access: caching a ZddRef on the store would
    # create a store <-> ref cycle and keep dead multi-GB stores alive
    # until a full garbage collection
    @property
    def bot(self) -> "ZddRef":
        """The empty family."""
        return ZddRef(0, self)

    @property
    def top(self) -> "ZddRef":
        """The family containing only the empty set."""
        return ZddRef(1, self)

    # -- plumbing ---------------------------------------------------------

    @property
    def nodes_allocated(self) -> int:
        """Arena occupancy including terminals and dead nodes."""
        return int(self._n_box[0])

    def _ref(self, x: ZddRef) -> int:
        if not isinstance(x, ZddRef):
            raise TypeError(f"expected a ZddRef, got {type(x).__name__}")
        if x.store is not self:
            raise ValueError("ref belongs to a different store")
        return int(x)

    def _level(self, ref: int) -> int:
        return int(self._var[ref]) if ref >= 2 else LEVEL_INF

    def _check_var(self, v: int) -> int:
        if not 0 <= v < self.num_vars:
            raise ValueError(f"variable level {v} outside [0, {self.num_vars})")
        return int(v)

    def _grow_arena(self) -> None:
        old = self._var.shape[0]
        cap = old * 2
        if cap > _MAX_ARENA:
            raise MemoryError("ZDD arena limit exceeded")
        n = int(self._n_box[0])
        for name in ("_var", "_lo", "_hi"):
            arr = np.empty(cap, np.int64)
            arr[:n] = getattr(self, name)[:n]
            setattr(self, name, arr)
        visited = np.zeros(cap, np.int64)
        visited[:old] = self._visited
        self._visited = visited
        self._nstack = np.empty(cap, np.int64)
        umemo = np.zeros(cap, np.int64)
        umemo[:old] = self._umemo
        self._umemo = umemo
        uepoch = np.zeros(cap, np.int64)
        uepoch[:old] = self._uepoch
        self._uepoch = uepoch

    def _grow_table(self) -> None:
        tcap = self._tv.shape[0] * 2
        self._tv = np.full(tcap, -1, np.int64)
        self._tl = np.full(tcap, -1, np.int64)
        self._th = np.full(tcap, -1, np.int64)
        self._tr = np.full(tcap, -1, np.int64)
        self._used_box[0] = 0
        self._k.k_rehash(self._var, self._lo, self._hi, int(self._n_box[0]),
                         self._tv, self._tl, self._th, self._tr, self._used_box)
        ccap = min(tcap, _MAX_CACHE)
        if ccap > self._ck1.shape[0]:
            self._ck1 = np.full(ccap, -1, np.int64)
            self._ck2 = np.zeros(ccap, np.int64)
            self._ck3 = np.zeros(ccap, np.int64)
            self._cval = np.zeros(ccap, np.int64)

    def _node_args(self) -> tuple:
        return (self._var, self._lo, self._hi, self._n_box,
                self._tv, self._tl, self._th, self._tr, self._used_box)

    def _cache_args(self) -> tuple:
        return (self._ck1, self._ck2, self._ck3, self._cval)

    def _run(self, fn: Callable, *args) -> ZddRef:
        while True:
            r = int(fn(*self._node_args(), *args))
            if r >= 0:
                return ZddRef(r, self)
            if r == -1:
                self._grow_arena()
            elif r == -2:
                self._grow_table()
            else:
                raise RuntimeError("kernel scratch stack overflow (store bug)")

    # -- construction and family algebra ----------------------------------

    def make_node(self, v: int, lo: ZddRef, hi: ZddRef) -> ZddRef:
        """Reduced node for (v, lo, hi): returns lo when hi is the empty family."""
        v = self._check_var(v)
        l = self._ref(lo)
        h = self._ref(hi)
        if v >= self._level(l) or v >= self._level(h):
            raise ValueError("variable ordering violated: children must have larger levels")
        return self._run(self._k.k_make_node, v, l, h)

    def union(self, f: ZddRef, g: ZddRef) -> ZddRef:
        """Set union of two families."""
        a = self._ref(f)
        b = self._ref(g)
        return self._run(self._k.k_union, *self._cache_args(), a, b,
                         self._fstack, self._vstack)

    def cofactor(self, f: ZddRef, v: int, bit: int) -> ZddRef:
        """Restriction by x_v = bit, in family terms.

        bit 0: the members not containing v. bit 1: {X \\ {v} : v in X}.
        If v is outside f's support, bit 0 returns f and bit 1 the empty
        family (a skipped variable is 0 on every accepting path).
        """
        a = self._ref(f)
        v = self._check_var(v)
        if bit not in (0, 1):
            raise ValueError("bit must be 0 or 1")
        mode = _kernels.MODE_COF1 if bit else _kernels.MODE_COF0
        return self._run(self._k.k_unary, *self._cache_args(), mode, a, v,
                         self._fstack, self._vstack)

    def filter_contains(self, f: ZddRef, v: int) -> ZddRef:
        """Members of f that contain v (v kept in the members)."""
        a = self._ref(f)
        v = self._check_var(v)
        return self._run(self._k.k_unary, *self._cache_args(),
                         _kernels.MODE_CONTAINS, a, v, self._fstack, self._vstack)

    def attach(self, f: ZddRef, v: int) -> ZddRef:
        """{X + {v} : X in f}; v must sit above f's entire support."""
        a = self._ref(f)
        v = self._check_var(v)
        if v >= self._level(a):
            raise ValueError("attach variable must lie above the family's support")
        return self._run(self._k.k_make_node, v, 0, a)

    def filter_implication(self, f: ZddRef, u: int, v: int) -> ZddRef:
        """Members X with u in X implies v in X."""
        a = self._ref(f)
        u = self._check_var(u)
        v = self._check_var(v)
        if u == v:
            raise ValueError("filter variables must differ")
        return self._run(self._k.k_impl, *self._cache_args(), a, u, v,
                         self._fstack, self._vstack)

    def filter_exclusion(self, f: ZddRef, u: int, v: int) -> ZddRef:
        """Members X without both u and v (symmetric in u, v)."""
        a = self._ref(f)
        u = self._check_var(u)
        v = self._check_var(v)
        if u == v:
            raise ValueError("filter variables must differ")
        if u > v:
            u, v = v, u
        return self._run(self._k.k_excl, *self._cache_args(), a, u, v,
                         self._fstack, self._vstack)

    def filter_units(self, f: ZddRef, need: "Iterable[int]" = (),
                     avoid: "Iterable[int]" = ()) -> ZddRef:
        """Members containing every `need` variable and no `avoid` variable.

        One traversal regardless of how many variables are constrained;
        equivalent to chaining filter_contains and cofactor(.., 0).
        """
        a = self._ref(f)
        pairs = sorted([(self._check_var(v), 1) for v in need] +
                       [(self._check_var(v), 0) for v in avoid])
        for (v1, _), (v2, _) in zip(pairs, pairs[1:]):
            if v1 == v2:
                raise ValueError(f"variable {v1} both required and forbidden")
        if not pairs:
            return ZddRef(a, self)
        levels = np.array([p[0] for p in pairs], np.int64)
        kinds = np.array([p[1] for p in pairs], np.int64)
        while True:
            self._epoch += 1
            r = int(self._k.k_unit(*self._node_args(), levels, kinds, a,
                                   self._umemo, self._uepoch, self._epoch,
                                   self._fstack, self._vstack))
            if r >= 0:
                return ZddRef(r, self)
            if r == -1:
                self._grow_arena()
            elif r == -2:
                self._grow_table()
            else:
                raise RuntimeError("kernel scratch stack overflow (store bug)")

    def all_subsets(self, levels: Iterable[int]) -> ZddRef:
        """Family of all subsets of the given variable levels."""
        g = self.top
        for v in sorted(set(levels), reverse=True):
            g = self.make_node(v, g, g)
        return g

    # -- queries -----------------------------------------------------------

    def count(self, f: ZddRef) -> int:
        """Number of member sets, exact at any magnitude."""
        root = self._ref(f)
        if root < 2:
            return root
        lo = self._lo
        hi = self._hi
        memo: dict[int, int] = {0: 0, 1: 1}
        stack = [root]
        while stack:
            x = stack[-1]
            if x in memo:
                stack.pop()
                continue
            l = int(lo[x])
            h = int(hi[x])
            cl = memo.get(l)
            ch = memo.get(h)
            if cl is not None and ch is not None:
                memo[x] = cl + ch
                stack.pop()
            else:
                if cl is None:
                    stack.append(l)
                if ch is None:
                    stack.append(h)
        return memo[root]

    def node_count(self, f: ZddRef) -> int:
        """Vertices reachable from f, counting reachable terminals."""
        root = self._ref(f)
        self._epoch += 1
        return int(self._k.k_node_count(self._lo, self._hi, root,
                                        self._visited, self._epoch, self._nstack))

    def iter_sets(self, f: ZddRef) -> Iterator[tuple[int, ...]]:
        """Yield members as ascending level tuples, depth first, 0-edge first."""
        root = self._ref(f)
        var = self._var
        lo = self._lo
        hi = self._hi
        path: list[int] = []
        stack: list[tuple[int, int]] = [(0, root)]
        while stack:
            tag, x = stack.pop()
            if tag == 1:
                path.append(x)
                continue
            if tag == 2:
                path.pop()
                continue
            if x == 0:
                continue
            if x == 1:
                yield tuple(path)
                continue
            v = int(var[x])
            stack.append((2, 0))
            stack.append((0, int(hi[x])))
            stack.append((1, v))
            stack.append((0, int(lo[x])))

    def enumerate(self, f: ZddRef, visitor: Callable[[tuple[int, ...]], object]) -> int:
        """Visit every member once in canonical order; visitor returning False stops."""
        visited = 0
        for member in self.iter_sets(f):
            visited += 1
            if visitor(member) is False:
                break
        return visited

    # -- maintenance -------------------------------------------------------

    def collect(self, roots: list[ZddRef]) -> list[ZddRef]:
        """Drop nodes unreachable from roots; returns the remapped roots.

        All other outstanding refs are invalidated. Canonicity is preserved.
        """
        ints = [self._ref(r) for r in roots]
        n = int(self._n_box[0])
        marked = np.zeros(n, np.uint8)
        for r in ints:
            if r >= 2:
                marked[r] = 1
        self._k.k_gc_mark(self._lo, self._hi, marked, n)
        live = int(marked.sum())
        cap = _MIN_ARENA
        while cap < (live + 2) * 2:
            cap *= 2
        nvar = np.empty(cap, np.int64)
        nlo = np.empty(cap, np.int64)
        nhi = np.empty(cap, np.int64)
        nvar[0] = nvar[1] = LEVEL_INF
        nlo[0] = nlo[1] = -1
        nhi[0] = nhi[1] = -1
        nbox = np.array([2], np.int64)
        tcap = _MIN_TABLE
        while tcap < (live + 2) * 4:
            tcap *= 2
        tv = np.full(tcap, -1, np.int64)
        tl = np.full(tcap, -1, np.int64)
        th = np.full(tcap, -1, np.int64)
        tr = np.full(tcap, -1, np.int64)
        used = np.zeros(1, np.int64)
        remap = np.zeros(n, np.int64)
        rc = int(self._k.k_gc_compact(self._var, self._lo, self._hi, n, marked,
                                      nvar, nlo, nhi, nbox, tv, tl, th, tr, used, remap))
        if rc != 0:
            raise RuntimeError("garbage collection sizing failed (store bug)")
        self._var, self._lo, self._hi = nvar, nlo, nhi
        self._n_box = nbox
        self._tv, self._tl, self._th, self._tr = tv, tl, th, tr
        self._used_box = used
        ccap = min(max(_MIN_CACHE, tcap), _MAX_CACHE)
        self._ck1 = np.full(ccap, -1, np.int64)
        self._ck2 = np.zeros(ccap, np.int64)
        self._ck3 = np.zeros(ccap, np.int64)
        self._cval = np.zeros(ccap, np.int64)
        self._visited = np.zeros(cap, np.int64)
        self._nstack = np.empty(cap, np.int64)
        self._umemo = np.zeros(cap, np.int64)
        self._uepoch = np.zeros(cap, np.int64)
        self._epoch = 0
        return [ZddRef(int(remap[r]) if r >= 2 else r, self) for r in ints]

    def check_reduced(self, f: ZddRef) -> None:
        """Assert zero-suppression and uniqueness over f's reachable nodes."""
        root = self._ref(f)
        seen: set[int] = set()
        stack = [root]
        triples: set[tuple[int, int, int]] = set()
        while stack:
            x = stack.pop()
            if x < 2 or x in seen:
                continue
            seen.add(x)
            v, l, h = int(self._var[x]), int(self._lo[x]), int(self._hi[x])
            if h == 0:
                raise AssertionError(f"node {x} has a 0-terminal 1-edge")
            if (v, l, h) in triples:
                raise AssertionError(f"duplicate node for {(v, l, h)}")
            if l >= 2 and int(self._var[l]) <= v:
                raise AssertionError(f"ordering violated at node {x} (lo)")
            if h >= 2 and int(self._var[h]) <= v:
                raise AssertionError(f"ordering violated at node {x} (hi)")
            triples.add((v, l, h))
            stack.append(l)
            stack.append(h)

    def dump(self, f: ZddRef) -> str:
        """Canonical text dump: one `id\\tlevel\\tlo\\thi` line per node.

        Terminals are written T0/T1; ids are structure-canonical (identical
        families dump identically regardless of construction history), lines
        sorted topologically by level.
        """
        root = self._ref(f)
        if root < 2:
            return f"T{root}\n"
        by_level: dict[int, list[int]] = {}
        seen: set[int] = set()
        stack = [root]
        while stack:
            x = stack.pop()
            if x < 2 or x in seen:
                continue
            seen.add(x)
            by_level.setdefault(int(self._var[x]), []).append(x)
            stack.append(int(self._lo[x]))
            stack.append(int(self._hi[x]))
        order: dict[int, tuple] = {0: (LEVEL_INF, 0), 1: (LEVEL_INF, 1)}
        for level in sorted(by_level, reverse=True):
            nodes = sorted(by_level[level],
                           key=lambda x: (order[int(self._lo[x])], order[int(self._hi[x])]))
            by_level[level] = nodes
            for idx, x in enumerate(nodes):
                order[x] = (level, idx)
        ids: dict[int, int] = {}
        counter = itertools.count(1)
        for level in sorted(by_level):
            for x in by_level[level]:
                ids[x] = next(counter)

        def fmt(r: int) -> str:
            return f"T{r}" if r < 2 else str(ids[r])

        lines = []
        for level in sorted(by_level):
            for x in by_level[level]:
                lines.append(f"{ids[x]}\t{level}\t{fmt(int(self._lo[x]))}\t{fmt(int(self._hi[x]))}")
        return "\n".join(lines) + "\n"
