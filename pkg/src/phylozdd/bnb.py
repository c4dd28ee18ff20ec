"""Branch-and-bound enumeration and counting.

At each node the search bounds with the feasibility oracle, then branches
the smallest undecided (character, species) pair: first force the species
into L_j, then remove it from U_j. The two children partition the solution
space, so enumeration is duplicate-free and exhaustive. The feasibility
witness is handed to whichever child it satisfies (exactly one), saving that
child's oracle call.

The search is anytime: on deadline expiry the phylogenies found so far have
already been reported, with completed=False.

bnb_enumerate always runs the Python recursion (it delivers Phylogeny values
to a visitor). bnb_count uses the compiled kernel when available, restarting
with a growing call budget to honor the deadline; the deterministic child
order makes each restart revisit a prefix of the same leaf sequence, so the
last attempt's tally is the anytime count.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .backend import backend_name, get_kernels
from .core import ElementSet, Instance, Phylogeny, bit_indices
from .feasibility import feasible_bits

_FIRST_BUDGET = 1 << 12


@dataclass(frozen=True)
class BnbStats:
    found: int
    calls: int
    completed: bool
    wall_time: float


def _free_pairs(inst: Instance) -> list[tuple[int, int]]:
    return [(j, e)
            for j in range(inst.m)
            for e in bit_indices(inst.upper[j].bits & ~inst.lower[j].bits)]


def bnb_enumerate(inst: Instance,
                  visitor: Callable[[Phylogeny], object],
                  deadline: float | None = None,
                  use_witness: bool = True) -> BnbStats:
    """Visit every solution exactly once; visitor returning False stops early."""
    t0 = time.monotonic()
    deadline_at = None if deadline is None else t0 + deadline
    pairs = _free_pairs(inst)
    lower = [s.bits for s in inst.lower]
    upper = [s.bits for s in inst.upper]
    n = inst.n
    state = {"calls": 0, "found": 0, "stopped": False}
    sys.setrecursionlimit(max(sys.getrecursionlimit(), len(pairs) + 1000))

    def rec(ptr: int, witness: list[int] | None) -> None:
        if state["stopped"]:
            return
        state["calls"] += 1
        if deadline_at is not None and time.monotonic() > deadline_at:
            state["stopped"] = True
            return
        if witness is None:
            ok, witness = feasible_bits(n, lower, upper)
            if not ok:
                return
        while ptr < len(pairs):
            j, e = pairs[ptr]
            bit = 1 << e
            if lower[j] & bit or not upper[j] & bit:
                ptr += 1
            else:
                break
        if ptr == len(pairs):
            state["found"] += 1
            if visitor(Phylogeny(tuple(ElementSet(n, b) for b in lower))) is False:
                state["stopped"] = True
            return
        j, e = pairs[ptr]
        bit = 1 << e
        in_wit = bool(witness[j] & bit)
        lower[j] |= bit
        rec(ptr + 1, witness if (use_witness and in_wit) else None)
        lower[j] &= ~bit
        if state["stopped"]:
            return
        upper[j] &= ~bit
        rec(ptr + 1, witness if (use_witness and not in_wit) else None)
        upper[j] |= bit

    rec(0, None)
    return BnbStats(state["found"], state["calls"], not state["stopped"],
                    time.monotonic() - t0)


def bnb_count(inst: Instance,
              deadline: float | None = None,
              use_witness: bool = True,
              backend: str | None = None) -> BnbStats:
    """Same search as bnb_enumerate with a counting visitor."""
    if backend_name(backend) == "python":
        return bnb_enumerate(inst, lambda _p: None, deadline, use_witness)
    return _bnb_count_kernel(inst, deadline, use_witness, backend)


def _bnb_count_kernel(inst: Instance, deadline: float | None,
                      use_witness: bool, backend: str | None) -> BnbStats:
    k = get_kernels(backend)
    t0 = time.monotonic()
    deadline_at = None if deadline is None else t0 + deadline
    m, n = inst.m, inst.n
    w = max(1, (n + 63) // 64)

    def to_words(bits: int) -> list[int]:
        return [(bits >> (64 * t)) & 0xFFFFFFFFFFFFFFFF for t in range(w)]

    lw0 = np.array([to_words(s.bits) for s in inst.lower], np.uint64).reshape(m, w)
    uw0 = np.array([to_words(s.bits) for s in inst.upper], np.uint64).reshape(m, w)
    kfull = np.array(to_words((1 << n) - 1), np.uint64)
    pairs = _free_pairs(inst)
    pairs_j = np.array([p[0] for p in pairs], np.int64)
    pairs_e = np.array([p[1] for p in pairs], np.int64)
    depth = len(pairs) + 2
    wit = np.zeros((depth, m, w), np.uint64)
    wslot = np.zeros(depth, np.int64)
    fptr = np.zeros(depth, np.int64)
    fstage = np.zeros(depth, np.int64)
    fj = np.zeros(depth, np.int64)
    fe = np.zeros(depth, np.int64)
    fwv = np.zeros(depth, np.int64)
    frames = 2 * n + 16
    fs_k = np.zeros((frames, w), np.uint64)
    fs_lo = np.zeros(frames, np.int64)
    fs_hi = np.zeros(frames, np.int64)
    fs_chars = np.zeros(max(m, 1), np.int64)
    fs_croot = np.zeros(max(m, 1), np.int64)
    fs_parent = np.zeros(max(n, 1), np.int64)
    kcur = np.zeros(w, np.uint64)
    ctz8 = _ctz8_table()
    out = np.zeros(4, np.int64)

    # The kernel cannot read the clock, so the deadline is honored by
    # restarts with a budget sized from the measured call rate; the
    # deterministic order makes each restart rerun a prefix of the last.
    budget = _FIRST_BUDGET if deadline_at is not None else (1 << 62)
    while True:
        lw = lw0.copy()
        uw = uw0.copy()
        t_attempt = time.monotonic()
        k.k_bnb_count(lw, uw, kfull, n, pairs_j, pairs_e,
                      1 if use_witness else 0, budget,
                      wit, wslot, fptr, fstage, fj, fe, fwv,
                      fs_k, fs_lo, fs_hi, fs_chars, fs_croot, fs_parent,
                      kcur, ctz8, out)
        now = time.monotonic()
        if out[3] != 0:
            raise RuntimeError("feasibility scratch overflow (solver bug)")
        if out[2] == 0:
            return BnbStats(int(out[1]), int(out[0]), True, now - t0)
        remaining = deadline_at - now
        rate = int(out[0]) / max(now - t_attempt, 1e-6)
        # stop once rerunning the current prefix would itself eat the
        # remaining time
        if remaining < 1.2 * budget / rate:
            return BnbStats(int(out[1]), int(out[0]), False, now - t0)
        budget = max(budget + 1, int(rate * remaining * 0.95))


_CTZ8 = None


def _ctz8_table():
    global _CTZ8
    if _CTZ8 is None:
        table = np.zeros(256, np.int64)
        for x in range(1, 256):
            table[x] = (x & -x).bit_length() - 1
        _CTZ8 = table
    return _CTZ8
