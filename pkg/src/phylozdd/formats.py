"""Text formats: "idbpp v1" instances, solution listings, "bigraph v1" graphs.

idbpp v1 (UTF-8, LF):
    #idbpp v1 m=<m> n=<n>
    <i>\t<Llist>\t<Ulist>          one line per character, i = 1..m in order

where each list is '-' (empty) or comma-separated strictly ascending
integers in [0, n).

Solutions: one phylogeny per line, m tab-separated lists in the same
encoding, sorted ascending by canonical key.

bigraph v1:
    #bigraph v1 a=<a_size> b=<b_size>
    <u>\t<v>                       one edge per line, u in A, v in B, 0-based
"""

from __future__ import annotations

import re
from typing import Iterable, TextIO

from .core import ElementSet, Instance, Phylogeny, canonical_key
from .reductions import BipartiteGraph


class FormatError(ValueError):
    """Malformed input file; carries a 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


_IDBPP_HEADER = re.compile(r"#idbpp v1 m=(\d+) n=(\d+)$")
_BIGRAPH_HEADER = re.compile(r"#bigraph v1 a=(\d+) b=(\d+)$")


def _format_list(s: ElementSet) -> str:
    if len(s) == 0:
        return "-"
    return ",".join(str(e) for e in s)


def _parse_list(text: str, n: int, line_no: int, what: str) -> ElementSet:
    if text == "-":
        return ElementSet(n)
    bits = 0
    prev = -1
    for tok in text.split(","):
        try:
            e = int(tok)
        except ValueError:
            raise FormatError(line_no, f"{what}: bad integer {tok!r}")
        if e <= prev:
            raise FormatError(line_no, f"{what}: list not strictly ascending at {e}")
        if not 0 <= e < n:
            raise FormatError(line_no, f"{what}: element {e} out of universe [0, {n})")
        bits |= 1 << e
        prev = e
    return ElementSet(n, bits)


def write_instance(inst: Instance, fh: TextIO) -> None:
    fh.write(f"#idbpp v1 m={inst.m} n={inst.n}\n")
    for i in range(inst.m):
        fh.write(f"{i + 1}\t{_format_list(inst.lower[i])}\t{_format_list(inst.upper[i])}\n")


def read_instance(fh: TextIO) -> Instance:
    header = fh.readline().rstrip("\n")
    match = _IDBPP_HEADER.match(header)
    if not match:
        raise FormatError(1, f"expected '#idbpp v1 m=<m> n=<n>' header, got {header!r}")
    m, n = int(match.group(1)), int(match.group(2))
    lower: list[ElementSet] = []
    upper: list[ElementSet] = []
    for idx in range(m):
        line_no = idx + 2
        line = fh.readline()
        if not line:
            raise FormatError(line_no, f"expected {m} character lines, got {idx}")
        fields = line.rstrip("\n").split("\t")
        if len(fields) != 3:
            raise FormatError(line_no, f"expected 3 tab-separated fields, got {len(fields)}")
        try:
            i = int(fields[0])
        except ValueError:
            raise FormatError(line_no, f"bad character index {fields[0]!r}")
        if i != idx + 1:
            raise FormatError(line_no, f"character index out of order: expected {idx + 1}, got {i}")
        lo = _parse_list(fields[1], n, line_no, "L")
        up = _parse_list(fields[2], n, line_no, "U")
        if lo.bits & ~up.bits:
            raise FormatError(line_no, "L not a subset of U")
        lower.append(lo)
        upper.append(up)
    extra = fh.readline()
    if extra.strip():
        raise FormatError(m + 2, "trailing content after last character line")
    return Instance(n, m, tuple(lower), tuple(upper))


def write_solutions(phylos: Iterable[Phylogeny], fh: TextIO) -> int:
    """Write phylogenies sorted ascending by canonical key; returns the count."""
    rows = sorted(phylos, key=canonical_key)
    for p in rows:
        fh.write("\t".join(_format_list(s) for s in p.sets) + "\n")
    return len(rows)


def read_solutions(fh: TextIO, inst: Instance) -> list[Phylogeny]:
    """Parse a solutions file against an instance (no validity checks beyond shape)."""
    out: list[Phylogeny] = []
    for line_no, line in enumerate(fh, start=1):
        if not line.strip():
            continue
        fields = line.rstrip("\n").split("\t")
        if len(fields) != inst.m:
            raise FormatError(line_no, f"expected {inst.m} fields, got {len(fields)}")
        sets = tuple(_parse_list(f, inst.n, line_no, f"S_{j + 1}") for j, f in enumerate(fields))
        out.append(Phylogeny(sets))
    return out


def write_bigraph(g: BipartiteGraph, fh: TextIO) -> None:
    fh.write(f"#bigraph v1 a={g.a_size} b={g.b_size}\n")
    for u, v in g.edges:
        fh.write(f"{u}\t{v}\n")


def read_bigraph(fh: TextIO) -> BipartiteGraph:
    header = fh.readline().rstrip("\n")
    match = _BIGRAPH_HEADER.match(header)
    if not match:
        raise FormatError(1, f"expected '#bigraph v1 a=<a> b=<b>' header, got {header!r}")
    a_size, b_size = int(match.group(1)), int(match.group(2))
    edges: list[tuple[int, int]] = []
    seen = set()
    for line_no, line in enumerate(fh, start=2):
        if not line.strip():
            continue
        fields = line.rstrip("\n").split("\t")
        if len(fields) != 2:
            raise FormatError(line_no, f"expected 'u\\tv', got {line.rstrip()!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise FormatError(line_no, f"bad edge integers {line.rstrip()!r}")
        if not 0 <= u < a_size:
            raise FormatError(line_no, f"A-vertex {u} out of range [0, {a_size})")
        if not 0 <= v < b_size:
            raise FormatError(line_no, f"B-vertex {v} out of range [0, {b_size})")
        if (u, v) in seen:
            raise FormatError(line_no, f"duplicate edge ({u}, {v}); graph must be simple")
        seen.add((u, v))
        edges.append((u, v))
    return BipartiteGraph(a_size, b_size, tuple(edges))
