"""Benchmark harness: seeded corpora, solver dispatch, CSV records.

Config file grammar (key = value, '#' comments, blank lines ignored):

    m = 50,100            grid axis: character counts
    n = 50,100            grid axis: species counts
    p = 0.1,0.2           grid axis: perturbation probabilities
    instances = 20        instances per (m, n, p) cell
    seed = 1234           base seed; per-instance seeds derive from it
    methods = zdd,bnb     any of zdd, bnb, brute
    timeout_ms = 120000   wall-clock budget per (instance, method)
    order = character-major          optional, zdd variable order
    pair_order = lexicographic       optional, zdd pair schedule

Cells run in the listed order, instances within a cell by index; record
order and all non-time CSV fields are reproducible byte for byte for a
fixed config. Timeouts are recorded as data, never as harness failures.
"""

from __future__ import annotations

import gc
import math
import multiprocessing
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

from .bnb import bnb_count
from .datagen import GenConfig, derive_seed, instance_from_config
from .feasibility import brute_force_solutions
from .zddbuild import BuildDeadlineExceeded, build, make_order

CSV_HEADER = "instance,seed,m,n,p,method,status,time_ms,count,zdd_nodes,zdd_peak_nodes,bnb_calls,bnb_found"

METHODS = ("zdd", "bnb", "brute")


@dataclass(frozen=True)
class BenchConfig:
    ms: tuple[int, ...]
    ns: tuple[int, ...]
    ps: tuple[float, ...]
    instances: int
    seed: int
    methods: tuple[str, ...]
    timeout_ms: int
    order: str = "character-major"
    pair_order: str = "lexicographic"


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    seed: int
    m: int
    n: int
    p: float
    method: str
    status: str  # solved | timeout | refused
    time_ms: int
    count: int | None = None
    zdd_nodes: int | None = None
    zdd_peak_nodes: int | None = None
    bnb_calls: int | None = None
    bnb_found: int | None = None

    def csv_row(self) -> str:
        def opt(x) -> str:
            return "" if x is None else str(x)

        return ",".join([
            self.instance_id, str(self.seed), str(self.m), str(self.n), str(self.p),
            self.method, self.status, str(self.time_ms), opt(self.count),
            opt(self.zdd_nodes), opt(self.zdd_peak_nodes),
            opt(self.bnb_calls), opt(self.bnb_found),
        ])


@dataclass(frozen=True)
class BenchJob:
    cfg: GenConfig
    index: int
    method: str
    timeout_ms: int
    order: str
    pair_order: str

    @property
    def instance_id(self) -> str:
        return f"m{self.cfg.m}-n{self.cfg.n}-p{self.cfg.p}-i{self.index:03d}"


def parse_bench_config(text: str) -> BenchConfig:
    values: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {line_no}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    required = ("m", "n", "p", "instances", "seed", "methods", "timeout_ms")
    for key in required:
        if key not in values:
            raise ValueError(f"config missing required key {key!r}")
    methods = tuple(tok.strip() for tok in values["methods"].split(",") if tok.strip())
    for meth in methods:
        if meth not in METHODS:
            raise ValueError(f"unknown method {meth!r} (choose from {METHODS})")
    return BenchConfig(
        ms=tuple(int(tok) for tok in values["m"].split(",")),
        ns=tuple(int(tok) for tok in values["n"].split(",")),
        ps=tuple(float(tok) for tok in values["p"].split(",")),
        instances=int(values["instances"]),
        seed=int(values["seed"]),
        methods=methods,
        timeout_ms=int(values["timeout_ms"]),
        order=values.get("order", "character-major"),
        pair_order=values.get("pair_order", "lexicographic"),
    )


def bench_jobs(config: BenchConfig) -> list[BenchJob]:
    jobs = []
    counter = 0
    for m in config.ms:
        for n in config.ns:
            for p in config.ps:
                for i in range(config.instances):
                    seed = derive_seed(config.seed, counter)
                    counter += 1
                    cfg = GenConfig(m, n, p, seed)
                    for method in config.methods:
                        jobs.append(BenchJob(cfg, i, method, config.timeout_ms,
                                             config.order, config.pair_order))
    return jobs


def run_job(job: BenchJob) -> BenchRecord:
    inst = instance_from_config(job.cfg)
    base = BenchRecord(job.instance_id, job.cfg.seed, job.cfg.m, job.cfg.n,
                       job.cfg.p, job.method, "solved", 0)
    deadline = job.timeout_ms / 1000.0
    if job.method == "zdd":
        import time as _time

        vm = make_order(inst, job.order)
        t0 = _time.monotonic()
        try:
            root, stats = build(inst, vm, pair_schedule=job.pair_order, deadline=deadline)
        except BuildDeadlineExceeded as exc:
            return replace(base, status="timeout",
                           time_ms=round(exc.stats.wall_time * 1000))
        except MemoryError:
            # memory shortage is the zdd method's other budget failure;
            # recorded like a timeout
            return replace(base, status="timeout",
                           time_ms=round((_time.monotonic() - t0) * 1000))
        return replace(base, time_ms=round(stats.wall_time * 1000),
                       count=root.store.count(root),
                       zdd_nodes=stats.final_nodes, zdd_peak_nodes=stats.peak_nodes)
    if job.method == "bnb":
        stats = bnb_count(inst, deadline=deadline)
        status = "solved" if stats.completed else "timeout"
        return replace(base, status=status, time_ms=round(stats.wall_time * 1000),
                       count=stats.found if stats.completed else None,
                       bnb_calls=stats.calls, bnb_found=stats.found)
    if job.method == "brute":
        import time as _time

        t0 = _time.monotonic()
        try:
            sols = brute_force_solutions(inst)
        except ValueError:
            return replace(base, status="refused",
                           time_ms=round((_time.monotonic() - t0) * 1000))
        return replace(base, time_ms=round((_time.monotonic() - t0) * 1000),
                       count=len(sols))
    raise ValueError(f"unknown method {job.method!r}")


def run_bench(config: BenchConfig, jobs: int = 1) -> list[BenchRecord]:
    todo = bench_jobs(config)
    if jobs <= 1:
        out = []
        for job in todo:
            out.append(run_job(job))
            gc.collect()  # release solver arenas promptly between jobs
        return out
    with multiprocessing.Pool(jobs) as pool:
        return list(pool.imap(run_job, todo))


def append_csv(records: Iterable[BenchRecord], path: str | Path) -> None:
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with path.open("a", encoding="utf-8") as fh:
        if fresh:
            fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")


def log10_int(x: int) -> float:
    """log10 of a positive int of any magnitude."""
    if x <= 0:
        raise ValueError("log10_int needs a positive integer")
    shift = max(0, x.bit_length() - 53)
    return math.log10(x >> shift) + shift * math.log10(2)


def compression_ratio(count: int, zdd_nodes: int) -> float:
    """log10(zdd_nodes / count); strongly negative means strong compression."""
    if count < 1:
        raise ValueError("ratio undefined for count 0")
    return log10_int(zdd_nodes) - log10_int(count)


def aggregate_ratios(records: Iterable[BenchRecord]) -> list[dict]:
    """Per-(m, n, p) mean and population std of the compression ratio.

    Uses zdd-solved records with count >= 1; others are skipped.
    """
    cells: dict[tuple[int, int, float], list[float]] = {}
    for rec in records:
        if rec.method != "zdd" or rec.status != "solved":
            continue
        if rec.count is None or rec.count < 1 or rec.zdd_nodes is None:
            continue
        cells.setdefault((rec.m, rec.n, rec.p), []).append(
            compression_ratio(rec.count, rec.zdd_nodes))
    rows = []
    for (m, n, p), ratios in sorted(cells.items()):
        mean = sum(ratios) / len(ratios)
        var = sum((r - mean) ** 2 for r in ratios) / len(ratios)
        rows.append({"m": m, "n": n, "p": p, "solved": len(ratios),
                     "mean": mean, "std": math.sqrt(var)})
    return rows
