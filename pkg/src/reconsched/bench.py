"""Scaling benchmark: reconstruction runtime, log size, recovery latency,
and the same batch over a process pool.

Timing covers the engine calls only; workload generation and file I/O are
excluded.  The failure for the recovery measurement hits the busiest ES at
half the baseline makespan.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, field, fields

from .context import PROFILES, ContextEvent, apply_failure, normalize_profile
from .errors import ConfigError, ReconstructionError
from .evaluator import busy_time, evaluate
from .priorities import builtin_temporal
from .reconstructor import reconstruct_full, recover_failure
from .recovery import serialize_log
from .schedule import serialize_schedule
from .workload import generate_workload

CSV_COLUMNS = ("task_count", "profile", "mean_runtime_s", "log_bytes", "recovery_s", "workers", "wall_s")
TIMING_COLUMNS = ("mean_runtime_s", "recovery_s", "wall_s")
PARALLEL = "parallel"


@dataclass(frozen=True)
class BenchConfig:
    task_counts: tuple[int, ...] = (5, 15, 30, 50, 100)
    repetitions: int = 1000
    seed: int = 0
    profiles: tuple[str, ...] = PROFILES
    workers: int = 13

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.workers < 1:
            raise ConfigError(f"worker count must be >= 1, got {self.workers}")
        if not self.task_counts or any(n < 1 for n in self.task_counts):
            raise ConfigError("task counts must be positive")
        object.__setattr__(self, "task_counts", tuple(self.task_counts))
        object.__setattr__(self, "profiles", tuple(normalize_profile(p) for p in self.profiles))


@dataclass(frozen=True)
class BenchRecord:
    task_count: int
    profile: str
    mean_runtime_s: float
    log_bytes: float
    recovery_s: float
    workers: int
    wall_s: float


@dataclass(frozen=True)
class RunResult:
    runtime_s: float
    log_bytes: int
    recovery_s: float
    schedule: str = field(repr=False)
    log: bytes = field(repr=False)


def instance_seed(seed: int, count: int, rep: int) -> int:
    return (seed * 1_000_003 + count) * 1_000_033 + rep


def run_instance(count: int, seed: int, rep: int, profile: str = "makespan") -> RunResult:
    am, pm = generate_workload(count, instance_seed(seed, count, rep))

    t0 = time.perf_counter()
    tp = builtin_temporal(am)
    sched, log = reconstruct_full(am, pm, tp)
    evaluate(sched, am, pm, profile)
    runtime = time.perf_counter() - t0

    blob = serialize_log(log)
    fail_at = sched.makespan // 2
    busiest = max(pm.live_end_systems, key=lambda es: (busy_time(sched, es), -es))
    pm_failed = apply_failure(pm, ContextEvent.failure(fail_at, busiest))
    recovery = 0.0
    if pm_failed.live_end_systems:
        t0 = time.perf_counter()
        recover_failure(am, pm_failed, log, fail_at)
        recovery = time.perf_counter() - t0
    return RunResult(runtime, len(blob), recovery, serialize_schedule(sched), blob)


def _run_job(job: tuple[int, int, int]) -> RunResult:
    return run_instance(*job)


def _record(count, profile, results, workers, wall) -> BenchRecord:
    n = len(results)
    return BenchRecord(
        count,
        profile,
        sum(r.runtime_s for r in results) / n,
        sum(r.log_bytes for r in results) / n,
        sum(r.recovery_s for r in results) / n,
        workers,
        wall,
    )


def run_bench(config: BenchConfig, progress=None) -> list[BenchRecord]:
    """Serial records per (count, profile), then one pool record per count.

    Raises ReconstructionError when a pooled run disagrees with its serial twin.
    """
    records = []
    serial_outputs: dict[tuple[int, int], tuple[str, bytes]] = {}
    for count in config.task_counts:
        for profile in config.profiles:
            t0 = time.perf_counter()
            results = [
                run_instance(count, config.seed, rep, profile) for rep in range(config.repetitions)
            ]
            wall = time.perf_counter() - t0
            for rep, r in enumerate(results):
                serial_outputs[(count, rep)] = (r.schedule, r.log)
            records.append(_record(count, profile, results, 1, wall))
            if progress:
                progress(records[-1])

    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        for count in config.task_counts:
            jobs = [(count, config.seed, rep) for rep in range(config.repetitions)]
            t0 = time.perf_counter()
            # map() yields in submission order, independent of completion order
            results = list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * config.workers))))
            wall = time.perf_counter() - t0
            for rep, r in enumerate(results):
                if serial_outputs[(count, rep)] != (r.schedule, r.log):
                    raise ReconstructionError(
                        f"pooled run differs from serial run (count={count}, rep={rep})"
                    )
            rec = _record(count, PARALLEL, results, config.workers, wall)
            records.append(rec)
            if progress:
                progress(rec)
    return records


def to_csv(records: list[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(astuple(r))
    return buf.getvalue()


def without_timings(csv_text: str) -> list[tuple]:
    """CSV rows with the timing columns dropped (for determinism checks)."""
    rows = list(csv.DictReader(io.StringIO(csv_text)))
    keep = [f.name for f in fields(BenchRecord) if f.name not in TIMING_COLUMNS]
    return [tuple(row[k] for k in keep) for row in rows]
