"""Shared fixtures paths and seeded scenario builders for the test suite."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from reconsched import (
    ContextEvent,
    ModeTable,
    apply_events,
    apply_failure,
    apply_mode,
    generate_workload,
    reconstruct_full,
)
from reconsched.context import MODES, PROFILES

FIXTURES = Path(__file__).parent / "fixtures"
MODE_FOR_PROFILE = dict(zip(PROFILES, MODES))


def fixture(name: str) -> Path:
    return FIXTURES / name


@dataclass
class Instance:
    seed: int
    am: object
    pm: object
    profile: str
    schedule: object
    log: object


def instance(seed: int, min_tasks=5, max_tasks=50, min_es=2, max_es=6) -> Instance:
    """Random DAG on a chained platform, put in one of the three modes."""
    rng = random.Random(seed)
    n = rng.randint(min_tasks, max_tasks)
    n_es = rng.randint(min_es, max_es)
    am, pm = generate_workload(n, seed, n_es)
    profile = PROFILES[seed % len(PROFILES)]
    am, pm, profile = apply_mode(am, pm, ContextEvent.mode_change(0, MODE_FOR_PROFILE[profile]), ModeTable.default())
    sched, log = reconstruct_full(am, pm)
    return Instance(seed, am, pm, profile, sched, log)


def slack_event(inst: Instance, rng: random.Random) -> ContextEvent:
    """Early completion of a random task, reported at its actual finish."""
    entry = rng.choice(inst.schedule.task_entries)
    wcet = inst.am.by_id[entry.task].wcet
    actual = rng.randint(0, max(0, wcet - 1))
    return ContextEvent.slack(entry.start + actual, entry.task, actual)


def failure_event(inst: Instance, rng: random.Random) -> ContextEvent:
    es = rng.choice(inst.pm.live_end_systems)
    return ContextEvent.failure(rng.randint(0, inst.schedule.makespan), es)


def after(inst: Instance, event: ContextEvent):
    am, pm, _ = apply_events(inst.am, inst.pm, [event])
    return am, pm


def failed_platform(pm, es, t=0):
    return apply_failure(pm, ContextEvent.failure(t, es))
