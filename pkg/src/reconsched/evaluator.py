"""Schedule metrics and the per-profile scalar objective."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

from .context import normalize_profile
from .models import ApplicationModel, PlatformModel
from .schedule import Schedule


@dataclass(frozen=True)
class Metrics:
    makespan: int
    per_es_utilization: dict[int, float]
    workload_spread: float
    energy: float

    def to_json(self) -> str:
        d = asdict(self)
        d["per_es_utilization"] = {str(k): v for k, v in self.per_es_utilization.items()}
        return json.dumps(d, sort_keys=True)

    def csv_header(self) -> str:
        return "makespan,workload_spread,energy," + ",".join(
            f"util_es{es}" for es in self.per_es_utilization
        )

    def csv_record(self) -> str:
        return ",".join(
            [str(self.makespan), repr(self.workload_spread), repr(self.energy)]
            + [repr(u) for u in self.per_es_utilization.values()]
        )


def makespan(s: Schedule) -> int:
    return s.makespan


def busy_time(s: Schedule, es: int) -> int:
    return sum(e.end - e.start for e in s.task_entries if e.es == es)


def workload(s: Schedule, pm: PlatformModel) -> tuple[dict[int, float], float]:
    """Per-ES utilization over the live end systems and its population std."""
    live = pm.live_end_systems
    span = s.makespan
    if span <= 0:
        return {es: 0.0 for es in live}, 0.0
    util = {es: busy_time(s, es) / span for es in live}
    if not util:
        return util, 0.0
    mean = sum(util.values()) / len(util)
    spread = math.sqrt(sum((u - mean) ** 2 for u in util.values()) / len(util))
    return util, spread


def energy(s: Schedule, pm: PlatformModel) -> float:
    """Linear active/idle power over the schedule horizon, live ES only."""
    span = s.makespan
    total = 0.0
    for es in pm.live_end_systems:
        spec = pm.end_systems[es]
        busy = busy_time(s, es)
        total += spec.active_power * busy + spec.idle_power * (span - busy)
    return total


def evaluate(
    s: Schedule, am: ApplicationModel, pm: PlatformModel, profile: str = "makespan"
) -> tuple[Metrics, float]:
    profile = normalize_profile(profile)
    util, spread = workload(s, pm)
    m = Metrics(s.makespan, util, spread, energy(s, pm))
    objective = {"makespan": m.makespan, "workload": m.workload_spread, "energy": m.energy}[profile]
    return m, objective
