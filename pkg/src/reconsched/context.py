"""Context events and the model-update operators they induce.

Context file lines are ``time,kind,payload``::

    4,slack,1:6        # task 1 finished after 6 time units
    9,failure,ES3
    12,mode,energy

Mode table file: ``mode,wcet_mult,active_mult,idle_mult,profile``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    AlreadyFailedError,
    ContextError,
    OverrunError,
    ParseError,
    UnknownEndSystemError,
    UnknownModeError,
    UnknownTaskError,
)
from .models import (
    ApplicationModel,
    EndSystem,
    PlatformModel,
    Source,
    parse_es,
    parse_int,
    parse_number,
    read_text,
    split_sections,
)

SLACK = "slack"
FAILURE = "failure"
MODE_CHANGE = "mode_change"
KINDS = (FAILURE, MODE_CHANGE, SLACK)  # also the same-time application order

MODES = ("performance", "workload_balance", "energy")
PROFILES = ("makespan", "workload", "energy")
_PROFILE_ALIASES = {"workload_balance": "workload", "performance": "makespan"}


def normalize_profile(name: str) -> str:
    name = _PROFILE_ALIASES.get(name, name)
    if name not in PROFILES:
        raise ContextError(f"unknown profile {name!r}; expected one of {PROFILES}")
    return name


@dataclass(frozen=True)
class ContextEvent:
    time: int
    kind: str
    task: int | None = None
    duration: int | None = None
    es: int | None = None
    mode: str | None = None

    def __post_init__(self):
        if self.time < 0:
            raise ContextError(f"event time must be non-negative, got {self.time}")
        if self.kind not in KINDS:
            raise ContextError(f"unknown event kind {self.kind!r}")
        if self.kind == SLACK and (self.task is None or self.duration is None):
            raise ContextError("slack event needs a task and an actual duration")
        if self.kind == FAILURE and self.es is None:
            raise ContextError("failure event needs an end system")
        if self.kind == MODE_CHANGE and self.mode not in MODES:
            raise ContextError(f"unknown mode {self.mode!r}; expected one of {MODES}")

    @classmethod
    def slack(cls, time: int, task: int, duration: int) -> "ContextEvent":
        return cls(time, SLACK, task=task, duration=duration)

    @classmethod
    def failure(cls, time: int, es: int) -> "ContextEvent":
        return cls(time, FAILURE, es=es)

    @classmethod
    def mode_change(cls, time: int, mode: str) -> "ContextEvent":
        return cls(time, MODE_CHANGE, mode=mode)

    def sort_key(self):
        payload = {
            SLACK: (self.task, self.duration),
            FAILURE: (self.es,),
            MODE_CHANGE: (self.mode,),
        }[self.kind]
        return (self.time, KINDS.index(self.kind), payload)

    def payload_text(self) -> str:
        if self.kind == SLACK:
            return f"{self.task}:{self.duration}"
        if self.kind == FAILURE:
            return f"ES{self.es}"
        return str(self.mode)


@dataclass(frozen=True)
class ModeSpec:
    wcet_mult: float
    active_mult: float
    idle_mult: float
    profile: str

    def __post_init__(self):
        for name in ("wcet_mult", "active_mult", "idle_mult"):
            if getattr(self, name) <= 0:
                raise ContextError(f"{name} must be positive")
        object.__setattr__(self, "profile", normalize_profile(self.profile))


@dataclass(frozen=True)
class ModeTable:
    modes: Mapping[str, ModeSpec]

    @classmethod
    def default(cls) -> "ModeTable":
        return cls(
            {
                "performance": ModeSpec(1.0, 1.0, 1.0, "makespan"),
                "workload_balance": ModeSpec(1.0, 1.0, 1.0, "workload"),
                # half-speed operation: longer tasks, lower power draw
                "energy": ModeSpec(1.5, 0.5, 0.5, "energy"),
            }
        )

    def __getitem__(self, mode: str) -> ModeSpec:
        try:
            return self.modes[mode]
        except KeyError:
            raise UnknownModeError(f"mode {mode!r} not in mode table") from None


# ---------------------------------------------------------------------------
# Parsing


def parse_event(row: list[str]) -> ContextEvent:
    if len(row) != 3:
        raise ParseError(f"context row {row}: expected time,kind,payload")
    time = parse_int(row[0], "event time")
    kind, payload = row[1].lower(), row[2]
    if kind == SLACK:
        task, sep, dur = payload.partition(":")
        if not sep:
            raise ParseError(f"slack payload {payload!r}: expected task:duration")
        return ContextEvent.slack(time, parse_int(task, "slack task"), parse_int(dur, "slack duration"))
    if kind == FAILURE:
        return ContextEvent.failure(time, parse_es(payload))
    if kind in ("mode", MODE_CHANGE):
        return ContextEvent.mode_change(time, payload)
    raise ContextError(f"unknown event kind {row[1]!r}")


def load_context(source: Source) -> list[ContextEvent]:
    rows = split_sections(read_text(source), default="EVENTS").get("EVENTS", [])
    if rows and rows[0][0].lower() == "time":
        rows = rows[1:]
    return [parse_event(r) for r in rows]


def serialize_context(events: Iterable[ContextEvent]) -> str:
    lines = ["time,kind,payload"]
    for e in events:
        kind = "mode" if e.kind == MODE_CHANGE else e.kind
        lines.append(f"{e.time},{kind},{e.payload_text()}")
    return "\n".join(lines) + "\n"


def load_mode_table(source: Source) -> ModeTable:
    rows = split_sections(read_text(source), default="MODES").get("MODES", [])
    if rows and rows[0][0].lower() == "mode":
        rows = rows[1:]
    modes = {}
    for row in rows:
        if len(row) != 5:
            raise ParseError(f"mode row {row}: expected mode,wcet_mult,active_mult,idle_mult,profile")
        modes[row[0]] = ModeSpec(
            float(parse_number(row[1], "wcet_mult")),
            float(parse_number(row[2], "active_mult")),
            float(parse_number(row[3], "idle_mult")),
            row[4],
        )
    return ModeTable(modes)


# ---------------------------------------------------------------------------
# Operators


def apply_slack(am: ApplicationModel, e: ContextEvent) -> ApplicationModel:
    if e.kind != SLACK:
        raise ContextError(f"expected a slack event, got {e.kind}")
    task = am.by_id.get(e.task)
    if task is None:
        raise UnknownTaskError(f"slack event for unknown task {e.task}")
    if e.duration > task.wcet:
        raise OverrunError(
            f"task {e.task}: actual duration {e.duration} exceeds WCET {task.wcet}"
        )
    if e.duration < 0:
        raise ContextError("actual duration must be non-negative")
    actual = dict(am.actual_execution)
    actual[e.task] = e.duration
    return replace(am, actual_execution=actual)


def apply_failure(pm: PlatformModel, e: ContextEvent) -> PlatformModel:
    if e.kind != FAILURE:
        raise ContextError(f"expected a failure event, got {e.kind}")
    if e.es not in pm.end_systems:
        raise UnknownEndSystemError(f"failure of unknown end system {e.es}")
    if e.es in pm.failed:
        raise AlreadyFailedError(f"end system {e.es} already failed at t={pm.failed[e.es]}")
    return replace(pm, failed={**pm.failed, e.es: e.time})


def _scale(value: int, mult: float) -> int:
    return math.ceil(value * Fraction(repr(float(mult))))


def apply_mode(
    am: ApplicationModel, pm: PlatformModel, e: ContextEvent, mt: ModeTable | None = None
) -> tuple[ApplicationModel, PlatformModel, str]:
    if e.kind != MODE_CHANGE:
        raise ContextError(f"expected a mode change, got {e.kind}")
    spec = (mt or ModeTable.default())[e.mode]
    if spec.wcet_mult != 1:
        tasks = tuple(replace(t, wcet=_scale(t.wcet, spec.wcet_mult)) for t in am.tasks)
        actual = {t: _scale(d, spec.wcet_mult) for t, d in am.actual_execution.items()}
        am = ApplicationModel(tasks, am.messages, actual)
    if spec.active_mult != 1 or spec.idle_mult != 1:
        ends = {
            es_id: EndSystem(es_id, es.active_power * spec.active_mult, es.idle_power * spec.idle_mult)
            for es_id, es in pm.end_systems.items()
        }
        pm = replace(pm, end_systems=ends)
    return am, pm, spec.profile


def apply_events(
    am: ApplicationModel,
    pm: PlatformModel,
    events: Iterable[ContextEvent],
    mt: ModeTable | None = None,
    profile: str = "makespan",
) -> tuple[ApplicationModel, PlatformModel, str]:
    """Apply events by time, then failure < mode change < slack, then payload."""
    for e in sorted(events, key=ContextEvent.sort_key):
        if e.kind == FAILURE:
            pm = apply_failure(pm, e)
        elif e.kind == MODE_CHANGE:
            am, pm, profile = apply_mode(am, pm, e, mt)
        else:
            am = apply_slack(am, e)
    return am, pm, profile
