"""Temporal (b-level) and spatial (least-loaded) priorities.

Priority file::

    TEMPORAL:
    1
    3
    2
    SPATIAL:
    1,2
    3,1

Either section may be omitted; the built-in algorithm then covers that
dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import (
    DuplicateTaskError,
    EmptyPlatformError,
    MissingTaskError,
    ParseError,
    UnknownEndSystemError,
    UnknownTaskError,
)
from .models import (
    ApplicationModel,
    PlatformModel,
    Source,
    parse_es,
    parse_int,
    read_text,
    split_sections,
    topological_order,
)

LEAST_LOADED = "least-loaded"


@dataclass(frozen=True)
class TemporalPriorities:
    order: tuple[int, ...]
    values: Mapping[int, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        if len(set(self.order)) != len(self.order):
            raise DuplicateTaskError("temporal order lists a task more than once")

    def rank(self) -> dict[int, int]:
        return {t: i for i, t in enumerate(self.order)}


@dataclass(frozen=True)
class SpatialPriorities:
    """Task -> end system.  Tasks without an entry are placed least-loaded."""

    assignment: Mapping[int, int] = field(default_factory=dict)

    @classmethod
    def least_loaded(cls) -> "SpatialPriorities":
        return cls({})

    def target(self, task_id: int) -> int | str:
        return self.assignment.get(task_id, LEAST_LOADED)


def b_level(am: ApplicationModel) -> dict[int, int]:
    """Bottom level of every task: own WCET plus the largest child b-level."""
    bl: dict[int, int] = {}
    for tid in reversed(topological_order(am)):
        task = am.by_id[tid]
        bl[tid] = task.wcet + max((bl[c] for c in task.children), default=0)
    return bl


def temporal_order(bl: Mapping[int, float]) -> TemporalPriorities:
    order = sorted(bl, key=lambda t: (-bl[t], t))
    return TemporalPriorities(tuple(order), dict(bl))


def builtin_temporal(am: ApplicationModel) -> TemporalPriorities:
    return temporal_order(b_level(am))


def least_loaded(loads: Mapping[int, float]) -> int:
    if not loads:
        raise EmptyPlatformError("no live end system left")
    return min(loads, key=lambda es: (loads[es], es))


def check_temporal(tp: TemporalPriorities, am: ApplicationModel) -> None:
    expected = set(am.task_ids)
    listed = set(tp.order)
    extra = sorted(listed - expected)
    if extra:
        raise UnknownTaskError(f"priorities name unknown task(s) {extra}")
    missing = sorted(expected - listed)
    if missing:
        raise MissingTaskError(f"priorities omit task(s) {missing}")


def ingest_priorities(
    source: Source, am: ApplicationModel, pm: PlatformModel | None = None
) -> tuple[TemporalPriorities, SpatialPriorities]:
    """Read externally produced priorities, filling absent sections with built-ins."""
    sections = split_sections(read_text(source))
    unknown = set(sections) - {"TEMPORAL", "SPATIAL"}
    if unknown:
        raise ParseError(f"unknown section(s) in priorities file: {sorted(unknown)}")

    if "TEMPORAL" in sections:
        order = []
        seen = set()
        for row in sections["TEMPORAL"]:
            if len(row) != 1:
                raise ParseError(f"TEMPORAL row {row}: expected one task id")
            tid = parse_int(row[0], "task id")
            if tid in seen:
                raise DuplicateTaskError(f"task {tid} listed twice in TEMPORAL")
            seen.add(tid)
            order.append(tid)
        tp = TemporalPriorities(tuple(order))
        check_temporal(tp, am)
    else:
        tp = builtin_temporal(am)

    assignment = {}
    for row in sections.get("SPATIAL", []):
        if len(row) != 2:
            raise ParseError(f"SPATIAL row {row}: expected task_id,es_id")
        tid = parse_int(row[0], "task id")
        es = parse_es(row[1])
        if tid in assignment:
            raise DuplicateTaskError(f"task {tid} listed twice in SPATIAL")
        if tid not in am.by_id:
            raise UnknownTaskError(f"SPATIAL names unknown task {tid}")
        if pm is not None and es not in pm.end_systems:
            raise UnknownEndSystemError(f"SPATIAL assigns task {tid} to unknown ES{es}")
        assignment[tid] = es
    return tp, SpatialPriorities(assignment)


def serialize_priorities(tp: TemporalPriorities, sp: SpatialPriorities | None = None) -> str:
    out = ["TEMPORAL:", *(str(t) for t in tp.order)]
    if sp is not None and sp.assignment:
        out.append("SPATIAL:")
        out += [f"{t},{es}" for t, es in sorted(sp.assignment.items())]
    return "\n".join(out) + "\n"
