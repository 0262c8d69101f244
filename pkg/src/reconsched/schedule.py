"""Schedule value types and the schedule file format.

::

    TASKS:
    task,es,start,end,locked
    1,1,0,10,0
    MESSAGES:
    tx,rx,link,start,end
    1,3,ES1>R1,10,13
    1,3,R1>ES2,13,16
    1,2,-,10,10
    makespan,76

A message without link reservations is written as a single ``-`` line whose
start and end both carry its arrival time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import ParseError
from .models import Link, Source, parse_int, read_text


@dataclass(frozen=True)
class TaskEntry:
    task: int
    es: int
    start: int
    end: int
    locked: bool = False

    def timing(self) -> tuple[int, int, int, int]:
        return (self.task, self.es, self.start, self.end)


@dataclass(frozen=True)
class Reservation:
    link: Link
    start: int
    end: int


@dataclass(frozen=True)
class MessageEntry:
    tx: int
    rx: int
    reservations: tuple[Reservation, ...]
    arrival: int


@dataclass(frozen=True)
class Schedule:
    task_entries: tuple[TaskEntry, ...] = ()
    message_entries: tuple[MessageEntry, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "task_entries", tuple(sorted(self.task_entries, key=lambda e: e.task))
        )
        object.__setattr__(
            self,
            "message_entries",
            tuple(sorted(self.message_entries, key=lambda m: (m.tx, m.rx))),
        )

    @property
    def makespan(self) -> int:
        return max((e.end for e in self.task_entries), default=0)

    def entry(self, task: int) -> TaskEntry:
        for e in self.task_entries:
            if e.task == task:
                return e
        raise KeyError(task)

    def entries_by_task(self) -> dict[int, TaskEntry]:
        return {e.task: e for e in self.task_entries}

    def messages_by_edge(self) -> dict[tuple[int, int], MessageEntry]:
        return {(m.tx, m.rx): m for m in self.message_entries}

    def timing(self) -> tuple:
        """Schedule content with the lock flags stripped."""
        return (tuple(e.timing() for e in self.task_entries), self.message_entries)


def serialize_schedule(s: Schedule) -> str:
    out = ["TASKS:", "task,es,start,end,locked"]
    out += [f"{e.task},{e.es},{e.start},{e.end},{int(e.locked)}" for e in s.task_entries]
    out += ["MESSAGES:", "tx,rx,link,start,end"]
    for m in s.message_entries:
        if not m.reservations:
            out.append(f"{m.tx},{m.rx},-,{m.arrival},{m.arrival}")
        for r in m.reservations:
            out.append(f"{m.tx},{m.rx},{r.link},{r.start},{r.end}")
    out.append(f"makespan,{s.makespan}")
    return "\n".join(out) + "\n"


def load_schedule(source: Source) -> Schedule:
    tasks: list[TaskEntry] = []
    msgs: dict[tuple[int, int], list] = {}
    section = None
    declared = None
    for lineno, line in enumerate(read_text(source).splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("TASKS:", "MESSAGES:"):
            section = line[:-1]
            continue
        cells = [c.strip() for c in line.split(",")]
        if cells[0] == "makespan":
            declared = parse_int(cells[1], "makespan")
            continue
        if cells[0] in ("task", "tx"):
            continue
        if section == "TASKS":
            if len(cells) != 5:
                raise ParseError(f"line {lineno}: expected task,es,start,end,locked")
            task, es, start, end, locked = (parse_int(c, "schedule field") for c in cells)
            tasks.append(TaskEntry(task, es, start, end, bool(locked)))
        elif section == "MESSAGES":
            if len(cells) != 5:
                raise ParseError(f"line {lineno}: expected tx,rx,link,start,end")
            key = (parse_int(cells[0], "tx"), parse_int(cells[1], "rx"))
            start, end = parse_int(cells[3], "start"), parse_int(cells[4], "end")
            msgs.setdefault(key, []).append((cells[2], start, end))
        else:
            raise ParseError(f"line {lineno}: data outside of any section")
    entries = []
    for (tx, rx), rows in msgs.items():
        if len(rows) == 1 and rows[0][0] == "-":
            entries.append(MessageEntry(tx, rx, (), rows[0][1]))
            continue
        res = tuple(Reservation(Link.parse(l), s, e) for l, s, e in rows)
        entries.append(MessageEntry(tx, rx, res, res[-1].end))
    sched = Schedule(tuple(tasks), tuple(entries))
    if declared is not None and declared != sched.makespan:
        raise ParseError(f"declared makespan {declared} != computed {sched.makespan}")
    return sched


def replace_entries(s: Schedule, entries: Iterable[TaskEntry]) -> Schedule:
    return Schedule(tuple(entries), s.message_entries)
