"""Recovery snapshots: the reconstructor state at a point in time.

A snapshot at time ``t`` holds every task dispatched at or before ``t``
(finished ones and those still running), the messages delivered to them,
the per-ES busy-until times and the per-link collision lists those
messages occupy.  The log keeps one snapshot per distinct dispatch instant.

Binary layout of a serialized log (all integers big-endian)::

    offset 0   4 bytes   magic  b"RLOG"
    offset 4   uint16    format version (currently 1)
    offset 6   uint32    record count N
    then N records:
               uint32    payload length L
               L bytes   UTF-8 JSON object (sorted keys, no whitespace)

Each payload has keys ``time``, ``es_available`` ([es, t] pairs),
``links`` ([link, [[start, end, tx, rx], ...]] pairs), ``started``,
``completed``, ``tasks`` ([task, es, start, end, locked]) and ``messages``
([tx, rx, arrival, [[link, start, end], ...]]).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import NoSnapshotError, ParseError
from .models import Link, PlatformModel
from .schedule import MessageEntry, Reservation, Schedule, TaskEntry

MAGIC = b"RLOG"
VERSION = 1
_HEADER = struct.Struct(">4sHI")
_LENGTH = struct.Struct(">I")


@dataclass(frozen=True)
class Snapshot:
    time: int
    es_available: Mapping[int, int]
    links: Mapping[Link, tuple[tuple[int, int, int, int], ...]]
    started: frozenset[int]
    completed: frozenset[int]
    task_entries: tuple[TaskEntry, ...]
    message_entries: tuple[MessageEntry, ...]

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "es_available": [[es, t] for es, t in sorted(self.es_available.items())],
            "links": [[str(l), [list(r) for r in rs]] for l, rs in sorted(self.links.items())],
            "started": sorted(self.started),
            "completed": sorted(self.completed),
            "tasks": [[e.task, e.es, e.start, e.end, int(e.locked)] for e in self.task_entries],
            "messages": [
                [m.tx, m.rx, m.arrival, [[str(r.link), r.start, r.end] for r in m.reservations]]
                for m in self.message_entries
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Snapshot":
        return cls(
            time=d["time"],
            es_available={es: t for es, t in d["es_available"]},
            links={Link.parse(l): tuple(tuple(r) for r in rs) for l, rs in d["links"]},
            started=frozenset(d["started"]),
            completed=frozenset(d["completed"]),
            task_entries=tuple(TaskEntry(t, es, s, e, bool(lk)) for t, es, s, e, lk in d["tasks"]),
            message_entries=tuple(
                MessageEntry(
                    tx, rx, tuple(Reservation(Link.parse(l), s, e) for l, s, e in res), arr
                )
                for tx, rx, arr, res in d["messages"]
            ),
        )


@dataclass
class RecoveryLog:
    """Append-only sequence of snapshots with strictly increasing times."""

    snapshots: list[Snapshot] = field(default_factory=list)

    def append(self, snap: Snapshot) -> None:
        if self.snapshots and snap.time <= self.snapshots[-1].time:
            raise ValueError(
                f"snapshot time {snap.time} not after previous {self.snapshots[-1].time}"
            )
        self.snapshots.append(snap)

    def __len__(self):
        return len(self.snapshots)

    def __iter__(self) -> Iterator[Snapshot]:
        return iter(self.snapshots)

    @property
    def times(self) -> list[int]:
        return [s.time for s in self.snapshots]


def state_at(schedule: Schedule, pm: PlatformModel, t: int) -> Snapshot:
    """Project a finished schedule onto the instant ``t``."""
    entries = tuple(e for e in schedule.task_entries if e.start <= t)
    started = frozenset(e.task for e in entries)
    completed = frozenset(e.task for e in entries if e.end <= t)
    available = {es: 0 for es in pm.end_systems}
    for e in entries:
        available[e.es] = max(available.get(e.es, 0), e.end)
    msgs = tuple(m for m in schedule.message_entries if m.rx in started)
    links: dict[Link, list[tuple[int, int, int, int]]] = {}
    for m in msgs:
        for r in m.reservations:
            links.setdefault(r.link, []).append((r.start, r.end, m.tx, m.rx))
    return Snapshot(
        time=t,
        es_available=available,
        links={l: tuple(sorted(v)) for l, v in sorted(links.items())},
        started=started,
        completed=completed,
        task_entries=entries,
        message_entries=msgs,
    )


def build_log(schedule: Schedule, pm: PlatformModel) -> RecoveryLog:
    log = RecoveryLog()
    for t in sorted({0} | {e.start for e in schedule.task_entries}):
        log.append(state_at(schedule, pm, t))
    return log


def snapshot_restore(log: RecoveryLog, t: int) -> Snapshot:
    """Latest snapshot taken at or before ``t``."""
    best = None
    for snap in log.snapshots:
        if snap.time > t:
            break
        best = snap
    if best is None:
        first = log.snapshots[0].time if log.snapshots else None
        raise NoSnapshotError(f"no snapshot at or before t={t} (log starts at {first})")
    return best


def serialize_log(log: RecoveryLog) -> bytes:
    parts = [_HEADER.pack(MAGIC, VERSION, len(log))]
    for snap in log:
        payload = json.dumps(snap.to_dict(), sort_keys=True, separators=(",", ":")).encode()
        parts.append(_LENGTH.pack(len(payload)))
        parts.append(payload)
    return b"".join(parts)


def load_log(data: bytes) -> RecoveryLog:
    if len(data) < _HEADER.size:
        raise ParseError("recovery log truncated before header")
    magic, version, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ParseError("not a recovery log (bad magic)")
    if version != VERSION:
        raise ParseError(f"unsupported recovery log version {version}")
    pos = _HEADER.size
    log = RecoveryLog()
    for i in range(count):
        if pos + _LENGTH.size > len(data):
            raise ParseError(f"record {i}: truncated length prefix")
        (n,) = _LENGTH.unpack_from(data, pos)
        pos += _LENGTH.size
        if pos + n > len(data):
            raise ParseError(f"record {i}: truncated payload")
        try:
            log.append(Snapshot.from_dict(json.loads(data[pos : pos + n])))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"record {i}: {exc}") from None
        pos += n
    if pos != len(data):
        raise ParseError("trailing bytes after last record")
    return log
