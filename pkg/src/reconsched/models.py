"""Application and platform models: types, text/JSON formats, validation.

Tasks file (comma-separated, header row)::

    task_id,parents,children,wcet,message_size
    1,-,2;3,10,2
    2,1,4,15,4

optionally followed by ``MESSAGES:`` (``tx,rx,size``) and ``ACTUAL:``
(``task_id,duration``) sections.  Platform file::

    ES:
    id,active_power,idle_power
    1,1.0,0.1
    ROUTERS:
    id
    R1
    ROUTES:
    sender,receiver,routers
    1,3,R1;R2
    BANDWIDTH:
    1
    FAILED:
    es,time

Only ``ES:`` is mandatory.  When ``ROUTERS:`` is omitted the router set is
whatever the routes mention.
"""

from __future__ import annotations

import csv
import heapq
import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import IO, Iterable, Mapping, NamedTuple, Union

from .errors import (
    ConsistencyError,
    CycleError,
    DeadEndpointError,
    NoRouteError,
    ParseError,
    UnknownEndSystemError,
    UnknownTaskError,
)

Source = Union[str, bytes, Path, IO]

DEFAULT_ACTIVE_POWER = 1.0
DEFAULT_IDLE_POWER = 0.1
DEFAULT_BANDWIDTH = 1


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Task:
    id: int
    parents: tuple[int, ...] = ()
    children: tuple[int, ...] = ()
    wcet: int = 0
    message_size: float = 0

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(sorted(set(self.parents))))
        object.__setattr__(self, "children", tuple(sorted(set(self.children))))
        if self.id <= 0:
            raise ConsistencyError(f"task id must be positive, got {self.id}")
        if self.wcet < 0:
            raise ConsistencyError(f"task {self.id}: negative wcet {self.wcet}")
        if self.message_size < 0:
            raise ConsistencyError(f"task {self.id}: negative message size")


@dataclass(frozen=True)
class MessageRecord:
    tx_task: int
    rx_task: int
    size: float


class Link(NamedTuple):
    """Directed hop between two network nodes (``ES<n>`` or a router id)."""

    src: str
    dst: str

    def __str__(self):
        return f"{self.src}>{self.dst}"

    @classmethod
    def parse(cls, text: str) -> "Link":
        src, sep, dst = text.partition(">")
        if not sep or not src or not dst:
            raise ParseError(f"malformed link {text!r}")
        return cls(src, dst)


def es_node(es: int) -> str:
    return f"ES{es}"


@dataclass(frozen=True)
class ApplicationModel:
    """Task DAG plus message records.

    ``actual_execution`` holds observed durations shorter than the WCET
    (slack).  An entry equal to the WCET is dropped so that a zero-slack
    update leaves the model equal to the original.
    """

    tasks: tuple[Task, ...] = ()
    messages: tuple[MessageRecord, ...] = ()
    actual_execution: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(
            self,
            "messages",
            tuple(sorted(self.messages, key=lambda m: (m.tx_task, m.rx_task))),
        )
        object.__setattr__(self, "actual_execution", dict(sorted(self.actual_execution.items())))
        self._validate()
        # an observed duration equal to the WCET carries no information
        wcet = {t.id: t.wcet for t in self.tasks}
        for tid in [t for t, d in self.actual_execution.items() if d == wcet[t]]:
            del self.actual_execution[tid]

    def _validate(self):
        by_id = {}
        for t in self.tasks:
            if t.id in by_id:
                raise ConsistencyError(f"duplicate task id {t.id}")
            by_id[t.id] = t
        for t in self.tasks:
            for p in t.parents:
                if p not in by_id:
                    raise ConsistencyError(f"task {t.id}: unknown parent {p}")
                if t.id not in by_id[p].children:
                    raise ConsistencyError(
                        f"task {p} does not list {t.id} as child but {t.id} lists {p} as parent"
                    )
            for c in t.children:
                if c not in by_id:
                    raise ConsistencyError(f"task {t.id}: unknown child {c}")
                if t.id not in by_id[c].parents:
                    raise ConsistencyError(
                        f"task {t.id} lists {c} as child but {c} does not list {t.id} as parent"
                    )
        seen = set()
        for m in self.messages:
            key = (m.tx_task, m.rx_task)
            if key in seen:
                raise ConsistencyError(f"duplicate message {m.tx_task}->{m.rx_task}")
            seen.add(key)
            if m.tx_task not in by_id or m.rx_task not in by_id:
                raise ConsistencyError(
                    f"message {m.tx_task}->{m.rx_task} references an unknown task"
                )
            if m.rx_task not in by_id[m.tx_task].children:
                raise ConsistencyError(
                    f"message {m.tx_task}->{m.rx_task} is not an edge of the task graph"
                )
            if m.size < 0:
                raise ConsistencyError(f"message {m.tx_task}->{m.rx_task}: negative size")
        for tid, dur in self.actual_execution.items():
            if tid not in by_id:
                raise ConsistencyError(f"actual execution for unknown task {tid}")
            if dur < 0 or dur > by_id[tid].wcet:
                raise ConsistencyError(
                    f"task {tid}: actual execution {dur} outside [0, {by_id[tid].wcet}]"
                )
        # acyclicity is checked last so that the other errors are reported first
        topological_order(self)

    @cached_property
    def by_id(self) -> dict[int, Task]:
        return {t.id: t for t in self.tasks}

    @cached_property
    def message_index(self) -> dict[tuple[int, int], MessageRecord]:
        return {(m.tx_task, m.rx_task): m for m in self.messages}

    @property
    def task_ids(self) -> list[int]:
        return [t.id for t in self.tasks]

    def task(self, task_id: int) -> Task:
        try:
            return self.by_id[task_id]
        except KeyError:
            raise UnknownTaskError(f"unknown task {task_id}") from None

    def message(self, tx: int, rx: int) -> MessageRecord:
        m = self.message_index.get((tx, rx))
        if m is None:
            raise ConsistencyError(f"no message record for edge {tx}->{rx}")
        return m

    def duration(self, task_id: int) -> int:
        """Effective duration: observed actual execution if any, else WCET."""
        if task_id in self.actual_execution:
            return self.actual_execution[task_id]
        return self.task(task_id).wcet

    def edges(self) -> list[tuple[int, int]]:
        return [(t.id, c) for t in self.tasks for c in t.children]


@dataclass(frozen=True)
class EndSystem:
    id: int
    active_power: float = DEFAULT_ACTIVE_POWER
    idle_power: float = DEFAULT_IDLE_POWER


@dataclass(frozen=True)
class PlatformModel:
    """End systems, routers and directed routes.

    ``failed`` maps a failed end system to the time it failed.
    """

    end_systems: Mapping[int, EndSystem] = field(default_factory=dict)
    routers: tuple[str, ...] = ()
    routes: Mapping[tuple[int, int], tuple[str, ...]] = field(default_factory=dict)
    link_bandwidth: float = DEFAULT_BANDWIDTH
    failed: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "end_systems", dict(sorted(self.end_systems.items())))
        object.__setattr__(self, "routers", tuple(self.routers))
        object.__setattr__(
            self, "routes", {k: tuple(v) for k, v in sorted(self.routes.items())}
        )
        object.__setattr__(self, "failed", dict(sorted(self.failed.items())))
        self._validate()

    def _validate(self):
        if self.link_bandwidth <= 0:
            raise ConsistencyError("link bandwidth must be positive")
        for es_id, es in self.end_systems.items():
            if es.id != es_id:
                raise ConsistencyError(f"end system key {es_id} != id {es.id}")
        if len(set(self.routers)) != len(self.routers):
            raise ConsistencyError("duplicate router id")
        known = set(self.routers)
        for (a, b), hops in self.routes.items():
            for es in (a, b):
                if es not in self.end_systems:
                    raise ConsistencyError(f"route {a}->{b} names undeclared end system {es}")
            if a == b and hops:
                raise ConsistencyError(f"intra-ES route {a}->{b} must be empty")
            if a != b and not hops:
                raise ConsistencyError(f"route {a}->{b} has no routers")
            for r in hops:
                if r not in known:
                    raise ConsistencyError(f"route {a}->{b} names undeclared router {r}")
        for es in self.failed:
            if es not in self.end_systems:
                raise ConsistencyError(f"failed end system {es} is not declared")

    @property
    def live_end_systems(self) -> list[int]:
        return [es for es in self.end_systems if es not in self.failed]

    def is_live(self, es: int) -> bool:
        return es in self.end_systems and es not in self.failed

    def available_routes(self) -> dict[tuple[int, int], tuple[str, ...]]:
        return {
            k: v for k, v in self.routes.items() if k[0] not in self.failed and k[1] not in self.failed
        }


# ---------------------------------------------------------------------------
# Graph / route queries


def topological_order(am: ApplicationModel) -> list[int]:
    """Kahn's algorithm; ready tasks are released in ascending id order."""
    indeg = {t.id: len(t.parents) for t in am.tasks}
    children = {t.id: t.children for t in am.tasks}
    heap = [tid for tid, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        tid = heapq.heappop(heap)
        order.append(tid)
        for c in children[tid]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    if len(order) != len(indeg):
        stuck = sorted(tid for tid, d in indeg.items() if d > 0)
        raise CycleError(f"task graph has a cycle through tasks {stuck}")
    return order


def route_links(sender: int, receiver: int, routers: Iterable[str]) -> list[Link]:
    nodes = [es_node(sender), *routers, es_node(receiver)]
    return [Link(a, b) for a, b in zip(nodes, nodes[1:])]


def route_lookup(pm: PlatformModel, sender: int, receiver: int) -> list[Link]:
    """Expand the route between two live end systems into directed links."""
    for es in (sender, receiver):
        if es not in pm.end_systems:
            raise UnknownEndSystemError(f"unknown end system {es}")
        if es in pm.failed:
            raise DeadEndpointError(f"end system {es} has failed")
    if sender == receiver:
        return []
    try:
        hops = pm.routes[(sender, receiver)]
    except KeyError:
        raise NoRouteError(f"no route from ES{sender} to ES{receiver}") from None
    return route_links(sender, receiver, hops)


# ---------------------------------------------------------------------------
# Text helpers


def read_text(source: Source) -> str:
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def split_sections(text: str, default: str | None = None) -> dict[str, list[list[str]]]:
    """Split ``NAME:`` delimited text into rows of stripped cells.

    Blank lines and ``#`` comments are skipped.  Rows before the first
    marker belong to ``default`` (a parse error if ``default`` is None).
    """
    sections: dict[str, list[list[str]]] = {}
    current = default
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.endswith(":") and "," not in stripped:
            current = stripped[:-1].strip().upper()
            if current in sections:
                raise ParseError(f"line {lineno}: duplicate section {current}")
            sections[current] = []
            continue
        if current is None:
            raise ParseError(f"line {lineno}: data outside of any section")
        row = next(csv.reader([stripped]))
        sections.setdefault(current, []).append([c.strip() for c in row])
    return sections


def _drop_header(rows: list[list[str]], first: str) -> list[list[str]]:
    if rows and rows[0] and rows[0][0].lower() == first:
        return rows[1:]
    return rows


def parse_int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{what}: expected an integer, got {text!r}") from None


def parse_number(text: str, what: str) -> float:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{what}: expected a number, got {text!r}") from None


def parse_es(text: str, what: str = "end system") -> int:
    text = text.strip()
    if text.upper().startswith("ES"):
        text = text[2:]
    return parse_int(text, what)


def fmt_number(x: float) -> str:
    return repr(x) if isinstance(x, float) else str(x)


def _id_list(text: str, what: str) -> tuple[int, ...]:
    if text in ("", "-"):
        return ()
    return tuple(parse_int(p.strip(), what) for p in text.split(";") if p.strip())


def _fmt_ids(ids: Iterable[int]) -> str:
    ids = list(ids)
    return ";".join(str(i) for i in ids) if ids else "-"


# ---------------------------------------------------------------------------
# Application model I/O


def parse_messages(rows: list[list[str]]) -> list[MessageRecord]:
    out = []
    for row in _drop_header(rows, "tx"):
        if len(row) != 3:
            raise ParseError(f"message row {row}: expected tx,rx,size")
        out.append(
            MessageRecord(
                parse_int(row[0], "tx"), parse_int(row[1], "rx"), parse_number(row[2], "size")
            )
        )
    return out


def load_application(source: Source, messages: Source | None = None) -> ApplicationModel:
    """Parse a tasks file (and an optional separate messages file).

    Edges without an explicit message record get one synthesized from the
    sender's ``message_size``; explicit records win.
    """
    sections = split_sections(read_text(source), default="TASKS")
    unknown = set(sections) - {"TASKS", "MESSAGES", "ACTUAL"}
    if unknown:
        raise ParseError(f"unknown section(s) in tasks file: {sorted(unknown)}")
    tasks = []
    for row in _drop_header(sections.get("TASKS", []), "task_id"):
        if len(row) != 5:
            raise ParseError(f"task row {row}: expected 5 columns")
        tid = parse_int(row[0], "task_id")
        tasks.append(
            Task(
                id=tid,
                parents=_id_list(row[1], f"task {tid} parents"),
                children=_id_list(row[2], f"task {tid} children"),
                wcet=parse_int(row[3], f"task {tid} wcet"),
                message_size=parse_number(row[4], f"task {tid} message_size"),
            )
        )
    explicit = parse_messages(sections.get("MESSAGES", []))
    if messages is not None:
        explicit += parse_messages(split_sections(read_text(messages), default="MESSAGES").get("MESSAGES", []))
    actual = {}
    for row in _drop_header(sections.get("ACTUAL", []), "task_id"):
        if len(row) != 2:
            raise ParseError(f"actual row {row}: expected task_id,duration")
        actual[parse_int(row[0], "task_id")] = parse_int(row[1], "duration")
    return build_application(tasks, explicit, actual)


def build_application(
    tasks: Iterable[Task],
    messages: Iterable[MessageRecord] = (),
    actual_execution: Mapping[int, int] | None = None,
) -> ApplicationModel:
    """Assemble a model, synthesizing message records for uncovered edges."""
    tasks = list(tasks)
    records: dict[tuple[int, int], MessageRecord] = {}
    for m in messages:
        key = (m.tx_task, m.rx_task)
        if key in records:
            raise ConsistencyError(f"duplicate message {m.tx_task}->{m.rx_task}")
        records[key] = m
    for t in tasks:
        for c in t.children:
            records.setdefault((t.id, c), MessageRecord(t.id, c, t.message_size))
    return ApplicationModel(tuple(tasks), tuple(records.values()), dict(actual_execution or {}))


def serialize_application(am: ApplicationModel) -> str:
    out = ["task_id,parents,children,wcet,message_size"]
    for t in am.tasks:
        out.append(
            f"{t.id},{_fmt_ids(t.parents)},{_fmt_ids(t.children)},{t.wcet},{fmt_number(t.message_size)}"
        )
    out += ["MESSAGES:", "tx,rx,size"]
    out += [f"{m.tx_task},{m.rx_task},{fmt_number(m.size)}" for m in am.messages]
    if am.actual_execution:
        out += ["ACTUAL:", "task_id,duration"]
        out += [f"{t},{d}" for t, d in sorted(am.actual_execution.items())]
    return "\n".join(out) + "\n"


def application_to_dict(am: ApplicationModel) -> dict:
    return {
        "tasks": [
            {
                "id": t.id,
                "parents": list(t.parents),
                "children": list(t.children),
                "wcet": t.wcet,
                "message_size": t.message_size,
            }
            for t in am.tasks
        ],
        "messages": [{"tx": m.tx_task, "rx": m.rx_task, "size": m.size} for m in am.messages],
        "actual_execution": {str(k): v for k, v in sorted(am.actual_execution.items())},
    }


def application_from_dict(data: dict) -> ApplicationModel:
    try:
        tasks = [
            Task(d["id"], tuple(d["parents"]), tuple(d["children"]), d["wcet"], d["message_size"])
            for d in data["tasks"]
        ]
        msgs = [MessageRecord(d["tx"], d["rx"], d["size"]) for d in data.get("messages", [])]
        actual = {int(k): v for k, v in data.get("actual_execution", {}).items()}
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed application JSON: {exc}") from None
    return build_application(tasks, msgs, actual)


# ---------------------------------------------------------------------------
# Platform model I/O


def load_platform(source: Source) -> PlatformModel:
    sections = split_sections(read_text(source))
    unknown = set(sections) - {"ES", "ROUTERS", "ROUTES", "BANDWIDTH", "FAILED"}
    if unknown:
        raise ParseError(f"unknown section(s) in platform file: {sorted(unknown)}")
    if "ES" not in sections:
        raise ParseError("platform file has no ES: section")
    end_systems = {}
    for row in _drop_header(sections["ES"], "id"):
        if not 1 <= len(row) <= 3:
            raise ParseError(f"ES row {row}: expected id[,active_power[,idle_power]]")
        es = parse_es(row[0])
        if es in end_systems:
            raise ConsistencyError(f"duplicate end system {es}")
        active = parse_number(row[1], "active_power") if len(row) > 1 and row[1] else DEFAULT_ACTIVE_POWER
        idle = parse_number(row[2], "idle_power") if len(row) > 2 and row[2] else DEFAULT_IDLE_POWER
        end_systems[es] = EndSystem(es, float(active), float(idle))

    routes: dict[tuple[int, int], tuple[str, ...]] = {}
    for row in _drop_header(sections.get("ROUTES", []), "sender"):
        if len(row) != 3:
            raise ParseError(f"route row {row}: expected sender,receiver,routers")
        key = (parse_es(row[0], "sender"), parse_es(row[1], "receiver"))
        if key in routes:
            raise ConsistencyError(f"duplicate route {key[0]}->{key[1]}")
        hops = () if row[2] in ("", "-") else tuple(h.strip() for h in row[2].split(";"))
        routes[key] = hops

    if "ROUTERS" in sections:
        routers = tuple(row[0] for row in _drop_header(sections["ROUTERS"], "id"))
    else:
        routers = tuple(dict.fromkeys(h for hops in routes.values() for h in hops))

    bandwidth = DEFAULT_BANDWIDTH
    if "BANDWIDTH" in sections:
        rows = _drop_header(sections["BANDWIDTH"], "bandwidth")
        if len(rows) != 1 or len(rows[0]) != 1:
            raise ParseError("BANDWIDTH: expects a single value")
        bandwidth = parse_number(rows[0][0], "bandwidth")

    failed = {}
    for row in _drop_header(sections.get("FAILED", []), "es"):
        if len(row) != 2:
            raise ParseError(f"failed row {row}: expected es,time")
        failed[parse_es(row[0])] = parse_int(row[1], "failure time")

    return PlatformModel(end_systems, routers, routes, bandwidth, failed)


def serialize_platform(pm: PlatformModel) -> str:
    out = ["ES:", "id,active_power,idle_power"]
    out += [
        f"{es.id},{fmt_number(es.active_power)},{fmt_number(es.idle_power)}"
        for es in pm.end_systems.values()
    ]
    out += ["ROUTERS:", "id", *pm.routers]
    out += ["ROUTES:", "sender,receiver,routers"]
    out += [f"{a},{b},{';'.join(h) if h else '-'}" for (a, b), h in pm.routes.items()]
    out += ["BANDWIDTH:", fmt_number(pm.link_bandwidth)]
    if pm.failed:
        out += ["FAILED:", "es,time"]
        out += [f"{es},{t}" for es, t in pm.failed.items()]
    return "\n".join(out) + "\n"


def platform_to_dict(pm: PlatformModel) -> dict:
    return {
        "end_systems": [
            {"id": es.id, "active_power": es.active_power, "idle_power": es.idle_power}
            for es in pm.end_systems.values()
        ],
        "routers": list(pm.routers),
        "routes": [{"sender": a, "receiver": b, "routers": list(h)} for (a, b), h in pm.routes.items()],
        "link_bandwidth": pm.link_bandwidth,
        "failed": [{"es": es, "time": t} for es, t in pm.failed.items()],
    }


def platform_from_dict(data: dict) -> PlatformModel:
    try:
        ends = {
            d["id"]: EndSystem(
                d["id"],
                d.get("active_power", DEFAULT_ACTIVE_POWER),
                d.get("idle_power", DEFAULT_IDLE_POWER),
            )
            for d in data["end_systems"]
        }
        routes = {(d["sender"], d["receiver"]): tuple(d["routers"]) for d in data.get("routes", [])}
        failed = {d["es"]: d["time"] for d in data.get("failed", [])}
        return PlatformModel(
            ends,
            tuple(data.get("routers", ())),
            routes,
            data.get("link_bandwidth", DEFAULT_BANDWIDTH),
            failed,
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed platform JSON: {exc}") from None


def to_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def with_actual(am: ApplicationModel, task_id: int, duration: int) -> ApplicationModel:
    actual = dict(am.actual_execution)
    if duration == am.task(task_id).wcet:
        actual.pop(task_id, None)
    else:
        actual[task_id] = duration
    return replace(am, actual_execution=actual)


__all__ = [
    "ApplicationModel",
    "EndSystem",
    "Link",
    "MessageRecord",
    "PlatformModel",
    "Task",
    "application_from_dict",
    "application_to_dict",
    "build_application",
    "es_node",
    "load_application",
    "load_platform",
    "platform_from_dict",
    "platform_to_dict",
    "route_links",
    "route_lookup",
    "serialize_application",
    "serialize_platform",
    "to_json",
    "topological_order",
]
