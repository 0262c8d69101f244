"""Schedule validation: precedence, ES overlap, link collisions, failures."""

from __future__ import annotations

from dataclasses import dataclass

from .models import ApplicationModel, PlatformModel, es_node, route_links
from .network import transmission_duration
from .schedule import Schedule

PRECEDENCE = "precedence"
OVERLAP = "overlap"
COLLISION = "collision"
FAILED_ES = "failed_es"
DURATION = "duration"
MESSAGE = "message"
STRUCTURE = "structure"


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def _overlaps(items, label, kind, out):
    """Sweep half-open intervals; zero-length ones never conflict."""
    items = sorted(i for i in items if i[1] > i[0])
    prev = None
    for item in items:
        if prev is not None and item[0] < prev[1]:
            out.append(Violation(kind, f"{label}: {prev[2]} [{prev[0]},{prev[1]}) overlaps {item[2]} [{item[0]},{item[1]})"))
        if prev is None or item[1] > prev[1]:
            prev = item


def safety_check(s: Schedule, am: ApplicationModel, pm: PlatformModel) -> list[Violation]:
    out: list[Violation] = []
    entries = {}
    for e in s.task_entries:
        if e.task in entries:
            out.append(Violation(STRUCTURE, f"task {e.task} scheduled more than once"))
        entries[e.task] = e
        if e.task not in am.by_id:
            out.append(Violation(STRUCTURE, f"unknown task {e.task} in schedule"))
        if e.es not in pm.end_systems:
            out.append(Violation(STRUCTURE, f"task {e.task} on undeclared ES{e.es}"))
        if e.start < 0 or e.end < e.start:
            out.append(Violation(STRUCTURE, f"task {e.task} has invalid interval [{e.start},{e.end})"))
        elif not e.locked and e.task in am.by_id and e.end - e.start != am.duration(e.task):
            out.append(
                Violation(
                    DURATION,
                    f"task {e.task} lasts {e.end - e.start}, expected {am.duration(e.task)}",
                )
            )
    for tid in am.task_ids:
        if tid not in entries:
            out.append(Violation(STRUCTURE, f"task {tid} is not scheduled"))

    by_es: dict[int, list] = {}
    for e in s.task_entries:
        by_es.setdefault(e.es, []).append((e.start, e.end, f"task {e.task}"))
    for es, items in sorted(by_es.items()):
        _overlaps(items, f"ES{es}", OVERLAP, out)

    msgs = s.messages_by_edge()
    edges = set(am.edges())
    for key in msgs:
        if key not in edges:
            out.append(Violation(MESSAGE, f"message {key[0]}->{key[1]} is not a task-graph edge"))
    for p, c in sorted(edges):
        pe, ce = entries.get(p), entries.get(c)
        if pe is None or ce is None:
            continue
        m = msgs.get((p, c))
        arrival = pe.end
        if m is None:
            if pe.es != ce.es:
                out.append(Violation(MESSAGE, f"no message for cross-ES edge {p}->{c}"))
        else:
            arrival = m.arrival
            out.extend(_check_message(m, pe, ce, am, pm))
        if ce.start < arrival:
            out.append(
                Violation(PRECEDENCE, f"task {c} starts at {ce.start} before data from {p} arrives at {arrival}")
            )

    by_link: dict = {}
    for m in s.message_entries:
        for r in m.reservations:
            by_link.setdefault(r.link, []).append((r.start, r.end, f"msg {m.tx}->{m.rx}"))
    for link, items in sorted(by_link.items()):
        _overlaps(items, f"link {link}", COLLISION, out)

    for es, ft in pm.failed.items():
        for e in s.task_entries:
            if e.es == es and e.end > ft:
                out.append(
                    Violation(FAILED_ES, f"task {e.task} runs on ES{es} until {e.end}, after its failure at {ft}")
                )
        node = es_node(es)
        for m in s.message_entries:
            for r in m.reservations:
                if node in r.link and r.end > ft:
                    out.append(
                        Violation(FAILED_ES, f"msg {m.tx}->{m.rx} uses {r.link} until {r.end}, after ES{es} failed at {ft}")
                    )
    return out


def _check_message(m, pe, ce, am, pm) -> list[Violation]:
    out = []
    label = f"msg {m.tx}->{m.rx}"
    if m.arrival < pe.end:
        out.append(Violation(MESSAGE, f"{label} arrives at {m.arrival} before its sender ends at {pe.end}"))
    if not m.reservations:
        fail = pm.failed.get(pe.es)
        recovered = fail is not None and pe.end <= fail and m.arrival >= fail
        if pe.es != ce.es and not recovered:
            out.append(Violation(MESSAGE, f"{label} crosses ES{pe.es}->ES{ce.es} without link reservations"))
        return out
    hops = pm.routes.get((pe.es, ce.es))
    if pe.es == ce.es or hops is None:
        out.append(Violation(MESSAGE, f"{label} has reservations but no route ES{pe.es}->ES{ce.es}"))
        return out
    expected = route_links(pe.es, ce.es, hops)
    if [r.link for r in m.reservations] != expected:
        out.append(Violation(MESSAGE, f"{label} does not follow route ES{pe.es}->ES{ce.es}"))
    size = am.message_index[(m.tx, m.rx)].size if (m.tx, m.rx) in am.message_index else None
    d = transmission_duration(size, pm.link_bandwidth) if size is not None else None
    t = pe.end
    for r in m.reservations:
        if r.start < t:
            out.append(Violation(MESSAGE, f"{label} enters {r.link} at {r.start} before {t}"))
        if d is not None and r.end - r.start != d:
            out.append(Violation(MESSAGE, f"{label} holds {r.link} for {r.end - r.start}, expected {d}"))
        t = r.end
    if m.arrival != m.reservations[-1].end:
        out.append(Violation(MESSAGE, f"{label} arrival {m.arrival} != last hop end {t}"))
    return out
