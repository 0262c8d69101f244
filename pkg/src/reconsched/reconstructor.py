"""List-scheduling reconstructors.

* :func:`reconstruct_full` builds a schedule from scratch.
* :func:`reconstruct_temporal` keeps the past of a prior schedule and
  re-places the rest after a context event (used for slack).
* :func:`recover_failure` restores the recovery log instead of the prior
  schedule and fires an intermediate schedule on the surviving end systems.

All three share one placement loop: pick the highest-priority ready task,
choose its end system, route its inbound messages through the collision
lists, start it as soon as the ES is free and every message has arrived.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Mapping

from .errors import (
    DeadEndpointError,
    DeadlockError,
    EmptyPlatformError,
    SafetyViolationError,
    UnknownEndSystemError,
)
from .models import ApplicationModel, PlatformModel, route_lookup
from .network import CollisionLists
from .priorities import (
    LEAST_LOADED,
    SpatialPriorities,
    TemporalPriorities,
    builtin_temporal,
    check_temporal,
    least_loaded,
)
from .recovery import RecoveryLog, Snapshot, build_log, snapshot_restore, state_at
from .safety import safety_check
from .schedule import MessageEntry, Reservation, Schedule, TaskEntry

EVENT_KINDS = ("failure", "slack", "mode_change")


def _place(
    am: ApplicationModel,
    pm: PlatformModel,
    tp: TemporalPriorities,
    sp: SpatialPriorities,
    kept: Mapping[int, TaskEntry],
    kept_msgs: list[MessageEntry],
    floor: int,
) -> Schedule:
    live = pm.live_end_systems
    if not live:
        raise EmptyPlatformError("no live end system to schedule on")
    available = {es: floor for es in live}
    for e in kept.values():
        if e.es in available:
            available[e.es] = max(available[e.es], e.end)
    links = CollisionLists((r.link, r.start, r.end) for m in kept_msgs for r in m.reservations)
    placed = dict(kept)
    messages = list(kept_msgs)
    pending = [t for t in tp.order if t not in placed]

    while pending:
        for i, tid in enumerate(pending):
            if all(p in placed for p in am.by_id[tid].parents):
                break
        else:
            raise DeadlockError(f"no ready task among {pending[:5]}...")
        del pending[i]

        target = sp.target(tid)
        if target == LEAST_LOADED:
            es = least_loaded(available)
        elif target not in pm.end_systems:
            raise UnknownEndSystemError(f"task {tid} assigned to unknown ES{target}")
        elif target in pm.failed:
            raise DeadEndpointError(f"task {tid} assigned to failed ES{target}")
        else:
            es = target

        arrival = floor
        for p in am.by_id[tid].parents:
            sender = placed[p]
            ready = max(sender.end, floor)
            if sender.es == es:
                m = MessageEntry(p, tid, (), ready)
            elif sender.es in pm.failed:
                # output of a task finished before its ES failed, restored from the snapshot
                m = MessageEntry(p, tid, (), max(ready, pm.failed[sender.es]))
            else:
                route = route_lookup(pm, sender.es, es)
                m = links.allocate(am.message(p, tid), route, ready, pm.link_bandwidth)
            messages.append(m)
            arrival = max(arrival, m.arrival)

        start = max(available[es], arrival)
        placed[tid] = TaskEntry(tid, es, start, start + am.duration(tid))
        available[es] = start + am.duration(tid)

    return Schedule(tuple(placed.values()), tuple(messages))


def _assert_safe(s: Schedule, am: ApplicationModel, pm: PlatformModel) -> None:
    violations = safety_check(s, am, pm)
    if violations:
        listed = "; ".join(str(v) for v in violations[:5])
        raise SafetyViolationError(f"reconstructed schedule failed the safety check: {listed}")


def reconstruct_full(
    am: ApplicationModel,
    pm: PlatformModel,
    tp: TemporalPriorities | None = None,
    sp: SpatialPriorities | None = None,
) -> tuple[Schedule, RecoveryLog]:
    """Build a complete schedule and its recovery log."""
    tp = tp or builtin_temporal(am)
    check_temporal(tp, am)
    sched = _place(am, pm, tp, sp or SpatialPriorities.least_loaded(), {}, [], 0)
    _assert_safe(sched, am, pm)
    return sched, build_log(sched, pm)


def _retain(
    snap: Snapshot, am: ApplicationModel, pm: PlatformModel, t: int
) -> tuple[dict[int, TaskEntry], list[MessageEntry]]:
    """Entries that must survive an event at ``t``, all marked locked.

    Finished entries are copied unchanged.  Entries still running keep their
    start but take the duration of ``am``; those on a failed ES are dropped
    so they re-run in full elsewhere.
    """
    kept = {}
    for e in snap.task_entries:
        if e.start >= t:
            continue
        failed_at = pm.failed.get(e.es)
        if failed_at is not None and min(e.end, e.start + am.duration(e.task)) > failed_at:
            continue
        if e.end <= t:
            kept[e.task] = replace(e, locked=True)
        else:
            kept[e.task] = TaskEntry(e.task, e.es, e.start, e.start + am.duration(e.task), True)
    # a kept task needs all its producers kept as well
    changed = True
    while changed:
        changed = False
        for tid in list(kept):
            if any(p not in kept for p in am.by_id[tid].parents):
                del kept[tid]
                changed = True
    msgs = [m for m in snap.message_entries if m.rx in kept and m.tx in kept]
    return kept, msgs


def _compact(
    am: ApplicationModel,
    pm: PlatformModel,
    prior: Schedule,
    kept: Mapping[int, TaskEntry],
    kept_msgs: list[MessageEntry],
    t: int,
) -> Schedule | None:
    """Shift the unlocked part of ``prior`` left, keeping every ES and link order.

    Returns None when the prior cannot be reused (failed end systems, missing
    messages, or an ordering cycle from zero-length items).
    """
    if pm.failed:
        return None
    entries = prior.entries_by_task()
    if set(entries) != set(am.task_ids):
        return None
    msgs = prior.messages_by_edge()
    for p, c in am.edges():
        if (p, c) not in msgs and entries[p].es != entries[c].es:
            return None

    pinned = {(m.tx, m.rx) for m in kept_msgs}
    for key, m in msgs.items():
        if m.reservations and m.reservations[0].start < t:
            pinned.add(key)

    topo_rank = {tid: i for i, tid in enumerate(am.task_ids)}
    deps: dict[tuple, list[tuple]] = {}

    def tnode(x):
        return ("T", x)

    def hnode(key, k):
        return ("H", key[0], key[1], k)

    es_prev: dict[int, int | None] = {}
    by_es: dict[int, list] = {}
    for e in prior.task_entries:
        by_es.setdefault(e.es, []).append(e)
    for lst in by_es.values():
        lst.sort(key=lambda e: (e.start, e.end, topo_rank[e.task]))
        for a, b in zip([None, *lst], lst):
            es_prev[b.task] = a.task if a else None

    link_prev: dict[tuple, tuple | None] = {}
    by_link: dict = {}
    for key, m in msgs.items():
        for k, r in enumerate(m.reservations):
            by_link.setdefault(r.link, []).append((r.start, r.end, topo_rank[key[0]], topo_rank[key[1]], key, k))
    for lst in by_link.values():
        lst.sort()
        for a, b in zip([None, *lst], lst):
            link_prev[(b[4], b[5])] = (a[4], a[5]) if a else None

    for tid in am.task_ids:
        if tid in kept:
            continue
        d = []
        if es_prev[tid] is not None and es_prev[tid] not in kept:
            d.append(tnode(es_prev[tid]))
        for p in am.by_id[tid].parents:
            m = msgs.get((p, tid))
            if (p, tid) in pinned:
                continue
            if m is None or not m.reservations:
                if p not in kept:
                    d.append(tnode(p))
            else:
                d.append(hnode((p, tid), len(m.reservations) - 1))
        deps[tnode(tid)] = d
    for key, m in msgs.items():
        if key in pinned:
            continue
        for k in range(len(m.reservations)):
            d = []
            if k == 0:
                if key[0] not in kept:
                    d.append(tnode(key[0]))
            else:
                d.append(hnode(key, k - 1))
            prev = link_prev[(key, k)]
            if prev is not None and prev[0] not in pinned:
                d.append(hnode(*prev))
            deps[hnode(key, k)] = d

    # Kahn over the unlocked nodes
    users: dict[tuple, list[tuple]] = {n: [] for n in deps}
    indeg = {n: len(d) for n, d in deps.items()}
    for n, d in deps.items():
        for x in d:
            users[x].append(n)
    queue = sorted(n for n, k in indeg.items() if k == 0)
    order = []
    while queue:
        n = queue.pop()
        order.append(n)
        for u in users[n]:
            indeg[u] -= 1
            if indeg[u] == 0:
                queue.append(u)
    if len(order) != len(deps):
        return None

    task_end = {tid: e.end for tid, e in kept.items()}
    hop: dict[tuple, tuple[int, int]] = {}
    for key in pinned:
        for k, r in enumerate(msgs[key].reservations):
            hop[hnode(key, k)] = (r.start, r.end)
    new_start = {}

    def arrival(p, c):
        m = msgs.get((p, c))
        if (p, c) in pinned:
            return m.arrival
        if m is None or not m.reservations:
            return max(task_end[p], t)
        return hop[hnode((p, c), len(m.reservations) - 1)][1]

    for n in order:
        if n[0] == "T":
            tid = n[1]
            prev = es_prev[tid]
            start = max([t, task_end[prev] if prev is not None else t]
                        + [arrival(p, tid) for p in am.by_id[tid].parents])
            new_start[tid] = start
            task_end[tid] = start + am.duration(tid)
        else:
            key, k = (n[1], n[2]), n[3]
            r = msgs[key].reservations[k]
            ready = max(t, task_end[key[0]] if k == 0 else hop[hnode(key, k - 1)][1])
            prev = link_prev[(key, k)]
            if prev is not None:
                ready = max(ready, hop[hnode(*prev)][1])
            hop[n] = (ready, ready + (r.end - r.start))

    out_entries = list(kept.values())
    for tid, start in new_start.items():
        out_entries.append(TaskEntry(tid, entries[tid].es, start, task_end[tid]))
    out_msgs = []
    for key, m in msgs.items():
        if key in pinned:
            out_msgs.append(m)
        elif not m.reservations:
            out_msgs.append(MessageEntry(key[0], key[1], (), arrival(*key)))
        else:
            res = tuple(
                Reservation(r.link, *hop[hnode(key, k)]) for k, r in enumerate(m.reservations)
            )
            out_msgs.append(MessageEntry(key[0], key[1], res, res[-1].end))
    # intra-ES edges the prior left implicit
    for p, c in am.edges():
        if (p, c) not in msgs:
            out_msgs.append(MessageEntry(p, c, (), max(task_end[p], t)))
    return Schedule(tuple(out_entries), tuple(out_msgs))


def reconstruct_temporal(
    am: ApplicationModel,
    pm: PlatformModel,
    prior: Schedule,
    tp: TemporalPriorities | None,
    event_time: int,
) -> tuple[Schedule, int]:
    """Re-place everything not yet started at ``event_time``.

    Two candidates are built: a least-loaded re-list from the event time, and
    the prior with its unlocked part shifted left (same ES and link orders).
    The shorter one wins; ties go to the re-list.
    """
    if event_time < 0:
        raise ValueError("event time must be non-negative")
    tp = tp or builtin_temporal(am)
    check_temporal(tp, am)
    snap = state_at(prior, pm, event_time)
    kept, kept_msgs = _retain(snap, am, pm, event_time)
    relist = _place(am, pm, tp, SpatialPriorities.least_loaded(), kept, kept_msgs, event_time)
    best = relist
    shifted = _compact(am, pm, prior, kept, kept_msgs, event_time)
    if shifted is not None and shifted.makespan < relist.makespan and not safety_check(shifted, am, pm):
        best = shifted
    _assert_safe(best, am, pm)
    return best, best.makespan


def recover_failure(
    am: ApplicationModel,
    pm: PlatformModel,
    log: RecoveryLog,
    event_time: int,
    event_kind: str = "failure",
    tp: TemporalPriorities | None = None,
) -> tuple[Schedule, int]:
    """Fire an intermediate schedule from the logged state at ``event_time``."""
    if event_kind not in EVENT_KINDS:
        raise ValueError(f"unknown event kind {event_kind!r}")
    snap = snapshot_restore(log, event_time)
    kept, kept_msgs = _retain(snap, am, pm, event_time)
    tp = tp or builtin_temporal(am)
    check_temporal(tp, am)
    sched = _place(am, pm, tp, SpatialPriorities.least_loaded(), kept, kept_msgs, event_time)
    _assert_safe(sched, am, pm)
    return sched, sched.makespan
