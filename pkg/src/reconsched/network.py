"""Per-link collision lists and store-and-forward message allocation."""

from __future__ import annotations

import bisect
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .models import Link, MessageRecord
from .schedule import MessageEntry, Reservation


def _exact(x: float) -> Fraction:
    return Fraction(x) if isinstance(x, int) else Fraction(repr(float(x)))


def transmission_duration(size: float, bandwidth: float) -> int:
    """Whole time units one link needs to forward ``size`` KB."""
    if size == 0:
        return 0
    return max(1, math.ceil(_exact(size) / _exact(bandwidth)))


class CollisionLists:
    """Sorted, pairwise disjoint half-open ``[start, end)`` intervals per link.

    Zero-length reservations conflict with nothing and are not stored.
    """

    def __init__(self, reservations: Iterable[tuple[Link, int, int]] = ()):
        self._lists: dict[Link, list[tuple[int, int]]] = {}
        for link, start, end in reservations:
            self.reserve(link, start, end)

    def copy(self) -> "CollisionLists":
        out = CollisionLists()
        out._lists = {k: list(v) for k, v in self._lists.items()}
        return out

    def intervals(self, link: Link) -> list[tuple[int, int]]:
        return list(self._lists.get(link, ()))

    def as_dict(self) -> dict[Link, tuple[tuple[int, int], ...]]:
        return {k: tuple(v) for k, v in sorted(self._lists.items()) if v}

    def earliest(self, link: Link, ready: int, duration: int) -> int:
        """First start >= ready at which ``duration`` fits on ``link``."""
        start = ready
        if duration == 0:
            return start
        for a, b in self._lists.get(link, ()):
            if b <= start:
                continue
            if a >= start + duration:
                break
            start = b
        return start

    def reserve(self, link: Link, start: int, end: int) -> None:
        if end <= start:
            return
        lst = self._lists.setdefault(link, [])
        i = bisect.bisect_left(lst, (start, end))
        if (i > 0 and lst[i - 1][1] > start) or (i < len(lst) and lst[i][0] < end):
            raise ValueError(f"reservation [{start},{end}) collides on {link}")
        lst.insert(i, (start, end))

    def allocate(
        self, msg: MessageRecord, route: Sequence[Link], ready: int, bandwidth: float
    ) -> MessageEntry:
        """Reserve every hop of ``route`` at its earliest free slot, in order."""
        duration = transmission_duration(msg.size, bandwidth)
        t = ready
        res = []
        for link in route:
            start = self.earliest(link, t, duration)
            self.reserve(link, start, start + duration)
            res.append(Reservation(link, start, start + duration))
            t = start + duration
        return MessageEntry(msg.tx_task, msg.rx_task, tuple(res), t)


def allocate_message(
    state: CollisionLists,
    msg: MessageRecord,
    route: Sequence[Link],
    ready: int,
    bandwidth: float = 1,
) -> tuple[MessageEntry, CollisionLists]:
    """Functional wrapper: returns the entry and an updated copy of ``state``."""
    new = state.copy()
    return new.allocate(msg, route, ready, bandwidth), new
