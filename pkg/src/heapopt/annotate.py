"""Recurrence-time and next-access-time annotation of access sequences.

Times are 1-based: access t is seq[t-1].  r[t] is the number of steps until
the same key is requested again (math.inf when it never is, within scope),
and next[t] = t + r[t] is the absolute time of that future access.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tree import InvalidInput

INF = math.inf


@dataclass
class AccessSequence:
    items: list[int]
    n: int

    def __post_init__(self):
        for key in self.items:
            if not 1 <= key <= self.n:
                raise InvalidInput(f"key {key} outside 1..{self.n}")

    @property
    def m(self) -> int:
        return len(self.items)


@dataclass
class AccessAnnotation:
    """Per-timestep recurrence and next-access times (1-based positions)."""

    r: list[float]
    next: list[float]
    segment_relative: bool

    def __len__(self) -> int:
        return len(self.r)


def annotate(seq: AccessSequence | list[int], scope: int | None = None,
             n: int | None = None) -> AccessAnnotation:
    """Annotate a sequence; scope=None means whole-sequence recurrences.

    With an integer scope, occurrences in later length-`scope` segments do
    not count: r is infinite at each last-in-segment occurrence.
    """
    if isinstance(seq, AccessSequence):
        items = seq.items
    else:
        if n is None:
            n = max(seq, default=1)
        items = AccessSequence(list(seq), n).items
    m = len(items)
    r: list[float] = [INF] * m
    last_seen: dict[int, int] = {}
    boundary = m
    for idx in range(m - 1, -1, -1):
        if scope is not None:
            seg_end = ((idx // scope) + 1) * scope
            if seg_end != boundary:
                last_seen = {}
                boundary = seg_end
        key = items[idx]
        if key in last_seen:
            r[idx] = last_seen[key] - idx
        last_seen[key] = idx
    nxt = [(idx + 1) + r[idx] if r[idx] is not INF else INF
           for idx in range(m)]
    return AccessAnnotation(r=r, next=nxt, segment_relative=scope is not None)


def first_access_order(items: list[int]) -> list[int]:
    """Distinct keys in order of their first occurrence."""
    seen: set[int] = set()
    order: list[int] = []
    for key in items:
        if key not in seen:
            seen.add(key)
            order.append(key)
    return order
