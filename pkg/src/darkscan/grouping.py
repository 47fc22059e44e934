"""Density-based grouping of text and button elements."""

from __future__ import annotations

import dataclasses
import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .model import GROUPABLE_TYPES, Screen, UIElement


@dataclass(frozen=True)
class GroupingParams:
    alpha: float = 0.18  # neighborhood radius
    beta: int = 2  # min points in a neighborhood, the point itself included
    w_type: float = 0.4
    w_size: float = 0.25
    w_position: float = 0.25
    w_text: float = 0.10

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta < 2:
            raise ValueError("beta must be at least 2")
        weights = (self.w_type, self.w_size, self.w_position, self.w_text)
        if min(weights) < 0 or not math.isclose(sum(weights), 1.0, abs_tol=1e-9):
            raise ValueError("weights must be non-negative and sum to 1")


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def text_distance(a: str | None, b: str | None) -> float:
    a = (a or "").strip().lower()
    b = (b or "").strip().lower()
    if not a and not b:
        return 0.0
    if not a or not b:
        return 0.5
    return levenshtein(a, b) / max(len(a), len(b))


def pairwise_distance(a: UIElement, b: UIElement, params: GroupingParams,
                      screen_size: tuple[int, int]) -> float:
    width, height = screen_size
    d_type = 0.0 if a.etype == b.etype else 1.0
    d_size = (abs(a.bbox.width - b.bbox.width) + abs(a.bbox.height - b.bbox.height)) / (width + height)
    d_pos = math.dist(a.bbox.center, b.bbox.center) / math.hypot(width, height)
    d_text = text_distance(a.text, b.text)
    return (params.w_type * d_type + params.w_size * d_size
            + params.w_position * d_pos + params.w_text * d_text)


def dbscan(elements: Sequence[UIElement], params: GroupingParams,
           screen_size: tuple[int, int]) -> tuple[list[set[int]], set[int]]:
    """Cluster elements, returning (groups, outliers) as sets of element ids.

    Points are visited in (y1, x1) order, so a border point reachable from two
    clusters lands in whichever cluster was seeded first.
    """
    pts = sorted(elements, key=lambda e: (e.bbox.y1, e.bbox.x1, e.id))
    n = len(pts)
    neighbors = [[j for j in range(n) if pairwise_distance(pts[i], pts[j], params, screen_size) <= params.alpha]
                 for i in range(n)]
    labels = [None] * n
    groups: list[set[int]] = []
    for i in range(n):
        if labels[i] is not None or len(neighbors[i]) < params.beta:
            continue
        cid = len(groups)
        members = {i}
        labels[i] = cid
        queue = deque(neighbors[i])
        while queue:
            j = queue.popleft()
            if labels[j] is not None:
                continue
            labels[j] = cid
            members.add(j)
            if len(neighbors[j]) >= params.beta:
                queue.extend(neighbors[j])
        groups.append({pts[k].id for k in members})
    outliers = {pts[k].id for k in range(n) if labels[k] is None}
    return groups, outliers


def assign_groups(screen: Screen, params: GroupingParams) -> Screen:
    candidates = [e for e in screen.elements if e.etype in GROUPABLE_TYPES]
    groups, _ = dbscan(candidates, params, (screen.width, screen.height))
    owner = {eid: gid for gid, members in enumerate(groups) for eid in members}
    elements = [e.copy(group_id=owner.get(e.id)) for e in screen.elements]
    return dataclasses.replace(screen, elements=elements, groups=[sorted(g) for g in groups])
