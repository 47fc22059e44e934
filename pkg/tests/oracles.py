"""Independent reference implementations used to check the production code."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from darkscan.geometry import contains, iou
from darkscan.model import TEXTUAL_TYPES


def naive_dbscan(elements, dist, eps, min_pts):
    """Textbook DBSCAN from the full distance matrix.

    Core points are joined by union-find; a border point goes to the cluster
    whose first core point (in (y1, x1) order) comes earliest.
    """
    pts = sorted(elements, key=lambda e: (e.bbox.y1, e.bbox.x1, e.id))
    n = len(pts)
    near = [[dist(pts[i], pts[j]) <= eps for j in range(n)] for i in range(n)]
    core = [sum(row) >= min_pts for row in near]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(n):
            if core[i] and core[j] and near[i][j]:
                a, b = find(i), find(j)
                parent[max(a, b)] = min(a, b)
    label = [find(i) if core[i] else None for i in range(n)]
    for i in range(n):
        if not core[i]:
            roots = [label[j] for j in range(n) if core[j] and near[i][j]]
            label[i] = min(roots) if roots else None
    clusters = {}
    for i in range(n):
        if label[i] is not None:
            clusters.setdefault(label[i], set()).add(pts[i].id)
    return clusters.values(), {pts[i].id for i in range(n) if label[i] is None}


def partition(groups):
    return sorted(sorted(g) for g in groups)


def brute_force_fusion(elements, lines, threshold=0.5):
    """For each line, the index of the element that should own it, or None.

    A line belongs to the first matching element in ascending (area, y1, x1)
    order; that is what consuming lines element-by-element amounts to.
    """
    order = sorted(range(len(elements)),
                   key=lambda i: (elements[i].bbox.area, elements[i].bbox.y1, elements[i].bbox.x1, i))
    owners = []
    for ln in lines:
        owner = None
        for i in order:
            el = elements[i]
            if iou(el.bbox, ln.bbox) >= threshold or (el.etype in TEXTUAL_TYPES and contains(el.bbox, ln.bbox)):
                owner = i
                break
        owners.append(owner)
    return owners


def optimal_tp(findings, gts, threshold=0.5):
    """Maximum one-to-one same-type matches with IoU >= threshold."""
    tp = 0
    for t in {f.dp_type for f in findings} & {g.dp_type for g in gts}:
        fs = [f for f in findings if f.dp_type == t]
        gs = [g for g in gts if g.dp_type == t]
        ok = np.array([[iou(f.container, g.container) >= threshold for g in gs] for f in fs], dtype=float)
        r, c = linear_sum_assignment(-ok)
        tp += int(ok[r, c].sum())
    return tp
