"""Axis-aligned pixel boxes and the overlap measures used throughout the engine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

# fraction of the inner box that must be covered for ``contains`` to hold
CONTAIN_RATIO = 0.95


@dataclass(frozen=True, order=True)
class BBox:
    """Pixel box ``(x1, y1, x2, y2)``; origin top-left, right/bottom exclusive."""

    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self):
        if min(self.x1, self.y1, self.x2, self.y2) < 0:
            raise ValueError(f"negative coordinate in {self.as_list()}")
        if self.x2 < self.x1 or self.y2 < self.y1:
            raise ValueError(f"inverted box {self.as_list()}")

    @classmethod
    def of(cls, coords: Iterable[float]) -> "BBox":
        x1, y1, x2, y2 = (int(round(c)) for c in coords)
        return cls(x1, y1, x2, y2)

    @property
    def width(self) -> int:
        return self.x2 - self.x1

    @property
    def height(self) -> int:
        return self.y2 - self.y1

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0

    def as_list(self) -> list[int]:
        return [self.x1, self.y1, self.x2, self.y2]

    def intersection(self, other: "BBox") -> int:
        w = min(self.x2, other.x2) - max(self.x1, other.x1)
        h = min(self.y2, other.y2) - max(self.y1, other.y1)
        if w <= 0 or h <= 0:
            return 0
        return w * h

    def clip(self, width: int, height: int) -> "BBox":
        x1 = min(max(self.x1, 0), width)
        y1 = min(max(self.y1, 0), height)
        return BBox(x1, y1, max(x1, min(self.x2, width)), max(y1, min(self.y2, height)))

    def gaps(self, other: "BBox") -> tuple[int, int]:
        """Horizontal and vertical empty space between two boxes (0 when they overlap on that axis)."""
        gx = max(0, max(self.x1, other.x1) - min(self.x2, other.x2))
        gy = max(0, max(self.y1, other.y1) - min(self.y2, other.y2))
        return gx, gy


def iou(a: BBox, b: BBox) -> float:
    inter = a.intersection(b)
    if inter == 0:
        return 0.0
    union = a.area + b.area - inter
    return inter / union if union > 0 else 0.0


def contains(outer: BBox, inner: BBox) -> bool:
    if inner.area == 0:
        return False
    return outer.intersection(inner) >= CONTAIN_RATIO * inner.area


def union_box(boxes: Iterable[BBox]) -> BBox:
    boxes = list(boxes)
    if not boxes:
        raise ValueError("union_box needs at least one box")
    return BBox(
        min(b.x1 for b in boxes),
        min(b.y1 for b in boxes),
        max(b.x2 for b in boxes),
        max(b.y2 for b in boxes),
    )
