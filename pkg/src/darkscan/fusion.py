"""Merge OCR text lines into element detections."""

from __future__ import annotations

from typing import Sequence

from .adapters import TextLine
from .geometry import contains, iou, union_box
from .model import TEXTUAL_TYPES, ElementType, UIElement

DEFAULT_MATCH_THRESHOLD = 0.5


def element_order(el: UIElement):
    b = el.bbox
    return (b.area, b.y1, b.x1)


def line_matches(el: UIElement, line: TextLine, match_threshold: float) -> bool:
    if iou(el.bbox, line.bbox) >= match_threshold:
        return True
    # tight OCR boxes inside a loose text/button box score a low IoU
    return el.etype in TEXTUAL_TYPES and contains(el.bbox, line.bbox)


def reading_order(line: TextLine):
    return (line.bbox.y1, line.bbox.x1, line.bbox.y2, line.bbox.x2)


def merge_text_lines(elements: Sequence[UIElement], lines: Sequence[TextLine],
                     match_threshold: float = DEFAULT_MATCH_THRESHOLD) -> list[UIElement]:
    """Attach OCR lines to the smallest matching elements; leftovers become TextViews.

    Returns the input elements (input order, text and possibly bbox updated)
    followed by one new TextView per unconsumed line, in line order.
    """
    taken: dict[int, list[int]] = {}
    free = set(range(len(lines)))
    ordered = sorted(range(len(elements)), key=lambda i: element_order(elements[i]))
    for ei in ordered:
        el = elements[ei]
        hits = [li for li in sorted(free) if line_matches(el, lines[li], match_threshold)]
        if hits:
            taken[ei] = hits
            free.difference_update(hits)

    out = []
    for ei, el in enumerate(elements):
        hits = taken.get(ei)
        if not hits:
            out.append(el.copy())
            continue
        matched = sorted((lines[li] for li in hits), key=reading_order)
        changes = {"text": " ".join(ln.text for ln in matched)}
        if el.etype in TEXTUAL_TYPES:
            changes["bbox"] = union_box(ln.bbox for ln in matched)
        out.append(el.copy(**changes))
    for li in sorted(free):
        out.append(UIElement(bbox=lines[li].bbox, etype=ElementType.TEXT_VIEW,
                             text=lines[li].text, confidence=1.0, source="ocr"))
    return out
