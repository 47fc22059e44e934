"""Extractor interfaces plus the annotation-backed implementations.

Neural models (element detector, OCR, icon and status classifiers) are not
shipped. Each slot of an :class:`ExtractorSuite` is anything that satisfies the
matching protocol; the ``Annotation*`` classes replay sidecar files instead.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Protocol, Sequence

import numpy as np

from .geometry import BBox, iou
from .model import ICON_TYPES, STATUS_TYPES, ElementType, IconClass, Screen, WidgetStatus

log = logging.getLogger(__name__)

DEFAULT_NMS_IOU = 0.5
DEFAULT_NMS_CONF = 0.65


class MissingAnnotation(LookupError):
    """An annotation-backed extractor was asked about a box its sidecar does not describe."""

    def __init__(self, extractor: str, bbox: BBox):
        super().__init__(f"{extractor}: no sidecar entry for bbox {bbox.as_list()}")
        self.extractor = extractor
        self.bbox = bbox


class Detection(NamedTuple):
    bbox: BBox
    etype: ElementType
    confidence: float


@dataclass(frozen=True)
class TextLine:
    bbox: BBox
    text: str


class ElementDetector(Protocol):
    shareable: bool

    def detect(self, image: Optional[np.ndarray]) -> list[Detection]: ...


class TextRecognizer(Protocol):
    shareable: bool

    def recognize(self, image: Optional[np.ndarray]) -> list[TextLine]: ...


class IconClassifier(Protocol):
    shareable: bool

    def classify(self, crop: Optional[np.ndarray], bbox: BBox) -> Optional[IconClass]: ...


class StatusClassifier(Protocol):
    shareable: bool

    def classify(self, crop: Optional[np.ndarray], bbox: BBox) -> Optional[WidgetStatus]: ...


class AnnotationElementDetector:
    shareable = True

    def __init__(self, detections: Sequence[Detection]):
        self._detections = list(detections)

    def detect(self, image):
        return list(self._detections)


class AnnotationTextRecognizer:
    shareable = True

    def __init__(self, lines: Sequence[TextLine]):
        self._lines = list(lines)

    def recognize(self, image):
        return list(self._lines)


class AnnotationIconClassifier:
    """Looks icons up by exact box. A known box without a label means the classifier abstains."""

    shareable = True

    def __init__(self, labels: dict[BBox, Optional[IconClass]]):
        self._labels = dict(labels)

    def classify(self, crop, bbox):
        if bbox not in self._labels:
            raise MissingAnnotation("icon_classifier", bbox)
        return self._labels[bbox]


class AnnotationStatusClassifier:
    shareable = True

    def __init__(self, labels: dict[BBox, Optional[WidgetStatus]]):
        self._labels = dict(labels)

    def classify(self, crop, bbox):
        if bbox not in self._labels:
            raise MissingAnnotation("status_classifier", bbox)
        return self._labels[bbox]


@dataclass(frozen=True)
class ExtractorSuite:
    element_detector: ElementDetector
    text_recognizer: TextRecognizer
    icon_classifier: IconClassifier
    status_classifier: StatusClassifier

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if getattr(self, f.name) is None:
                raise ValueError(f"extractor slot {f.name!r} is empty")

    @property
    def shareable(self) -> bool:
        return all(getattr(getattr(self, f.name), "shareable", False) for f in dataclasses.fields(self))


def _nms_key(d: Detection):
    # highest confidence first; ties go to the smaller box, then bbox order
    return (-d.confidence, d.bbox.area, d.bbox.as_list())


def non_max_suppression(dets: Sequence[Detection], iou_threshold: float = DEFAULT_NMS_IOU,
                        conf_threshold: float = DEFAULT_NMS_CONF) -> list[Detection]:
    """Greedy per-type NMS. Survivors are returned in their input order."""
    if not (0.0 <= iou_threshold <= 1.0 and 0.0 <= conf_threshold <= 1.0):
        raise ValueError("thresholds must lie in [0, 1]")
    candidates = [(i, d) for i, d in enumerate(dets) if d.confidence >= conf_threshold]
    candidates.sort(key=lambda p: _nms_key(p[1]))
    kept: list[tuple[int, Detection]] = []
    for i, d in candidates:
        if any(k.etype == d.etype and iou(k.bbox, d.bbox) >= iou_threshold for _, k in kept):
            continue
        kept.append((i, d))
    kept.sort(key=lambda p: p[0])
    return [d for _, d in kept]


def _in_bounds(screen: Screen, box: BBox) -> bool:
    return box.x2 <= screen.width and box.y2 <= screen.height and box.area > 0


def classify_icons(screen: Screen, suite: ExtractorSuite) -> Screen:
    elements = []
    notes = list(screen.notes)
    for el in screen.elements:
        if el.etype in ICON_TYPES and el.source != "template":
            if not _in_bounds(screen, el.bbox):
                notes.append(f"warning: icon crop {el.bbox.as_list()} outside image; skipped")
                log.warning("icon crop %s outside image", el.bbox.as_list())
            else:
                label = suite.icon_classifier.classify(screen.crop(el.bbox), el.bbox)
                el = el.copy(icon=label if label is not None else IconClass("other"))
        elements.append(el)
    return dataclasses.replace(screen, elements=elements, notes=notes)


def classify_status(screen: Screen, suite: ExtractorSuite) -> Screen:
    elements = []
    notes = list(screen.notes)
    for el in screen.elements:
        if el.etype not in STATUS_TYPES:
            el = el.copy(status=WidgetStatus.NOT_APPLICABLE)
        elif not _in_bounds(screen, el.bbox):
            notes.append(f"warning: status crop {el.bbox.as_list()} outside image; skipped")
            log.warning("status crop %s outside image", el.bbox.as_list())
            el = el.copy(status=WidgetStatus.UNKNOWN)
        else:
            status = suite.status_classifier.classify(screen.crop(el.bbox), el.bbox)
            el = el.copy(status=status if status is not None else WidgetStatus.UNKNOWN)
        elements.append(el)
    return dataclasses.replace(screen, elements=elements, notes=notes)
