import numpy as np
import pytest
from hypothesis import given, strategies as st

from darkscan.adapters import (AnnotationElementDetector, AnnotationIconClassifier, AnnotationStatusClassifier,
                               AnnotationTextRecognizer, Detection, ExtractorSuite, MissingAnnotation,
                               classify_icons, classify_status, non_max_suppression)
from darkscan.geometry import BBox, iou
from darkscan.model import ElementType as E, IconClass, Screen, UIElement, WidgetStatus


def det(x1, y1, x2, y2, conf=0.9, etype=E.BUTTON):
    return Detection(BBox(x1, y1, x2, y2), etype, conf)


def test_nms_keeps_highest_confidence():
    a, b = det(0, 0, 10, 10, 0.9), det(1, 0, 11, 10, 0.95)
    assert non_max_suppression([a, b]) == [b]


def test_nms_is_per_type_and_drops_low_confidence():
    a = det(0, 0, 10, 10, 0.9)
    b = det(0, 0, 10, 10, 0.9, etype=E.TEXT_VIEW)
    low = det(50, 50, 60, 60, 0.6)
    assert non_max_suppression([a, b, low]) == [a, b]


def test_nms_tie_prefers_smaller_box():
    big, small = det(0, 0, 10, 10), det(0, 0, 10, 9)
    assert non_max_suppression([big, small]) == [small]


def test_nms_rejects_bad_thresholds():
    with pytest.raises(ValueError):
        non_max_suppression([], iou_threshold=1.5)


types = st.sampled_from([E.BUTTON, E.TEXT_VIEW, E.IMAGE_VIEW])


@st.composite
def detections(draw):
    out = []
    for _ in range(draw(st.integers(0, 25))):
        x1, y1 = draw(st.integers(0, 80)), draw(st.integers(0, 80))
        w, h = draw(st.integers(1, 30)), draw(st.integers(1, 30))
        conf = draw(st.sampled_from([0.5, 0.65, 0.7, 0.8, 0.9, 1.0]))
        out.append(Detection(BBox(x1, y1, x1 + w, y1 + h), draw(types), conf))
    return out


@given(detections())
def test_nms_properties(dets):
    once = non_max_suppression(dets)
    assert non_max_suppression(once) == once
    assert all(d in dets and d.confidence >= 0.65 for d in once)
    for t in E:
        assert sum(d.etype == t for d in once) <= sum(d.etype == t for d in dets)
    for i, a in enumerate(once):
        for b in once[i + 1:]:
            if a.etype == b.etype:
                assert iou(a.bbox, b.bbox) < 0.5


def _screen(*elements, size=100):
    img = np.zeros((size, size, 3), np.uint8)
    return Screen(size, size, [e.copy(id=i) for i, e in enumerate(elements)], image=img)


def _suite(icons=None, statuses=None):
    return ExtractorSuite(AnnotationElementDetector([]), AnnotationTextRecognizer([]),
                          AnnotationIconClassifier(icons or {}), AnnotationStatusClassifier(statuses or {}))


def test_suite_slots_required():
    with pytest.raises(ValueError):
        ExtractorSuite(AnnotationElementDetector([]), None, None, None)
    assert _suite().shareable


def test_classify_icons_abstain_and_skip():
    inside, outside = BBox(0, 0, 10, 10), BBox(95, 95, 110, 110)
    s = _screen(UIElement(inside, E.IMAGE_BUTTON), UIElement(BBox(20, 20, 30, 30), E.BUTTON, text="x"),
                UIElement(outside, E.IMAGE_VIEW))
    out = classify_icons(s, _suite(icons={inside: None}))
    assert out.elements[0].icon == IconClass("other")
    assert out.elements[1].icon is None
    assert out.elements[2].icon is None
    assert any("outside image" in n for n in out.notes)


def test_classify_icons_missing_annotation_fails_loudly():
    s = _screen(UIElement(BBox(0, 0, 10, 10), E.IMAGE_VIEW))
    with pytest.raises(MissingAnnotation):
        classify_icons(s, _suite())


def test_classify_status():
    box = BBox(0, 0, 10, 10)
    s = _screen(UIElement(box, E.CHECKBOX), UIElement(BBox(0, 20, 10, 30), E.SWITCH),
                UIElement(BBox(20, 20, 30, 30), E.BUTTON))
    out = classify_status(s, _suite(statuses={box: WidgetStatus.CHECKED, BBox(0, 20, 10, 30): None}))
    assert [e.status for e in out.elements] == [WidgetStatus.CHECKED, WidgetStatus.UNKNOWN,
                                                WidgetStatus.NOT_APPLICABLE]
