import json

from darkscan.model import ICON_TYPES, STATUS_TYPES, TEXTUAL_TYPES, WidgetStatus
from darkscan.pipeline import ScreenInput, analyze_files


def test_screen_invariants(analyzed):
    for c, a in analyzed:
        s = a.screen
        ids = [e.id for e in s.elements]
        assert ids == list(range(len(ids)))
        for e in s.elements:
            assert e.bbox.x2 <= s.width and e.bbox.y2 <= s.height and e.bbox.area > 0
            assert 0.0 <= e.confidence <= 1.0
            if e.status != WidgetStatus.NOT_APPLICABLE:
                assert e.etype in STATUS_TYPES
            if e.icon is not None:
                assert e.etype in ICON_TYPES
                if e.icon.value.startswith("ad_"):
                    assert e.source == "template"
            if e.etype in TEXTUAL_TYPES and e.source == "ocr":
                assert e.text
        members = [i for g in s.groups for i in g]
        assert len(members) == len(set(members)) and set(members) <= set(ids)
        for e in s.elements:
            assert (e.group_id is None) == (e.id not in members)


def test_ocr_sidecar_replaces_element_texts(corpus, tmp_path):
    c, img, _ = next(item for item in corpus if item[0].name == "watch_video_coins")
    side = json.loads(img.with_name(img.stem + ".elements.json").read_text())
    lines = []
    for el in side["elements"]:
        if "text" in el:
            lines.append({"bbox": el.pop("bbox"), "text": el.pop("text")})
            el["bbox"] = [0, 0, 1, 1]
    side["elements"] = [el for el in side["elements"] if el["bbox"] != [0, 0, 1, 1]]
    (tmp_path / "e.json").write_text(json.dumps(side))
    (tmp_path / "o.json").write_text(json.dumps({"lines": lines}))
    a = analyze_files(ScreenInput(img, tmp_path / "e.json", tmp_path / "o.json"))
    assert [f.dp_type.value for f in a.findings] == ["FA-WATCH-AD"]
    assert all(e.source == "ocr" for e in a.screen.elements if e.text)
