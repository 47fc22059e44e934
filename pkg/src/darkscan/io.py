"""JSON sidecar, ground-truth and findings-report formats."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .adapters import (AnnotationElementDetector, AnnotationIconClassifier, AnnotationStatusClassifier,
                       AnnotationTextRecognizer, Detection, ExtractorSuite, TextLine)
from .checker import Finding
from .evaluation import GroundTruthInstance
from .geometry import BBox
from .model import ICON_TYPES, STATUS_TYPES, ElementType, IconClass, WidgetStatus
from .rules import DPType


class SchemaError(ValueError):
    """A sidecar or report file does not follow its schema. ``str()`` names the offending record."""


Coords = list[float]


def _check_box(v: Coords) -> Coords:
    if len(v) != 4:
        raise ValueError("bbox must have 4 numbers [x1, y1, x2, y2]")
    x1, y1, x2, y2 = v
    if min(v) < 0:
        raise ValueError("bbox coordinates must be non-negative")
    if x2 <= x1 or y2 <= y1:
        raise ValueError("bbox needs x1 < x2 and y1 < y2")
    return v


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ElementRecord(_Strict):
    bbox: Coords
    type: ElementType
    text: Optional[str] = None
    icon: Optional[IconClass] = None
    status: Optional[Literal["checked", "unchecked", "other", "not_applicable", "unknown"]] = None
    confidence: float = Field(1.0, ge=0.0, le=1.0)

    _box = field_validator("bbox")(_check_box)


class ElementSidecar(_Strict):
    image: str
    width: int = Field(gt=0)
    height: int = Field(gt=0)
    elements: list[ElementRecord]

    @model_validator(mode="after")
    def _inside(self):
        for i, el in enumerate(self.elements):
            if el.bbox[2] > self.width or el.bbox[3] > self.height:
                raise ValueError(f"elements.{i}.bbox {el.bbox} lies outside the {self.width}x{self.height} screen")
        return self


class OcrLineRecord(_Strict):
    bbox: Coords
    text: str = Field(min_length=1)

    _box = field_validator("bbox")(_check_box)


class OcrSidecar(_Strict):
    lines: list[OcrLineRecord]


class GTElementRecord(_Strict):
    bbox: Coords
    type: ElementType

    _box = field_validator("bbox")(_check_box)


class GTInstanceRecord(_Strict):
    dp_type: DPType
    container: Coords
    elements: list[GTElementRecord] = []

    _box = field_validator("container")(_check_box)


class GroundTruthFile(_Strict):
    image: str
    instances: list[GTInstanceRecord]


class EvidenceRecord(_Strict):
    element: int
    role: str


class FindingRecord(_Strict):
    dp_type: DPType
    strategy: str
    tier: Literal["certain", "warning"]
    container: Coords
    evidence: list[EvidenceRecord] = Field(min_length=1)
    explanation: str

    _box = field_validator("container")(_check_box)


class FindingsReport(_Strict):
    image: str
    width: int
    height: int
    findings: list[FindingRecord]
    notes: list[str] = []


def _describe(exc: ValidationError, source: str) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return f"{source}: " + "; ".join(parts)


def read_model(path: Path, model: type[BaseModel]):
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        raise SchemaError(_describe(exc, str(path))) from exc


def _box(v: Coords) -> BBox:
    return BBox.of(v)


_STATUS = {
    "checked": WidgetStatus.CHECKED,
    "unchecked": WidgetStatus.UNCHECKED,
    "other": WidgetStatus.NOT_APPLICABLE,
    "not_applicable": WidgetStatus.NOT_APPLICABLE,
    "unknown": None,
    None: None,
}


def suite_from_sidecars(elements: ElementSidecar, ocr: Optional[OcrSidecar] = None) -> ExtractorSuite:
    """Annotation-backed extractors. Without an OCR sidecar, element texts stand in for OCR lines."""
    dets = [Detection(_box(r.bbox), r.type, r.confidence) for r in elements.elements]
    if ocr is not None:
        lines = [TextLine(_box(r.bbox), r.text) for r in ocr.lines]
    else:
        lines = [TextLine(_box(r.bbox), r.text) for r in elements.elements if r.text and r.text.strip()]
    icons = {_box(r.bbox): r.icon for r in elements.elements if r.type in ICON_TYPES}
    statuses = {_box(r.bbox): _STATUS[r.status] for r in elements.elements if r.type in STATUS_TYPES}
    return ExtractorSuite(
        AnnotationElementDetector(dets),
        AnnotationTextRecognizer(lines),
        AnnotationIconClassifier(icons),
        AnnotationStatusClassifier(statuses),
    )


def load_ground_truth(path: Path) -> tuple[str, list[GroundTruthInstance]]:
    doc = read_model(path, GroundTruthFile)
    return doc.image, [
        GroundTruthInstance(inst.dp_type, _box(inst.container),
                            tuple((_box(e.bbox), e.type) for e in inst.elements))
        for inst in doc.instances
    ]


def dump_ground_truth(image: str, instances: list[GroundTruthInstance]) -> str:
    doc = {"image": image, "instances": [
        {"dp_type": g.dp_type.value, "container": g.container.as_list(),
         "elements": [{"bbox": b.as_list(), "type": t.value} for b, t in g.elements]}
        for g in instances]}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _num(v: float):
    # integral values stay ints; everything else is fixed to 4 decimals
    f = float(v)
    return int(f) if f.is_integer() else round(f, 4)


def report_dict(image: str, width: int, height: int, findings: list[Finding], notes=()) -> dict:
    return {
        "image": image,
        "width": width,
        "height": height,
        "findings": [
            {
                "dp_type": f.dp_type.value,
                "strategy": f.strategy.value,
                "tier": f.tier,
                "container": f.container.as_list(),
                "evidence": [{"element": eid, "role": role} for eid, role in f.evidence],
                "explanation": f.explanation,
            }
            for f in findings
        ],
        "notes": list(notes),
    }


def serialize_report(report: FindingsReport | dict) -> str:
    """Canonical JSON text: fixed key order, 2-space indent, 4-decimal floats."""
    if isinstance(report, BaseModel):
        report = report.model_dump(mode="json")
    doc = {
        "image": report["image"],
        "width": report["width"],
        "height": report["height"],
        "findings": [
            {
                "dp_type": f["dp_type"],
                "strategy": f["strategy"],
                "tier": f["tier"],
                "container": [_num(c) for c in f["container"]],
                "evidence": [{"element": e["element"], "role": e["role"]} for e in f["evidence"]],
                "explanation": f["explanation"],
            }
            for f in report["findings"]
        ],
        "notes": list(report.get("notes", [])),
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def parse_report(text: str, source: str = "<report>") -> FindingsReport:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return FindingsReport.model_validate(raw)
    except ValidationError as exc:
        raise SchemaError(_describe(exc, source)) from exc


def report_findings(report: FindingsReport) -> list[GroundTruthInstance]:
    """Findings of a parsed report as (dp_type, container) records for matching."""
    return [GroundTruthInstance(f.dp_type, _box(f.container)) for f in report.findings]
