"""End-to-end analysis of one screenshot."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image, UnidentifiedImageError

from .adapters import ExtractorSuite, classify_icons, classify_status, non_max_suppression
from .checker import Finding, check_screen
from .config import Config
from .fusion import merge_text_lines
from .geometry import iou
from .grouping import assign_groups
from .io import ElementSidecar, OcrSidecar, SchemaError, read_model, suite_from_sidecars
from .model import ICON_TYPES, STATUS_TYPES, ElementType, Screen, Stage, UIElement, WidgetStatus
from .rules import RuleSet, load_rules
from .visual import extract_colors, load_templates, match_templates

log = logging.getLogger(__name__)


@dataclass
class Analysis:
    screen: Screen
    findings: list[Finding]
    notes: list[str] = field(default_factory=list)


@lru_cache(maxsize=8)
def _templates(directory: Optional[Path]):
    return tuple(load_templates(directory))


@lru_cache(maxsize=8)
def _rules(path: Optional[Path]) -> RuleSet:
    return load_rules(path)


def load_image(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))
    except UnidentifiedImageError as exc:
        raise SchemaError(f"{path}: not a readable image") from exc


def add_template_hits(screen: Screen, config: Config) -> Screen:
    """Append ad-icon template hits the detector missed as ImageView elements."""
    notes = list(screen.notes)
    hits = match_templates(screen.image, _templates(config.template_dir), config.template_scales,
                           config.ncc_threshold, warnings=notes)
    elements = list(screen.elements)
    for hit in hits:
        if any(e.etype in ICON_TYPES and iou(e.bbox, hit.bbox) >= 0.5 for e in elements):
            continue
        elements.append(UIElement(bbox=hit.bbox, etype=ElementType.IMAGE_VIEW, confidence=round(hit.score, 4),
                                  icon=hit.icon, source="template", id=len(elements)))
    return dataclasses.replace(screen, elements=elements, notes=notes)


def add_colors(screen: Screen, config: Config) -> Screen:
    screen_bg = extract_colors(screen.image, config.color_levels, config.fg_min_share).background
    elements = []
    for el in screen.elements:
        crop = screen.crop(el.bbox)
        if crop is not None and crop.size:
            bg, fg = extract_colors(crop, config.color_levels, config.fg_min_share)
            el = el.copy(bg_color=bg, fg_color=fg)
        elements.append(el)
    return dataclasses.replace(screen, elements=elements, bg_color=screen_bg)


def analyze_screen(image: np.ndarray, suite: ExtractorSuite, config: Config = Config(),
                   rules: Optional[RuleSet] = None, name: str = "") -> Analysis:
    if rules is None:
        rules = _rules(config.rules_file)
    disabled = frozenset(config.disabled)
    height, width = image.shape[:2]

    dets = non_max_suppression(suite.element_detector.detect(image), config.nms_iou, config.nms_conf)
    lines = suite.text_recognizer.recognize(image)
    elements = [UIElement(bbox=d.bbox, etype=d.etype, confidence=d.confidence) for d in dets]
    elements = merge_text_lines(elements, lines, config.fusion_threshold)
    screen = Screen(width, height, elements, image=image, name=name, disabled=disabled)
    screen.renumber()

    if Stage.ICON not in disabled:
        screen = classify_icons(screen, suite)
    if Stage.TEMPLATE not in disabled:
        screen = add_template_hits(screen, config)
    if Stage.STATUS not in disabled:
        screen = classify_status(screen, suite)
    else:
        screen.elements = [e.copy(status=WidgetStatus.UNKNOWN if e.etype in STATUS_TYPES
                                  else WidgetStatus.NOT_APPLICABLE) for e in screen.elements]
    if Stage.COLOR_GROUPING not in disabled:
        screen = add_colors(screen, config)
        screen = assign_groups(screen, config.grouping)

    notes = list(screen.notes)
    findings = check_screen(screen, rules, notes)
    return Analysis(screen, findings, notes)


@dataclass(frozen=True)
class ScreenInput:
    image: Path
    elements: Path
    ocr: Optional[Path] = None

    @classmethod
    def beside(cls, image: Path) -> "ScreenInput":
        """Sidecars named ``<stem>.elements.json`` / ``<stem>.ocr.json`` next to the image."""
        image = Path(image)
        ocr = image.with_name(image.stem + ".ocr.json")
        return cls(image, image.with_name(image.stem + ".elements.json"), ocr if ocr.exists() else None)


def analyze_files(item: ScreenInput, config: Config = Config(), rules: Optional[RuleSet] = None) -> Analysis:
    image = load_image(item.image)
    sidecar = read_model(item.elements, ElementSidecar)
    if (sidecar.width, sidecar.height) != (image.shape[1], image.shape[0]):
        raise SchemaError(f"{item.elements}: width/height {sidecar.width}x{sidecar.height} do not match "
                          f"image {image.shape[1]}x{image.shape[0]}")
    ocr = read_model(item.ocr, OcrSidecar) if item.ocr else None
    return analyze_screen(image, suite_from_sidecars(sidecar, ocr), config, rules, name=sidecar.image)
