"""Engine configuration (a single YAML file, see data/default_config.yaml)."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import yaml

from .grouping import GroupingParams
from .model import Stage


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    nms_iou: float = 0.5
    nms_conf: float = 0.65
    fusion_threshold: float = 0.5
    template_dir: Optional[Path] = None
    template_scales: tuple = (0.75, 1.0, 1.25, 1.5)
    ncc_threshold: float = 0.8
    color_levels: int = 32
    fg_min_share: float = 0.02
    grouping: GroupingParams = field(default_factory=GroupingParams)
    rules_file: Optional[Path] = None
    eval_iou: float = 0.5
    disabled: frozenset = frozenset()

    def without(self, stages) -> "Config":
        return replace(self, disabled=frozenset(stages))


def _section(doc: dict, name: str) -> dict:
    sec = doc.get(name) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected a mapping")
    return sec


def parse_config(doc: Optional[dict], base: Optional[Path] = None) -> Config:
    doc = doc or {}
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")

    def path(v):
        if v is None:
            return None
        p = Path(v)
        return p if p.is_absolute() or base is None else base / p

    nms, fusion, tpl = _section(doc, "nms"), _section(doc, "fusion"), _section(doc, "templates")
    colors, grouping, checker = _section(doc, "colors"), _section(doc, "grouping"), _section(doc, "checker")
    ev, stages = _section(doc, "evaluation"), _section(doc, "stages")
    known = {f.name for f in fields(GroupingParams)}
    if set(grouping) - known:
        raise ConfigError(f"grouping: unknown keys {sorted(set(grouping) - known)}")
    try:
        return Config(
            nms_iou=float(nms.get("iou_threshold", 0.5)),
            nms_conf=float(nms.get("conf_threshold", 0.65)),
            fusion_threshold=float(fusion.get("match_threshold", 0.5)),
            template_dir=path(tpl.get("directory")),
            template_scales=tuple(float(s) for s in tpl.get("scales", (0.75, 1.0, 1.25, 1.5))),
            ncc_threshold=float(tpl.get("ncc_threshold", 0.8)),
            color_levels=int(colors.get("levels", 32)),
            fg_min_share=float(colors.get("fg_min_share", 0.02)),
            grouping=GroupingParams(**grouping),
            rules_file=path(checker.get("rules_file")),
            eval_iou=float(ev.get("iou_threshold", 0.5)),
            disabled=frozenset(Stage(s) for s in stages.get("disabled", [])),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: Optional[Path] = None) -> Config:
    if path is None:
        return Config()
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    return parse_config(doc, base=path.parent)
