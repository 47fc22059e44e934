"""Dark-pattern taxonomy, text patterns and the external rules file."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Optional

import yaml

from .model import IconClass, Stage


class Strategy(str, Enum):
    NG = "NG"
    OB = "OB"
    SN = "SN"
    II = "II"
    FA = "FA"


STRATEGY_NAMES = {
    Strategy.NG: "Nagging",
    Strategy.OB: "Obstruction",
    Strategy.SN: "Sneaking",
    Strategy.II: "Interface Interference",
    Strategy.FA: "Forced Action",
}


class DPType(str, Enum):
    NG_POPUP_AD = "NG-POPUP-AD"
    NG_RATE = "NG-RATE"
    NG_UPGRADE = "NG-UPGRADE"
    OB_INTERMEDIATE_CURRENCY = "OB-INTERMEDIATE-CURRENCY"
    SN_FORCED_CONTINUITY = "SN-FORCED-CONTINUITY"
    II_PRESELECTION_CHECKED = "II-PRESELECTION-CHECKED"
    II_PRESELECTION_NO_CHECKBOX = "II-PRESELECTION-NO-CHECKBOX"
    II_FALSE_HIERARCHY = "II-FALSE-HIERARCHY"
    II_DISGUISED_AD = "II-DISGUISED-AD"
    II_SMALL_CLOSE = "II-SMALL-CLOSE"
    FA_SOCIAL_PYRAMID = "FA-SOCIAL-PYRAMID"
    FA_PRIVACY_ZUCKERING = "FA-PRIVACY-ZUCKERING"
    FA_GAMIFICATION = "FA-GAMIFICATION"
    FA_COUNTDOWN_AD = "FA-COUNTDOWN-AD"
    FA_WATCH_AD = "FA-WATCH-AD"
    FA_PAY_AVOID_ADS = "FA-PAY-AVOID-ADS"

    @property
    def strategy(self) -> Strategy:
        return Strategy(self.value[:2])

    @property
    def tier(self) -> str:
        return "warning" if self in HYBRID_TYPES else "certain"


# context-related types that a single screen can still reveal; reported as warnings
HYBRID_TYPES = frozenset({
    DPType.NG_POPUP_AD, DPType.NG_RATE, DPType.NG_UPGRADE,
    DPType.II_PRESELECTION_CHECKED,
    DPType.FA_PRIVACY_ZUCKERING, DPType.FA_COUNTDOWN_AD,
})


@dataclass(frozen=True)
class TextPattern:
    pid: str
    source: str
    dp_type: Optional[DPType] = None
    regex: re.Pattern = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # anchored on word boundaries that also work next to symbols such as "$"
        object.__setattr__(self, "regex", re.compile(rf"(?<!\w)(?:{self.source})(?!\w)", re.IGNORECASE))

    def search(self, text: Optional[str]) -> Optional[re.Match]:
        if not text:
            return None
        return self.regex.search(text)


def match_text(pattern: TextPattern, text: Optional[str]) -> bool:
    return pattern.search(text) is not None


@dataclass(frozen=True)
class CheckerParams:
    popup_min_area: float = 0.15
    popup_max_area: float = 0.85
    popup_margin: float = 0.04
    adjacency_factor: float = 1.5
    small_close_ratio: float = 0.035
    saliency_threshold: float = 60.0
    similar_size_tolerance: float = 0.10
    badge_max_words: int = 3
    dedup_iou: float = 0.5


@dataclass(frozen=True)
class RuleSpec:
    dp_type: DPType
    patterns: dict = field(default_factory=dict)  # slot name -> tuple[TextPattern, ...]
    icons: tuple = ()
    statuses: tuple = ()
    # each inner tuple lists alternative stages; the rule abstains if every stage in one tuple is off
    requires: tuple = ()
    explanation: str = ""
    enabled: bool = True

    def slot(self, name: str) -> tuple:
        return self.patterns.get(name, ())

    def missing_stage(self, disabled) -> Optional[str]:
        for alternatives in self.requires:
            if all(stage in disabled for stage in alternatives):
                return "+".join(s.value for s in alternatives)
        return None


@dataclass(frozen=True)
class RuleSet:
    rules: tuple
    params: CheckerParams = CheckerParams()
    shared: dict = field(default_factory=dict)  # slot name -> tuple[TextPattern, ...]

    def enabled(self) -> list[RuleSpec]:
        return [r for r in self.rules if r.enabled]

    def get(self, dp_type: DPType) -> RuleSpec:
        for r in self.rules:
            if r.dp_type == dp_type:
                return r
        raise KeyError(dp_type)

    def with_enabled(self, enabled: set) -> "RuleSet":
        from dataclasses import replace
        return replace(self, rules=tuple(replace(r, enabled=r.dp_type in enabled) for r in self.rules))


class RulesFileError(ValueError):
    pass


def _expand(source: str, macros: dict) -> str:
    for name, value in macros.items():
        source = source.replace(f"%{name}%", f"(?:{value})")
    return source


def _patterns(raw, where: str, macros: dict, dp_type: Optional[DPType]) -> tuple:
    if not isinstance(raw, list) or not all(isinstance(p, str) for p in raw):
        raise RulesFileError(f"{where}: expected a list of regex strings")
    out = []
    for i, src in enumerate(raw):
        try:
            out.append(TextPattern(f"{where}[{i}]", _expand(src, macros), dp_type))
        except re.error as exc:
            raise RulesFileError(f"{where}[{i}]: bad regex {src!r}: {exc}") from exc
    return tuple(out)


def parse_rules(doc: dict) -> RuleSet:
    if not isinstance(doc, dict) or doc.get("version") != 1:
        raise RulesFileError("rules file must be a mapping with version: 1")
    macros = {str(k): str(v) for k, v in (doc.get("macros") or {}).items()}
    try:
        params = CheckerParams(**(doc.get("params") or {}))
    except TypeError as exc:
        raise RulesFileError(f"params: {exc}") from exc
    shared = {name: _patterns(v, f"shared.{name}", macros, None) for name, v in (doc.get("shared") or {}).items()}
    rules = []
    raw_rules = doc.get("rules") or {}
    for key, body in raw_rules.items():
        try:
            dp = DPType(key)
        except ValueError:
            raise RulesFileError(f"rules: unknown dark-pattern type {key!r}") from None
        body = body or {}
        try:
            icons = tuple(IconClass(i) for i in body.get("icons", []))
            statuses = tuple(body.get("statuses", []))
            requires = tuple(tuple(Stage(s) for s in alt) for alt in body.get("requires", []))
        except ValueError as exc:
            raise RulesFileError(f"rules.{key}: {exc}") from exc
        patterns = {slot: _patterns(v, f"rules.{key}.patterns.{slot}", macros, dp)
                    for slot, v in (body.get("patterns") or {}).items()}
        rules.append(RuleSpec(dp, patterns, icons, statuses, requires,
                              str(body.get("explanation", "")), bool(body.get("enabled", True))))
    missing = set(DPType) - {r.dp_type for r in rules}
    if missing:
        raise RulesFileError(f"rules: no entry for {sorted(m.value for m in missing)}")
    rules.sort(key=lambda r: list(DPType).index(r.dp_type))
    return RuleSet(tuple(rules), params, shared)


def load_rules(path: Optional[Path] = None) -> RuleSet:
    """Load a rules file, or the bundled default set when ``path`` is None."""
    if path is None:
        text = (resources.files("darkscan") / "data" / "default_rules.yaml").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise RulesFileError(f"rules file is not valid YAML: {exc}") from exc
    return parse_rules(doc)
