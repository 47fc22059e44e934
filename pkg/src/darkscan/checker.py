"""Knowledge-driven checker: turns a property-annotated screen into findings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .geometry import BBox, contains, iou, union_box
from .model import AD_ICONS, STATUS_TYPES, Screen, Stage, UIElement, WidgetStatus
from .rules import CheckerParams, DPType, RuleSet, RuleSpec, TextPattern
from .visual import contrast


@dataclass
class Finding:
    dp_type: DPType
    container: BBox
    evidence: list[tuple[int, str]]  # (element id, role citing the property that fired)
    explanation: str

    @property
    def strategy(self):
        return self.dp_type.strategy

    @property
    def tier(self) -> str:
        return self.dp_type.tier


@dataclass
class RuleResult:
    findings: list[Finding] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def canonical(elements: Iterable[UIElement]) -> list[UIElement]:
    return sorted(elements, key=lambda e: (e.bbox.y1, e.bbox.x1, e.bbox.y2, e.bbox.x2,
                                           e.etype.value, e.text or "", e.icon.value if e.icon else ""))


def first_match(patterns: Iterable[TextPattern], text: Optional[str]) -> Optional[TextPattern]:
    for p in patterns:
        if p.search(text):
            return p
    return None


# ---------------------------------------------------------------- predicates

def is_popup_region(box: BBox, screen: Screen, params: CheckerParams) -> bool:
    share = box.area / float(screen.width * screen.height)
    margin = params.popup_margin * screen.width
    return (params.popup_min_area <= share <= params.popup_max_area
            and box.x1 >= margin and screen.width - box.x2 >= margin)


def enclosing_block(el: UIElement, elements: list[UIElement], screen: Screen,
                    params: CheckerParams) -> Optional[UIElement]:
    """Largest other element holding ``el`` that is not a full-screen backdrop."""
    limit = params.popup_max_area * screen.width * screen.height
    best = None
    for other in elements:
        if other.id == el.id or other.bbox.area <= el.bbox.area or other.bbox.area > limit:
            continue
        if contains(other.bbox, el.bbox) and (best is None or other.bbox.area > best.bbox.area):
            best = other
    return best


def adjacent_widget(text_el: UIElement, elements: list[UIElement], params: CheckerParams) -> Optional[UIElement]:
    """Nearest checkbox-like widget next to a text element, by center distance.

    A widget qualifies when both box gaps are within ``adjacency_factor`` text
    heights, or when it sits on the same row as the text.
    """
    limit = params.adjacency_factor * text_el.bbox.height
    best, best_d = None, math.inf
    for w in elements:
        if w.etype not in STATUS_TYPES:
            continue
        gx, gy = text_el.bbox.gaps(w.bbox)
        same_row = gy == 0 and abs(text_el.bbox.center[1] - w.bbox.center[1]) <= 0.5 * max(text_el.bbox.height, w.bbox.height)
        if not ((gx <= limit and gy <= limit) or same_row):
            continue
        d = math.dist(text_el.bbox.center, w.bbox.center)
        if d < best_d:
            best, best_d = w, d
    return best


def ad_indicators(elements: list[UIElement], rules: RuleSet, screen: Screen) -> list[tuple[UIElement, str]]:
    out = []
    for el in elements:
        if el.icon in AD_ICONS:
            out.append((el, f"icon:{el.icon.value}"))
            continue
        if el.text and len(el.text.split()) <= rules.params.badge_max_words:
            if first_match(rules.shared.get("ad_badge", ()), el.text):
                out.append((el, "text:ad_badge"))
    return out


def similar_size(a: BBox, b: BBox, tol: float) -> bool:
    return abs(a.width - b.width) <= tol * a.width and abs(a.height - b.height) <= tol * a.height


def local_background(options: list[UIElement], elements: list[UIElement], screen: Screen):
    """Background the options sit on: the smallest other element holding them all, else the screen."""
    span = union_box(o.bbox for o in options)
    ids = {o.id for o in options}
    holders = [e for e in elements
               if e.id not in ids and e.bg_color is not None and contains(e.bbox, span)]
    if holders:
        return min(holders, key=lambda e: (e.bbox.area, e.id)).bg_color
    return screen.bg_color


def saliency_over(a: UIElement, d: UIElement, ref, params: CheckerParams) -> Optional[str]:
    """Why option ``a`` is visibly more prominent than option ``d`` on background ``ref``, or None."""
    t = params.saliency_threshold
    sal_a = contrast(a.bg_color, ref) if ref else 0.0
    sal_d = contrast(d.bg_color, ref) if ref else 0.0
    if contrast(a.bg_color, d.bg_color) > t and sal_a > sal_d:
        return "color:background"
    if ref and sal_d <= t < sal_a:
        return "color:background_vs_screen"
    if None in (a.fg_color, d.fg_color):
        return None
    if contrast(a.fg_color, a.bg_color) - contrast(d.fg_color, d.bg_color) > t:
        return "color:text_contrast"
    return None


# ---------------------------------------------------------------- rule bodies

def _icon_name(el: UIElement) -> str:
    if el.icon is None or el.icon.value == "other":
        return ""
    return el.icon.value.replace("_", " ")


def _render(rule: RuleSpec, evidence: list[tuple[UIElement, str]], **extra) -> str:
    text = next((e.text for e, _ in evidence if e.text), "")
    if len(text) > 60:
        text = text[:57] + "..."
    icon = next((_icon_name(e) for e, _ in evidence if _icon_name(e)), "")
    # the first evidence item is the trigger (badge text or ad icon)
    first = evidence[0][0]
    values = {"text": text, "icon": icon, "indicator": _icon_name(first) or first.text or "", "other": ""}
    values.update(extra)
    return rule.explanation.format(**values)


def _finding(rule: RuleSpec, screen: Screen, evidence: list[tuple[UIElement, str]], **extra) -> Finding:
    box = union_box(e.bbox for e, _ in evidence).clip(screen.width, screen.height)
    seen, ev = set(), []
    for e, role in evidence:
        if (e.id, role) not in seen:
            seen.add((e.id, role))
            ev.append((e.id, role))
    return Finding(rule.dp_type, box, ev, _render(rule, evidence, **extra))


def _text_hits(elements, patterns, slot):
    for el in elements:
        p = first_match(patterns, el.text)
        if p is not None:
            yield el, f"text:{slot}"


def _per_element_text(slot: str):
    def body(rule, screen, elements, rules):
        return [_finding(rule, screen, [hit]) for hit in _text_hits(elements, rule.slot(slot), slot)]
    return body


def _with_block(rule, screen, elements, rules, hit, extra=()):
    block = enclosing_block(hit[0], elements, screen, rules.params)
    evidence = [hit, *extra]
    if block is not None:
        evidence.append((block, "block:coordinates"))
    return evidence


def _popup_ad(rule, screen, elements, rules):
    out = []
    for ind in ad_indicators(elements, rules, screen):
        block = enclosing_block(ind[0], elements, screen, rules.params)
        if block is not None and is_popup_region(block.bbox, screen, rules.params):
            out.append(_finding(rule, screen, [ind, (block, "block:popup_region")]))
    return out


def _disguised_ad(rule, screen, elements, rules):
    out = []
    tol = rules.params.similar_size_tolerance
    for ind in ad_indicators(elements, rules, screen):
        block = enclosing_block(ind[0], elements, screen, rules.params)
        if block is None or is_popup_region(block.bbox, screen, rules.params):
            continue
        siblings = [o for o in elements
                    if o.id not in (block.id, ind[0].id) and o.etype == block.etype
                    and not contains(o.bbox, block.bbox) and not contains(block.bbox, o.bbox)
                    and similar_size(block.bbox, o.bbox, tol)]
        if siblings:
            out.append(_finding(rule, screen, [ind, (block, "block:similar_size")]))
        elif block.group_id is not None and Stage.COLOR_GROUPING not in screen.disabled:
            out.append(_finding(rule, screen, [ind, (block, f"group:{block.group_id}")]))
    return out


def _rate(rule, screen, elements, rules):
    stars = [e for e in elements if e.icon in rule.icons]
    if not stars:
        return []
    out = []
    for hit in _text_hits(elements, rule.slot("rate"), "rate"):
        block = enclosing_block(hit[0], elements, screen, rules.params)
        inside = [s for s in stars if block is not None and contains(block.bbox, s.bbox)]
        if not inside:
            inside = [min(stars, key=lambda s: math.dist(s.bbox.center, hit[0].bbox.center))]
        extra = [(s, "icon:star") for s in inside]
        out.append(_finding(rule, screen, _with_block(rule, screen, elements, rules, hit, extra)))
    return out


def _upgrade(rule, screen, elements, rules):
    return [_finding(rule, screen, _with_block(rule, screen, elements, rules, hit))
            for hit in _text_hits(elements, rule.slot("upgrade"), "upgrade")]


def _currency(rule, screen, elements, rules):
    virtual = list(_text_hits(elements, rule.slot("virtual"), "virtual"))
    real = list(_text_hits(elements, rule.slot("real"), "real"))
    if not any(v[0].id != r[0].id for v in virtual for r in real):
        return []
    return [_finding(rule, screen, virtual + real)]


def _forced_continuity(rule, screen, elements, rules):
    trial = list(_text_hits(elements, rule.slot("trial"), "trial"))
    charge = list(_text_hits(elements, rule.slot("charge"), "charge"))
    if not trial or not charge:
        return []
    return [_finding(rule, screen, trial + charge)]


def _preselection_checked(rule, screen, elements, rules):
    by_widget: dict[int, list] = {}
    widgets = {}
    for hit in _text_hits(elements, rule.slot("consent"), "consent"):
        w = adjacent_widget(hit[0], elements, rules.params)
        if w is not None and w.status == WidgetStatus.CHECKED:
            by_widget.setdefault(w.id, []).append(hit)
            widgets[w.id] = w
    out = []
    for wid in sorted(by_widget, key=lambda i: (widgets[i].bbox.y1, widgets[i].bbox.x1)):
        out.append(_finding(rule, screen, [*by_widget[wid], (widgets[wid], "status:checked")]))
    return out


def _no_checkbox(rule, screen, elements, rules):
    if any(e.etype in STATUS_TYPES for e in elements):
        return []
    return [_finding(rule, screen, [hit]) for hit in _text_hits(elements, rule.slot("terms"), "terms")]


def _false_hierarchy(rule, screen, elements, rules):
    dismissive = rule.slot("dismissive")
    out = []
    by_id = {e.id: e for e in elements}
    for gid, members in enumerate(screen.groups):
        group = canonical(by_id[i] for i in members if i in by_id)
        if len(group) < 2 or any(e.bg_color is None for e in group):
            continue
        dis = [e for e in group if first_match(dismissive, e.text)]
        acc = [e for e in group if e.text and e not in dis]
        for d in dis:
            best = None
            for a in acc:
                ref = local_background([a, d], elements, screen)
                why = saliency_over(a, d, ref, rules.params)
                score = contrast(a.bg_color, ref or d.bg_color)
                if why and (best is None or score > best[2]):
                    best = (a, why, score)
            if best:
                a, why, _ = best
                evidence = [(a, f"{why}:salient_option"), (d, "text:dismissive"), (a, f"group:{gid}")]
                out.append(_finding(rule, screen, evidence, text=a.text, other=d.text))
    return out


def _small_close(rule, screen, elements, rules):
    limit = rules.params.small_close_ratio * screen.width
    out = []
    for e in elements:
        if e.icon in rule.icons and e.bbox.width < limit and e.bbox.height < limit:
            out.append(_finding(rule, screen, [(e, f"icon:{e.icon.value}")]))
    return out


def _privacy_zuckering(rule, screen, elements, rules):
    out = []
    for hit in _text_hits(elements, rule.slot("data"), "data"):
        evidence = [hit]
        if Stage.STATUS not in screen.disabled:
            w = adjacent_widget(hit[0], elements, rules.params)
            if w is not None and w.status == WidgetStatus.CHECKED:
                evidence.append((w, "status:checked"))
        out.append(_finding(rule, screen, evidence))
    return out


def _countdown_ad(rule, screen, elements, rules):
    indicators = ad_indicators(elements, rules, screen)
    if not indicators:
        return []
    out = []
    for hit in _text_hits(elements, rule.slot("countdown"), "countdown"):
        others = [i for i in indicators if i[0].id != hit[0].id]
        if not others:
            continue
        nearest = min(others, key=lambda i: math.dist(i[0].bbox.center, hit[0].bbox.center))
        out.append(_finding(rule, screen, [hit, nearest]))
    return out


RULE_BODIES: dict[DPType, Callable] = {
    DPType.NG_POPUP_AD: _popup_ad,
    DPType.NG_RATE: _rate,
    DPType.NG_UPGRADE: _upgrade,
    DPType.OB_INTERMEDIATE_CURRENCY: _currency,
    DPType.SN_FORCED_CONTINUITY: _forced_continuity,
    DPType.II_PRESELECTION_CHECKED: _preselection_checked,
    DPType.II_PRESELECTION_NO_CHECKBOX: _no_checkbox,
    DPType.II_FALSE_HIERARCHY: _false_hierarchy,
    DPType.II_DISGUISED_AD: _disguised_ad,
    DPType.II_SMALL_CLOSE: _small_close,
    DPType.FA_SOCIAL_PYRAMID: _per_element_text("invite"),
    DPType.FA_PRIVACY_ZUCKERING: _privacy_zuckering,
    DPType.FA_GAMIFICATION: _per_element_text("reward"),
    DPType.FA_COUNTDOWN_AD: _countdown_ad,
    DPType.FA_WATCH_AD: _per_element_text("watch"),
    DPType.FA_PAY_AVOID_ADS: _per_element_text("pay"),
}


def evaluate_rule(rule: RuleSpec, screen: Screen, rules: RuleSet) -> RuleResult:
    missing = rule.missing_stage(screen.disabled)
    if missing:
        return RuleResult(notes=[f"abstained({rule.dp_type.value}, {missing})"])
    elements = canonical(screen.elements)
    return RuleResult(findings=RULE_BODIES[rule.dp_type](rule, screen, elements, rules))


def finding_order(f: Finding):
    strategies = list(type(f.strategy))
    return (strategies.index(f.strategy), list(DPType).index(f.dp_type), f.container.y1, f.container.x1,
            f.container.y2, f.container.x2)


def merge_duplicates(findings: list[Finding], screen: Screen, threshold: float) -> list[Finding]:
    merged: list[Finding] = []
    for f in sorted(findings, key=finding_order):
        for m in merged:
            if m.dp_type == f.dp_type and iou(m.container, f.container) >= threshold:
                m.evidence.extend(ev for ev in f.evidence if ev not in m.evidence)
                boxes = [screen.element(eid).bbox for eid, _ in m.evidence]
                m.container = union_box(boxes).clip(screen.width, screen.height)
                break
        else:
            merged.append(Finding(f.dp_type, f.container, list(f.evidence), f.explanation))
    if len(merged) < len(findings):
        # a grown container may now overlap a neighbour
        return merge_duplicates(merged, screen, threshold)
    return sorted(merged, key=finding_order)


def check_screen(screen: Screen, rules: RuleSet, notes: Optional[list] = None) -> list[Finding]:
    findings = []
    for rule in rules.enabled():
        result = evaluate_rule(rule, screen, rules)
        findings.extend(result.findings)
        if notes is not None:
            notes.extend(result.notes)
    return merge_duplicates(findings, screen, rules.params.dedup_iou)
