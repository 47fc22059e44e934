"""Finding-vs-ground-truth matching and detection metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .geometry import BBox, iou
from .model import ElementType, Stage
from .rules import STRATEGY_NAMES, DPType, Strategy

DEFAULT_MATCH_IOU = 0.5

ALL_STAGES = frozenset(Stage)
# cumulative configurations, weakest first: the label and the stages switched off
ABLATION_LADDER: tuple[tuple[str, frozenset], ...] = (
    ("Base Model (Text-only)", ALL_STAGES),
    ("+ Icon Semantic", ALL_STAGES - {Stage.ICON}),
    ("+ Template Matching", frozenset({Stage.STATUS, Stage.COLOR_GROUPING})),
    ("+ Status Recognition", frozenset({Stage.COLOR_GROUPING})),
    ("+ Color&Grouping", frozenset()),
)


@dataclass(frozen=True)
class GroundTruthInstance:
    dp_type: DPType
    container: BBox
    elements: tuple[tuple[BBox, ElementType], ...] = ()


@dataclass
class TypeCounts:
    n_gt: int = 0
    n_det: int = 0
    tp: int = 0

    @property
    def fp(self) -> int:
        return self.n_det - self.tp

    @property
    def fn(self) -> int:
        return self.n_gt - self.tp

    def __add__(self, other: "TypeCounts") -> "TypeCounts":
        return TypeCounts(self.n_gt + other.n_gt, self.n_det + other.n_det, self.tp + other.tp)


@dataclass
class EvalCounts:
    per_type: dict[DPType, TypeCounts] = field(default_factory=dict)

    def __getitem__(self, dp_type: DPType) -> TypeCounts:
        return self.per_type.get(dp_type, TypeCounts())

    def __add__(self, other: "EvalCounts") -> "EvalCounts":
        out = {t: c + TypeCounts() for t, c in self.per_type.items()}
        for t, c in other.per_type.items():
            out[t] = out.get(t, TypeCounts()) + c
        return EvalCounts(out)

    def total(self, types: Optional[Iterable[DPType]] = None) -> TypeCounts:
        acc = TypeCounts()
        types = None if types is None else set(types)
        for t, c in self.per_type.items():
            if types is None or t in types:
                acc = acc + c
        return acc

    @classmethod
    def from_rates(cls, rows: dict[DPType, tuple[float, int, int]]) -> "EvalCounts":
        """Rebuild integer counts from published ``(precision, n_det, n_gt)`` rows."""
        return cls({t: TypeCounts(n_gt=gt, n_det=det, tp=round(p * det)) for t, (p, det, gt) in rows.items()})


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float
    n_gt: int = 0
    n_det: int = 0
    tp: int = 0


@dataclass
class MetricsReport:
    per_type: dict[DPType, PRF]
    per_strategy: dict[Strategy, PRF]
    macro: PRF
    micro: PRF
    binary_accuracy: Optional[float] = None


def _ratio(a: float, b: float) -> float:
    return a / b if b else 0.0


def prf(c: TypeCounts) -> PRF:
    p = _ratio(c.tp, c.n_det)
    r = _ratio(c.tp, c.n_gt)
    return PRF(p, r, _ratio(2 * p * r, p + r), c.n_gt, c.n_det, c.tp)


def match_findings(findings: Sequence, gts: Sequence, iou_threshold: float = DEFAULT_MATCH_IOU) -> EvalCounts:
    """Greedy one-to-one matching for a single screen.

    ``findings`` and ``gts`` only need ``dp_type`` and ``container``.
    Findings are visited in (type, y1, x1) order and each takes the unmatched
    same-type ground truth it overlaps most.
    """
    types = list(DPType)
    counts: dict[DPType, TypeCounts] = {}
    for g in gts:
        counts.setdefault(g.dp_type, TypeCounts()).n_gt += 1
    used = [False] * len(gts)
    for f in sorted(findings, key=lambda f: (types.index(f.dp_type), f.container.y1, f.container.x1,
                                             f.container.y2, f.container.x2)):
        c = counts.setdefault(f.dp_type, TypeCounts())
        c.n_det += 1
        best, best_iou = None, -1.0
        for j, g in enumerate(gts):
            if used[j] or g.dp_type != f.dp_type:
                continue
            v = iou(f.container, g.container)
            if v >= iou_threshold and v > best_iou:
                best, best_iou = j, v
        if best is not None:
            used[best] = True
            c.tp += 1
    return EvalCounts(counts)


def metrics(counts: EvalCounts) -> MetricsReport:
    per_type = {t: prf(c) for t, c in sorted(counts.per_type.items(), key=lambda kv: list(DPType).index(kv[0]))}
    per_strategy = {}
    for s in Strategy:
        c = counts.total(t for t in DPType if t.strategy == s)
        if c.n_gt or c.n_det:
            per_strategy[s] = prf(c)
    total = counts.total()
    if per_strategy:
        vals = list(per_strategy.values())
        macro = PRF(sum(v.precision for v in vals) / len(vals),
                    sum(v.recall for v in vals) / len(vals),
                    sum(v.f1 for v in vals) / len(vals),
                    total.n_gt, total.n_det, total.tp)
    else:
        macro = PRF(0.0, 0.0, 0.0)
    return MetricsReport(per_type, per_strategy, macro, prf(total))


def binary_accuracy(per_screen_results: Iterable[tuple[int, int]]) -> float:
    """Screen-level accuracy from ``(n_ground_truth, n_findings)`` pairs; >=1 means malicious."""
    total = correct = 0
    for n_gt, n_found in per_screen_results:
        total += 1
        correct += (n_gt > 0) == (n_found > 0)
    return _ratio(correct, total)


def run_ablation(inputs: Sequence, gts: Sequence[Sequence[GroundTruthInstance]], analyze,
                 ladder=ABLATION_LADDER, iou_threshold: float = DEFAULT_MATCH_IOU) -> list[tuple[str, MetricsReport]]:
    """Evaluate each cumulative stage configuration.

    ``analyze(input, disabled_stages)`` must return the findings for one screen.
    """
    out = []
    for label, disabled in ladder:
        counts = EvalCounts()
        pairs = []
        for item, gt in zip(inputs, gts):
            found = analyze(item, disabled)
            counts = counts + match_findings(found, gt, iou_threshold)
            pairs.append((len(gt), len(found)))
        report = metrics(counts)
        report.binary_accuracy = binary_accuracy(pairs)
        out.append((label, report))
    return out


def format_table(report: MetricsReport) -> str:
    """Console table: one row per type, then strategies, then macro/micro."""
    head = f"{'DP Type':<32} {'#GT':>6} {'#Det':>6} {'P':>6} {'R':>6} {'F1':>6}"
    rule = "-" * len(head)

    def row(name, m: PRF):
        return f"{name:<32} {m.n_gt:>6} {m.n_det:>6} {m.precision:>6.2f} {m.recall:>6.2f} {m.f1:>6.2f}"

    lines = [head, rule]
    lines += [row(t.value, m) for t, m in report.per_type.items()]
    lines.append(rule)
    lines += [row(f"{STRATEGY_NAMES[s]} ({s.value})", m) for s, m in report.per_strategy.items()]
    lines.append(rule)
    lines.append(row("Macro Average", report.macro))
    lines.append(row("Micro Average", report.micro))
    if report.binary_accuracy is not None:
        lines.append(f"Binary screen accuracy: {report.binary_accuracy:.4f}")
    return "\n".join(lines)


def format_ablation(rows: list[tuple[str, MetricsReport]]) -> str:
    strategies = [s for s in Strategy if s != Strategy.OB]
    head = f"{'Method':<26}" + "".join(f" {s.value + ' P/R/F1':>16}" for s in strategies) + f" {'Overall P/R/F1':>16}"
    lines = [head, "-" * len(head)]
    for label, rep in rows:
        cells = []
        for s in strategies:
            m = rep.per_strategy.get(s, PRF(0.0, 0.0, 0.0))
            cells.append(f"{m.precision:.2f}/{m.recall:.2f}/{m.f1:.2f}")
        cells.append(f"{rep.macro.precision:.2f}/{rep.macro.recall:.2f}/{rep.macro.f1:.2f}")
        lines.append(f"{label:<26}" + "".join(f" {c:>16}" for c in cells))
    return "\n".join(lines)
