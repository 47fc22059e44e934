"""Command-line entry points: ``darkscan analyze`` and ``darkscan evaluate``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import ConfigError, load_config
from .evaluation import (EvalCounts, binary_accuracy, format_ablation, format_table, match_findings, metrics,
                         run_ablation)
from .io import SchemaError, load_ground_truth, parse_report, report_dict, report_findings, serialize_report
from .model import Stage
from .pipeline import ScreenInput, analyze_files
from .rules import RulesFileError

EXIT_OK, EXIT_MISSING, EXIT_SCHEMA, EXIT_INTERNAL = 0, 2, 3, 4
IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".webp"}

log = logging.getLogger("darkscan")


class InputMissing(Exception):
    pass


def _require(path: Path, what: str) -> Path:
    if not path.exists():
        raise InputMissing(f"{what} not found: {path}")
    return path


def _analyze_one(item: ScreenInput, config, overlay: Path | None) -> str:
    from .overlay import render_overlay

    _require(item.image, "image")
    _require(item.elements, "element sidecar")
    if item.ocr is not None:
        _require(item.ocr, "OCR sidecar")
    result = analyze_files(item, config)
    name = item.image.name
    text = serialize_report(report_dict(name, result.screen.width, result.screen.height, result.findings, result.notes))
    if overlay is not None:
        render_overlay(result.screen.image, result.findings, overlay)
    return text


def _config(args):
    return load_config(_require(args.config, "config file") if args.config else None)


def cmd_analyze(args) -> int:
    config = _config(args)
    if args.rules:
        config = dataclasses.replace(config, rules_file=_require(args.rules, "rules file"))
    if args.disable:
        config = config.without(set(config.disabled) | {Stage(s) for s in args.disable})
    target = _require(args.image, "image")

    if target.is_dir():
        images = sorted(p for p in target.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
        out_dir = args.out or target / "reports"
        out_dir.mkdir(parents=True, exist_ok=True)
        items = [ScreenInput.beside(p) for p in images]
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            texts = list(pool.map(lambda it: _analyze_one(it, config, None), items))
        for item, text in zip(items, texts):
            (out_dir / (item.image.stem + ".findings.json")).write_text(text, encoding="utf-8")
        print(f"wrote {len(texts)} reports to {out_dir}")
        return EXIT_OK

    default = ScreenInput.beside(target)
    item = ScreenInput(target, args.elements or default.elements, args.ocr or default.ocr)
    text = _analyze_one(item, config, args.overlay)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _metrics_json(report) -> dict:
    def prf(m):
        return {"precision": round(m.precision, 4), "recall": round(m.recall, 4), "f1": round(m.f1, 4),
                "n_gt": m.n_gt, "n_det": m.n_det, "tp": m.tp}

    return {
        "per_type": {t.value: prf(m) for t, m in report.per_type.items()},
        "per_strategy": {s.value: prf(m) for s, m in report.per_strategy.items()},
        "macro": prf(report.macro),
        "micro": prf(report.micro),
        "binary_accuracy": None if report.binary_accuracy is None else round(report.binary_accuracy, 4),
    }


def cmd_evaluate(args) -> int:
    config = _config(args)
    gt_dir = _require(args.gt, "ground-truth directory")
    pred_dir = _require(args.pred, "prediction directory")
    gt_files = sorted(gt_dir.glob("*.json"))
    preds = {}
    for p in sorted(pred_dir.glob("*.json")):
        rep = parse_report(p.read_text(encoding="utf-8"), str(p))
        preds[rep.image] = report_findings(rep)

    counts = EvalCounts()
    pairs = []
    gts, images = [], []
    for g in gt_files:
        image, instances = load_ground_truth(g)
        found = preds.get(image, [])
        counts = counts + match_findings(found, instances, config.eval_iou)
        pairs.append((len(instances), len(found)))
        gts.append(instances)
        images.append(g.parent / image)
    report = metrics(counts)
    report.binary_accuracy = binary_accuracy(pairs)
    print(format_table(report))
    out = {"metrics": _metrics_json(report)}

    if args.ablation:
        screens_dir = args.screens or gt_dir
        items = [ScreenInput.beside(screens_dir / img.name) for img in images]
        for it in items:
            _require(it.image, "image")
            _require(it.elements, "element sidecar")
        rows = run_ablation(items, gts, lambda it, off: analyze_files(it, config.without(off)).findings,
                            iou_threshold=config.eval_iou)
        print()
        print(format_ablation(rows))
        out["ablation"] = [{"config": label, "metrics": _metrics_json(rep)} for label, rep in rows]
    if args.out:
        args.out.write_text(json.dumps(out, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="darkscan", description="Detect dark patterns in mobile UI screenshots.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze one screenshot (or a directory of them)")
    a.add_argument("image", type=Path)
    a.add_argument("--elements", type=Path, help="element sidecar (default: <stem>.elements.json)")
    a.add_argument("--ocr", type=Path, help="OCR sidecar (default: <stem>.ocr.json if present)")
    a.add_argument("--rules", type=Path)
    a.add_argument("--config", type=Path)
    a.add_argument("--out", type=Path, help="report path (directory mode: output directory)")
    a.add_argument("--overlay", type=Path, help="write an annotated PNG here")
    a.add_argument("--disable", action="append", choices=[s.value for s in Stage], default=[])
    a.add_argument("--workers", type=int, default=4)
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("evaluate", help="score findings reports against ground truth")
    e.add_argument("--pred", type=Path, required=True)
    e.add_argument("--gt", type=Path, required=True)
    e.add_argument("--ablation", action="store_true", help="also re-run the five cumulative stage configurations")
    e.add_argument("--screens", type=Path, help="images and sidecars for --ablation (default: the --gt directory)")
    e.add_argument("--config", type=Path)
    e.add_argument("--out", type=Path, help="write metrics JSON here")
    e.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputMissing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (SchemaError, ConfigError, RulesFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
