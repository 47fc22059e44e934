"""Draw findings on the screenshot: red boxes, index tags, and a legend strip."""

from __future__ import annotations

import textwrap
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from .checker import Finding

RED = (230, 20, 20)


def render_overlay(image: np.ndarray, findings: list[Finding], path: Path) -> None:
    base = Image.fromarray(np.asarray(image, dtype=np.uint8)).convert("RGB")
    font = ImageFont.load_default()
    width = base.width
    legend = []
    for i, f in enumerate(findings, 1):
        wrapped = textwrap.wrap(f"{i}. [{f.dp_type.value}] {f.explanation}", width=max(20, width // 7))
        legend.extend(wrapped or [""])
    line_h = 14
    canvas = Image.new("RGB", (width, base.height + line_h * len(legend) + (8 if legend else 0)), (255, 255, 255))
    canvas.paste(base, (0, 0))
    draw = ImageDraw.Draw(canvas)
    for i, f in enumerate(findings, 1):
        c = f.container
        draw.rectangle([c.x1, c.y1, max(c.x1, c.x2 - 1), max(c.y1, c.y2 - 1)], outline=RED, width=3)
        draw.rectangle([c.x1, c.y1, c.x1 + 16, c.y1 + 14], fill=RED)
        draw.text((c.x1 + 3, c.y1 + 1), str(i), fill=(255, 255, 255), font=font)
    y = base.height + 4
    for line in legend:
        draw.text((4, y), line, fill=(0, 0, 0), font=font)
        y += line_h
    canvas.save(path)
