"""Hand-built fixture screens: rendered PNG, element sidecar and expected findings.

Each builder returns a :class:`Canvas`. Elements go into the sidecar as an
annotation-backed detector would report them; ``paste_template`` draws an ad
icon that is deliberately absent from the sidecar, so only template matching
can find it. ``expect`` records the ground-truth container of each instance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from darkscan.evaluation import GroundTruthInstance
from darkscan.geometry import BBox
from darkscan.io import dump_ground_truth
from darkscan.rules import DPType

W, H = 540, 960
WHITE = (255, 255, 255)
BLACK = (20, 20, 20)
GRAY_TEXT = (117, 117, 117)
BLUE = (33, 150, 243)
ORANGE = (255, 112, 67)
DIM = (96, 96, 96)


def _font(size):
    return ImageFont.load_default(size=size)


@dataclass
class Canvas:
    name: str
    bg: tuple = WHITE
    elements: list = field(default_factory=list)
    expected: list = field(default_factory=list)

    def __post_init__(self):
        self.img = Image.new("RGB", (W, H), self.bg)
        self.draw = ImageDraw.Draw(self.img)
        self._add(BBox(16, 8, 70, 30), "TextView", text="9:41", fg=BLACK, size=16, bg=self.bg)

    def _add(self, box, etype, text=None, fg=BLACK, size=18, bg=None, **extra):
        box = BBox(*box) if not isinstance(box, BBox) else box
        if bg is not None:
            self.draw.rectangle([box.x1, box.y1, box.x2 - 1, box.y2 - 1], fill=bg)
        if text:
            f = _font(size)
            l, t, r, b = self.draw.textbbox((0, 0), text, font=f)
            x = box.x1 + max(2, (box.width - (r - l)) // 2) - l
            y = box.y1 + (box.height - (b - t)) // 2 - t
            self.draw.text((x, y), text, fill=fg, font=f)
        rec = {"bbox": box.as_list(), "type": etype}
        if text:
            rec["text"] = text
        rec.update(extra)
        self.elements.append(rec)
        return box

    # widgets -------------------------------------------------------------
    def text(self, box, text, fg=BLACK, size=18, etype="TextView"):
        return self._add(box, etype, text=text, fg=fg, size=size)

    def button(self, box, text, bg=BLUE, fg=WHITE, size=18):
        return self._add(box, "Button", text=text, fg=fg, size=size, bg=bg)

    def panel(self, box, fill, etype="ImageView", icon=None):
        b = self._add(box, etype, bg=fill)
        if icon is not None:
            self.elements[-1]["icon"] = icon
        return b

    def photo(self, box, seed, etype="ImageView"):
        box = BBox(*box)
        rng = np.random.default_rng(seed)
        # smooth two-tone gradient so the patch is not flat
        ys = np.linspace(0, 1, box.height)[:, None, None]
        xs = np.linspace(0, 1, box.width)[None, :, None]
        c1, c2 = rng.integers(60, 200, 3), rng.integers(60, 200, 3)
        arr = (c1 * (1 - ys) * (1 - xs / 2) + c2 * ys * (0.5 + xs / 2)).astype(np.uint8)
        self.img.paste(Image.fromarray(arr), (box.x1, box.y1))
        self.elements.append({"bbox": box.as_list(), "type": etype})
        return box

    def star(self, box, color=(255, 193, 7)):
        box = BBox(*box)
        cx, cy = box.center
        r1, r2 = box.width / 2 - 2, box.width / 5
        pts = []
        for i in range(10):
            ang = np.pi / 2 + i * np.pi / 5
            r = r1 if i % 2 == 0 else r2
            pts.append((cx + r * np.cos(ang), cy - r * np.sin(ang)))
        self.draw.polygon(pts, fill=color)
        rec = {"bbox": box.as_list(), "type": "ImageButton", "icon": "star"}
        self.elements.append(rec)
        return box

    def icon(self, box, icon, etype="ImageButton", color=BLACK):
        box = BBox(*box)
        if icon == "close":
            self.draw.line([(box.x1 + 3, box.y1 + 3), (box.x2 - 4, box.y2 - 4)], fill=color, width=2)
            self.draw.line([(box.x1 + 3, box.y2 - 4), (box.x2 - 4, box.y1 + 3)], fill=color, width=2)
        else:
            self.draw.ellipse([box.x1 + 4, box.y1 + 4, box.x2 - 5, box.y2 - 5], outline=color, width=3)
        rec = {"bbox": box.as_list(), "type": etype, "icon": icon}
        self.elements.append(rec)
        return box

    def checkbox(self, box, status, etype="Checkbox"):
        box = BBox(*box)
        on = status == "checked"
        if etype == "Switch":
            self.draw.rounded_rectangle([box.x1, box.y1 + 8, box.x2 - 1, box.y2 - 9], radius=10,
                                        fill=BLUE if on else (200, 200, 200))
            kx = box.x2 - box.height // 2 - 2 if on else box.x1 + 2
            self.draw.ellipse([kx, box.y1 + 4, kx + box.height - 8, box.y2 - 5], fill=WHITE, outline=(150, 150, 150))
        else:
            self.draw.rectangle([box.x1 + 4, box.y1 + 4, box.x2 - 5, box.y2 - 5], outline=BLUE, width=3,
                                fill=BLUE if on else None)
            if on:
                self.draw.line([(box.x1 + 10, box.center[1]), (box.center[0] - 2, box.y2 - 12),
                                (box.x2 - 10, box.y1 + 10)], fill=WHITE, width=3)
        rec = {"bbox": box.as_list(), "type": etype, "status": status}
        self.elements.append(rec)
        return box

    def paste_template(self, name, xy, scale=1.0):
        src = Image.open(Path(__file__).resolve().parents[1] / "src/darkscan/data/templates" / f"{name}.png")
        w, h = round(src.width * scale), round(src.height * scale)
        self.img.paste(src.resize((w, h), Image.BILINEAR), xy)
        return BBox(xy[0], xy[1], xy[0] + w, xy[1] + h)

    # ground truth ---------------------------------------------------------
    def expect(self, dp_type: DPType, box):
        box = BBox(*box) if not isinstance(box, BBox) else box
        self.expected.append(GroundTruthInstance(dp_type, box))

    def save(self, directory: Path) -> Path:
        directory.mkdir(parents=True, exist_ok=True)
        image = directory / f"{self.name}.png"
        self.img.save(image)
        sidecar = {"image": image.name, "width": W, "height": H, "elements": self.elements}
        (directory / f"{self.name}.elements.json").write_text(json.dumps(sidecar, indent=1))
        return image

    def save_gt(self, directory: Path) -> Path:
        directory.mkdir(parents=True, exist_ok=True)
        p = directory / f"{self.name}.json"
        p.write_text(dump_ground_truth(f"{self.name}.png", self.expected))
        return p


def dialog(c: Canvas, box, title=None):
    """Dim the page and draw a white dialog panel (detected as an ImageView backdrop)."""
    c.draw.rectangle([0, 40, W - 1, H - 1], fill=DIM)
    b = c.panel(box, WHITE)
    if title:
        c.text((b.x1 + 20, b.y1 + 16, b.x2 - 20, b.y1 + 50), title, size=20)
    return b


def list_rows(c: Canvas, labels, y0=80, step=64, x1=32, x2=508):
    boxes = []
    for i, label in enumerate(labels):
        y = y0 + i * step
        boxes.append(c.text((x1, y, x2, y + 40), label))
    return boxes
