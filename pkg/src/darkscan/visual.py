"""Pixel-level analysis: ad-icon template matching and element colors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import numpy as np
from PIL import Image
from scipy.ndimage import maximum_filter
from scipy.signal import fftconvolve

from .geometry import BBox, iou
from .model import RGB, IconClass

DEFAULT_SCALES = (0.75, 1.0, 1.25, 1.5)
DEFAULT_NCC_THRESHOLD = 0.8
COLLAPSE_IOU = 0.3
COLOR_LEVELS = 32
FG_MIN_SHARE = 0.02
# windows flatter than this (gray-level variance per pixel) score 0
_FLAT_VARIANCE = 1e-2


@dataclass(frozen=True)
class Template:
    name: IconClass
    patch: np.ndarray  # float64 grayscale, shape (h, w)

    @property
    def size(self) -> tuple[int, int]:
        h, w = self.patch.shape
        return w, h

    def scaled(self, scale: float) -> np.ndarray:
        if scale == 1.0:
            return self.patch
        w, h = self.size
        size = (max(1, round(w * scale)), max(1, round(h * scale)))
        img = Image.fromarray(self.patch.astype(np.float32))
        return np.asarray(img.resize(size, Image.BILINEAR), dtype=np.float64)


class TemplateHit(NamedTuple):
    bbox: BBox
    icon: IconClass
    score: float


class ColorPair(NamedTuple):
    background: RGB
    foreground: RGB


def to_gray(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        return image
    return image[..., 0] * 0.299 + image[..., 1] * 0.587 + image[..., 2] * 0.114


def load_templates(directory: Optional[Path] = None) -> list[Template]:
    """Load ``<icon>.png`` patches; the bundled ones when ``directory`` is None."""
    if directory is None:
        root = resources.files("darkscan") / "data" / "templates"
        paths = [p for p in root.iterdir() if p.name.endswith(".png")]
    else:
        paths = sorted(Path(directory).glob("*.png"))
    out = []
    for p in sorted(paths, key=lambda p: p.name):
        name = p.name[:-4]
        with p.open("rb") as fh:
            patch = to_gray(np.asarray(Image.open(fh).convert("RGB")))
        out.append(Template(IconClass(name), patch))
    return out


def _integral(a: np.ndarray) -> np.ndarray:
    s = np.zeros((a.shape[0] + 1, a.shape[1] + 1))
    s[1:, 1:] = a.cumsum(0).cumsum(1)
    return s


def _window_sums(s: np.ndarray, h: int, w: int) -> np.ndarray:
    return s[h:, w:] - s[:-h, w:] - s[h:, :-w] + s[:-h, :-w]


class _Prepared(NamedTuple):
    centered: np.ndarray
    sums: np.ndarray
    squares: np.ndarray


def _prepare(gray: np.ndarray) -> _Prepared:
    g = gray - gray.mean()
    return _Prepared(g, _integral(g), _integral(g * g))


def ncc_map(gray: np.ndarray, patch: np.ndarray, prepared: Optional[_Prepared] = None) -> np.ndarray:
    """Zero-mean normalized cross-correlation for every valid placement of ``patch``.

    Entry ``[y, x]`` scores the window whose top-left corner is ``(x, y)``.
    Zero-variance windows (or a flat template) score 0.
    """
    h, w = patch.shape
    n = h * w
    t = patch - patch.mean()
    t_energy = float((t * t).sum())
    out_shape = (gray.shape[0] - h + 1, gray.shape[1] - w + 1)
    if t_energy <= _FLAT_VARIANCE * n:
        return np.zeros(out_shape)
    g, i1, i2 = prepared if prepared is not None else _prepare(gray)
    num = fftconvolve(g, t[::-1, ::-1], mode="valid")
    s1 = _window_sums(i1, h, w)
    var = _window_sums(i2, h, w) - s1 * s1 / n
    flat = var <= _FLAT_VARIANCE * n
    score = num / np.sqrt(np.where(flat, 1.0, var) * t_energy)
    score[flat] = 0.0
    return np.clip(score, -1.0, 1.0)


def match_templates(image: np.ndarray, templates: Sequence[Template],
                    scales: Sequence[float] = DEFAULT_SCALES,
                    ncc_threshold: float = DEFAULT_NCC_THRESHOLD,
                    warnings: Optional[list] = None) -> list[TemplateHit]:
    gray = to_gray(image)
    prepared = _prepare(gray)
    raw: list[TemplateHit] = []
    for tpl in templates:
        for scale in scales:
            patch = tpl.scaled(scale)
            h, w = patch.shape
            if h > gray.shape[0] or w > gray.shape[1]:
                if warnings is not None:
                    warnings.append(f"warning: template {tpl.name.value} at scale {scale} exceeds image; skipped")
                continue
            score = ncc_map(gray, patch, prepared)
            if score.max() < ncc_threshold:
                continue
            peaks = (score >= ncc_threshold) & (score == maximum_filter(score, size=(h // 2 * 2 + 1, w // 2 * 2 + 1)))
            for y, x in zip(*np.nonzero(peaks)):
                raw.append(TemplateHit(BBox(int(x), int(y), int(x) + w, int(y) + h), tpl.name, float(score[y, x])))
    raw.sort(key=lambda hit: (-hit.score, hit.bbox.as_list(), hit.icon.value))
    kept: list[TemplateHit] = []
    for hit in raw:
        if all(iou(hit.bbox, k.bbox) < COLLAPSE_IOU for k in kept):
            kept.append(hit)
    kept.sort(key=lambda hit: (hit.bbox.y1, hit.bbox.x1, hit.icon.value))
    return kept


def extract_colors(crop: np.ndarray, levels: int = COLOR_LEVELS, fg_min_share: float = FG_MIN_SHARE) -> ColorPair:
    """Background = most common quantized color; foreground = the farthest well-populated other color."""
    px = np.asarray(crop)
    if px.ndim != 3 or px.shape[0] == 0 or px.shape[1] == 0:
        raise ValueError("extract_colors needs a non-empty RGB crop")
    px = px[..., :3].reshape(-1, 3).astype(np.int64)
    q = px * levels // 256
    keys = (q[:, 0] * levels + q[:, 1]) * levels + q[:, 2]
    size = levels ** 3
    counts = np.bincount(keys, minlength=size)
    sums = np.stack([np.bincount(keys, weights=px[:, c], minlength=size) for c in range(3)], axis=1)
    used = counts > 0
    reps = np.zeros((size, 3))
    reps[used] = sums[used] / counts[used, None]
    # argmax breaks count ties toward the lowest bucket key
    bg_idx = int(np.argmax(counts))
    bg = reps[bg_idx]
    eligible = used & (counts >= fg_min_share * len(px))
    eligible[bg_idx] = False
    if not eligible.any():
        fg = bg
    else:
        dist = np.where(eligible, np.linalg.norm(reps - bg, axis=1), -1.0)
        fg = reps[int(np.argmax(dist))]
    return ColorPair(_rgb(bg), _rgb(fg))


def _rgb(v) -> RGB:
    return (int(round(v[0])), int(round(v[1])), int(round(v[2])))


def contrast(a: RGB, b: RGB) -> float:
    return math.dist(a, b)
