"""Regenerate the bundled ad-icon template patches (24x24 PNG)."""

from pathlib import Path

from PIL import Image, ImageDraw

OUT = Path(__file__).resolve().parents[1] / "src" / "darkscan" / "data" / "templates"
SIZE = 24


def ad_choices_triangle() -> Image.Image:
    # right-pointing triangle with an "i" stem and dot, in AdChoices blue
    img = Image.new("RGB", (SIZE, SIZE), (255, 255, 255))
    d = ImageDraw.Draw(img)
    blue = (0, 174, 205)
    d.polygon([(3, 2), (3, 21), (21, 11)], outline=blue, fill=None, width=2)
    d.rectangle([8, 10, 9, 16], fill=blue)
    d.rectangle([8, 6, 9, 7], fill=blue)
    return img


def ad_close() -> Image.Image:
    # dark X inside a light box with a darker frame
    img = Image.new("RGB", (SIZE, SIZE), (230, 230, 230))
    d = ImageDraw.Draw(img)
    d.rectangle([0, 0, SIZE - 1, SIZE - 1], outline=(120, 120, 120), width=1)
    d.line([(6, 6), (17, 17)], fill=(40, 40, 40), width=2)
    d.line([(6, 17), (17, 6)], fill=(40, 40, 40), width=2)
    return img


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    ad_choices_triangle().save(OUT / "ad_choices_triangle.png")
    ad_close().save(OUT / "ad_close.png")
    print("wrote", sorted(p.name for p in OUT.glob("*.png")))
