"""UI domain model: element types, icon vocabulary, widget status, screens."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .geometry import BBox

RGB = tuple[int, int, int]


class ElementType(str, Enum):
    BUTTON = "Button"
    IMAGE_VIEW = "ImageView"
    IMAGE_BUTTON = "ImageButton"
    TEXT_VIEW = "TextView"
    CHECKBOX = "Checkbox"
    SWITCH = "Switch"
    TOGGLE_BUTTON = "ToggleButton"
    EDIT_TEXT = "EditText"
    RADIO_BUTTON = "RadioButton"
    SPINNER = "Spinner"
    SEEK_BAR = "SeekBar"
    PROGRESS_BAR = "ProgressBar"
    RATING_BAR = "RatingBar"
    VIDEO_VIEW = "VideoView"
    WEB_VIEW = "WebView"
    # OCR output before it is merged into detections
    TEXT_LINE = "TextLine"
    UNKNOWN = "Unknown"


TEXTUAL_TYPES = frozenset({ElementType.TEXT_VIEW, ElementType.BUTTON, ElementType.EDIT_TEXT})
ICON_TYPES = frozenset({ElementType.IMAGE_VIEW, ElementType.IMAGE_BUTTON})
STATUS_TYPES = frozenset({ElementType.CHECKBOX, ElementType.SWITCH, ElementType.TOGGLE_BUTTON})
GROUPABLE_TYPES = frozenset({ElementType.TEXT_VIEW, ElementType.BUTTON, ElementType.IMAGE_BUTTON})


# 81 classifier labels, drawn from the Rico semantic icon annotations.
CLASSIFIER_ICONS = (
    "add", "arrow_backward", "arrow_downward", "arrow_forward", "arrow_upward",
    "attach_file", "av_forward", "av_rewind", "avatar", "bluetooth", "book",
    "bookmark", "build", "call", "camera", "cart", "chat", "check", "close",
    "compare", "copy", "dashboard", "date_range", "delete", "description",
    "dialpad", "edit", "email", "emoji", "expand_less", "expand_more", "explore",
    "facebook", "favorite", "file_download", "filter", "filter_list", "flash",
    "flight", "folder", "follow", "gift", "globe", "group", "help", "history",
    "home", "info", "label", "launch", "layers", "list", "location", "lock",
    "menu", "microphone", "minus", "more", "music", "national_flag", "network_wifi",
    "notifications", "pause", "photo", "play", "refresh", "repeat", "reply",
    "search", "send", "settings", "share", "shop", "skip_next", "skip_previous",
    "star", "thumbs_up", "time", "twitter", "videocam", "volume",
)
assert len(CLASSIFIER_ICONS) == 81

TEMPLATE_ICONS = ("ad_choices_triangle", "ad_close")

IconClass = Enum(
    "IconClass",
    [(name.upper(), name) for name in (*CLASSIFIER_ICONS, "other", *TEMPLATE_ICONS)],
    type=str,
)
IconClass.__doc__ = "Icon semantic label; the two ``ad_*`` members come only from template matching."

AD_ICONS = frozenset({IconClass("ad_choices_triangle"), IconClass("ad_close")})
CLOSE_ICONS = frozenset({IconClass("close"), IconClass("ad_close")})


class WidgetStatus(str, Enum):
    CHECKED = "checked"
    UNCHECKED = "unchecked"
    NOT_APPLICABLE = "not_applicable"
    UNKNOWN = "unknown"


class Stage(str, Enum):
    """Optional property-extraction stages; text, coordinates and types are always on."""

    ICON = "icon"
    TEMPLATE = "template"
    STATUS = "status"
    COLOR_GROUPING = "color_grouping"


@dataclass
class UIElement:
    bbox: BBox
    etype: ElementType
    text: Optional[str] = None
    confidence: float = 1.0
    icon: Optional[IconClass] = None
    status: WidgetStatus = WidgetStatus.NOT_APPLICABLE
    bg_color: Optional[RGB] = None
    fg_color: Optional[RGB] = None
    group_id: Optional[int] = None
    id: int = -1
    # which module produced the element: "detector", "ocr" or "template"
    source: str = "detector"

    def copy(self, **changes) -> "UIElement":
        return replace(self, **changes)


@dataclass
class Screen:
    width: int
    height: int
    elements: list[UIElement] = field(default_factory=list)
    image: Optional[np.ndarray] = None
    name: str = ""
    groups: list[list[int]] = field(default_factory=list)
    bg_color: Optional[RGB] = None
    disabled: frozenset = frozenset()
    notes: list[str] = field(default_factory=list)

    @property
    def bbox(self) -> BBox:
        return BBox(0, 0, self.width, self.height)

    def element(self, eid: int) -> UIElement:
        for el in self.elements:
            if el.id == eid:
                return el
        raise KeyError(eid)

    def renumber(self) -> None:
        for i, el in enumerate(self.elements):
            el.id = i

    def crop(self, box: BBox) -> Optional[np.ndarray]:
        """Pixels under ``box``, or None when there is no raster or the box leaves the image."""
        if self.image is None:
            return None
        h, w = self.image.shape[:2]
        if box.x2 > w or box.y2 > h or box.area == 0:
            return None
        return self.image[box.y1:box.y2, box.x1:box.x2]
