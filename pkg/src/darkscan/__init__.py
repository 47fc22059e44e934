"""Static dark-pattern detection for mobile UI screenshots."""

from .checker import Finding, check_screen, evaluate_rule
from .config import Config, load_config
from .geometry import BBox, contains, iou, union_box
from .model import ElementType, IconClass, Screen, Stage, UIElement, WidgetStatus
from .pipeline import Analysis, ScreenInput, analyze_files, analyze_screen
from .rules import DPType, RuleSet, Strategy, load_rules

__all__ = [
    "Analysis", "BBox", "Config", "DPType", "ElementType", "Finding", "IconClass", "RuleSet", "Screen",
    "ScreenInput", "Stage", "Strategy", "UIElement", "WidgetStatus", "analyze_files", "analyze_screen",
    "check_screen", "contains", "evaluate_rule", "iou", "load_config", "load_rules", "union_box",
]
