import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from screens import BENIGN_SCREENS, DP_SCREENS  # noqa: E402


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """Render every fixture screen once: list of (canvas, image path, gt path)."""
    root = tmp_path_factory.mktemp("corpus")
    out = []
    for build in DP_SCREENS + BENIGN_SCREENS:
        c = build()
        out.append((c, c.save(root / "screens"), c.save_gt(root / "gt")))
    return out


@pytest.fixture(scope="session")
def analyzed(corpus):
    """Full-pipeline analysis of every fixture: list of (canvas, Analysis)."""
    from darkscan.pipeline import ScreenInput, analyze_files
    return [(c, analyze_files(ScreenInput.beside(img))) for c, img, _ in corpus]


@pytest.fixture(scope="session")
def analyze_with(corpus, analyzed):
    """Memoized ``analyze_with(disabled) -> {screen name: findings}`` over the corpus."""
    from darkscan.config import Config
    from darkscan.pipeline import ScreenInput, analyze_files
    cache = {frozenset(): {c.name: a.findings for c, a in analyzed}}

    def run(disabled):
        key = frozenset(disabled)
        if key not in cache:
            cfg = Config().without(key)
            cache[key] = {c.name: analyze_files(ScreenInput.beside(img), cfg).findings for c, img, _ in corpus}
        return cache[key]
    return run
