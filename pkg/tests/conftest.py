from pathlib import Path

import numpy as np
import pytest

from brmkit import codec
from brmkit.config import ExperimentConfig
from brmkit.imageio import Image, load_corpus

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = REPO_ROOT / "corpus"


def pytest_terminal_summary(terminalreporter):
    """Echo the one-line acceptance verdicts after capture is released."""
    import sys

    module = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def corpus():
    images = load_corpus(CORPUS_DIR)
    assert len(images) >= 6
    return images


@pytest.fixture(scope="session")
def small_image():
    """64x64 deterministic grayscale image with mixed content."""
    rng = np.random.default_rng(7)
    yy, xx = np.mgrid[0:64, 0:64]
    base = 128 + 60 * np.sin(xx / 9.0) * np.cos(yy / 13.0) + 12 * rng.standard_normal((64, 64))
    samples = np.clip(np.round(base), 0, 255).astype(np.uint8)[:, :, None]
    return Image(samples=samples, name="small")


@pytest.fixture(scope="session")
def default_config():
    return ExperimentConfig(corpus_dir=CORPUS_DIR)


@pytest.fixture(scope="session")
def default_models(default_config):
    return [
        codec.make_model(i, m.beta_train, m.delta_min, m.delta_max, m.gain_scale)
        for i, m in enumerate(default_config.models)
    ]
