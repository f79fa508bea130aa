from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rationale_metrics.synth import write_demo_dataset


@pytest.fixture(scope="session")
def demo_dataset(tmp_path_factory) -> dict[str, Path]:
    out = tmp_path_factory.mktemp("demo_data")
    return write_demo_dataset(out, seed=7)
