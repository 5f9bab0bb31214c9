import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dubins3d.rmf import Configuration  # noqa: E402

INSTANCES = Path(__file__).resolve().parent.parent / "instances"
_acceptance_lines: list[str] = []


def record_acceptance(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    print(line)
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def random_config(rng, box=120.0, max_tilt=40.0) -> Configuration:
    X = rng.uniform(-box, box, 3)
    return Configuration.from_degrees(X, rng.uniform(-180, 180), rng.uniform(-max_tilt, max_tilt), rng.uniform(-max_tilt, max_tilt))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def instances_dir():
    return INSTANCES
