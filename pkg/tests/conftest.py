import pathlib
import sys

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def separable():
    """Two features: the first separates the classes, the second is noise."""
    g = np.random.default_rng(7)
    n = 600
    y = np.repeat([1, 2], n // 2)
    x1 = np.where(y == 1, g.uniform(0, 1, n), g.uniform(2, 3, n))
    x2 = g.normal(size=n)
    return np.column_stack([x1, x2]), y


def write_csv(path, header, rows):
    lines = [",".join(header)] + [",".join(str(c) for c in r) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
