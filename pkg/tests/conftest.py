import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

# Sample columns of the published retained-count table, n = 100 .. 2.
TABLE1_KGC = [8, 8, 8, 8, 8, 7, 6, 4, 3, 2, 1]
TABLE1_SCREE = [1] * 11
TABLE1_CV = [4, 4, 4, 4, 3, 3, 3, 2, 2, 2, 1]


@pytest.fixture
def table1_groups():
    return {"KGC": TABLE1_KGC, "CSP": TABLE1_SCREE, "CV": TABLE1_CV}


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, detail = RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
