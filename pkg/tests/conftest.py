import json
from pathlib import Path

import numpy as np
import pytest

from entnewton import ProblemInstance

FROZEN = Path(__file__).parent / "oracles" / "frozen.json"


@pytest.fixture(scope="session")
def frozen():
    return json.loads(FROZEN.read_text())


def problem_from(case, **over):
    kw = dict(A=case["A"], b=case["b"], w=case["w"], gamma=case["gamma"], R=case["R"])
    kw.update(over)
    return ProblemInstance(**kw)


def random_problem(seed, n=6, d=3, R=1.5, gamma=0.4, w_scale=1.0):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, d))
    A *= R * 0.8 / np.linalg.norm(A, 2)
    b = rng.random(n)
    b /= b.sum()
    w = rng.uniform(0.0, w_scale, n)
    x = rng.standard_normal(d)
    x *= 0.8 * R / np.linalg.norm(x)
    return ProblemInstance(A=A, b=b, w=w, gamma=gamma, R=R), x


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
