import json
from pathlib import Path

import numpy as np
import pytest

from negbern.families import ExponentialOverU, StableDensity
from negbern.representation import Atoms, LevyTriple, Parametric

ORACLES = json.loads((Path(__file__).parent / "oracles" / "oracles.json").read_text())


@pytest.fixture(scope="session")
def oracles():
    return ORACLES


def drift(slope=1.0, dim=1):
    return LevyTriple(dim, 0.0, (slope,) * dim)


def atom(u=1.0, w=1.0, c0=0.0):
    return LevyTriple(1, c0, (0.0,), Atoms(np.array([[u]]), np.array([w])))


def stable(alpha, c=0.0):
    return LevyTriple(1, 0.0, (0.0,), Parametric(StableDensity(alpha, tempering=c)))


def exp_over_u(b=1.0):
    return LevyTriple(1, 0.0, (0.0,), Parametric(ExponentialOverU(b)))


# acceptance criteria report one line each; the summary hook prints them even under capture
ACCEPTANCE = {}


def record(criterion, ok, detail):
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=str):
            terminalreporter.write_line(ACCEPTANCE[key])
