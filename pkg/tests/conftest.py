import math
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cokplex.molgraph import Atom, Bond, Molecule

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"


def make_molecule(atoms, bonds, name=""):
    """atoms: (element, charge, position); bonds: (a, b, order)."""
    return Molecule(tuple(Atom(z, c, tuple(map(float, p))) for z, c, p in atoms), tuple(Bond(*b) for b in bonds), name)


def hexagon(radius=1.4):
    return [(radius * math.cos(k * math.pi / 3), radius * math.sin(k * math.pi / 3), 0.0) for k in range(6)]


@pytest.fixture
def benzene():
    return make_molecule([(6, 0, p) for p in hexagon()], [(i, (i + 1) % 6, 2 if i % 2 == 0 else 1) for i in range(6)], "benzene")


@pytest.fixture
def toluene():
    ring = hexagon()
    return make_molecule(
        [(6, 0, p) for p in ring] + [(6, 0, (2.9, 0.0, 0.0))],
        [(i, (i + 1) % 6, 2 if i % 2 == 0 else 1) for i in range(6)] + [(0, 6, 1)],
        "toluene",
    )


@pytest.fixture
def ethane_like():
    """Two bonded carbons, the smallest conflict-graph example."""
    return make_molecule([(6, 0, (0, 0, 0)), (6, 0, (1.5, 0, 0))], [(0, 1, 1)], "cc")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---------------------------------------------------------------- acceptance report

ACCEPTANCE: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title} ({detail})"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
