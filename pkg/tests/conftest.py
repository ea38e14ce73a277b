import csv
import json
from fractions import Fraction
from pathlib import Path

import pytest

from hairy_cantor.hair import canonical_model
from hairy_cantor.matching import build_matched_nests
from hairy_cantor.models import tilted_model

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def reference_hairs():
    """(x, y) of the 105 hairs in the reference depth-4 plot, as printed."""
    with open(DATA / "reference_hairs.csv") as fh:
        return [(float(r["x"]), float(r["y"])) for r in csv.DictReader(fh)]


@pytest.fixture(scope="session")
def reference_graphs():
    """Polyline vertices of l_1..l_4 in the reference plot, keyed by colour."""
    raw = json.loads((DATA / "reference_graphs.json").read_text())
    return {k: [(float(x), float(y)) for x, y in v] for k, v in raw.items()}


@pytest.fixture(scope="session")
def canon4():
    return canonical_model(4)


@pytest.fixture(scope="session")
def canon6():
    return canonical_model(6)


@pytest.fixture(scope="session")
def perturbed6(canon6):
    return tilted_model(canon6, seed=0)


@pytest.fixture(scope="session")
def perturbed_pair(canon6, perturbed6):
    return build_matched_nests(canon6, perturbed6, 6)


@pytest.fixture(scope="session")
def identical_pair(canon6):
    return build_matched_nests(canon6, canon6, 3)


def frac(s):
    return Fraction(s)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
