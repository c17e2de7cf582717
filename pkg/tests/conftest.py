import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from arithmodel import cfrac  # noqa: E402

GOLDEN = "periodic:head=(1,-1);body=[(3,-1)]"
SILVER = "periodic:head=(0,1);body=[(2,1)]"
MIXED = "periodic:head=(0,1);body=[(3,-1),(4,1)];prefix=[(5,-1)]"


def _ctx(text, depth=60):
    return cfrac.context(cfrac.parse_stream(text), depth)


@pytest.fixture(scope="session")
def golden():
    return _ctx(GOLDEN)


@pytest.fixture(scope="session")
def silver():
    return _ctx(SILVER)


@pytest.fixture(scope="session")
def mixed():
    return _ctx(MIXED)


@pytest.fixture(scope="session")
def bouquet():
    return _ctx("growth:bouquet")


@pytest.fixture(scope="session")
def hairy():
    return _ctx("growth:hairy")


@pytest.fixture(scope="session")
def doubling():
    return _ctx("growth:doubling")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.REPORT, key=lambda s: int(s[1:3])):
            terminalreporter.write_line(line)
