import math

import pytest

from rifslab import IfsTuple, RifsDistribution, Similarity

LOG2_LOG3 = math.log(2) / math.log(3)
AB_DIM = math.log(6) / (2 * math.log(4))
AB_STEP = 0.5 * math.log(1.5)


def line_atom(*pairs):
    return IfsTuple(tuple(Similarity.line(r, t) for r, t in pairs))


def cantor_atom():
    return line_atom((1 / 3, -2 / 3), (1 / 3, 2 / 3))


def cantor_dist():
    return RifsDistribution([cantor_atom()], [1.0])


def ab_dist():
    a = line_atom((0.25, -0.75), (0.25, 0.75))
    b = line_atom((0.25, -0.75), (0.25, 0.0), (0.25, 0.75))
    return RifsDistribution([a, b], [0.5, 0.5])


def golden_dist():
    return RifsDistribution([line_atom((0.5, -0.5), (0.25, 0.75))], [1.0])


def mixed_dist():
    a = line_atom((0.5, -0.5), (0.3, 0.7))
    b = line_atom((0.4, -0.6), (0.25, 0.1), (0.2, 0.8))
    return RifsDistribution([a, b], [0.5, 0.5])


@pytest.fixture
def cantor():
    return cantor_dist()


@pytest.fixture
def ab():
    return ab_dist()


@pytest.fixture
def golden():
    return golden_dist()


@pytest.fixture
def mixed():
    return mixed_dist()


_CRITERIA = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        request.config.stash.setdefault(_CRITERIA, []).append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
