import pytest

from parabolic_basin.cubic import CubicMap, check_assumption1
from parabolic_basin.fatou import FatouChart

A_STAR = 0.3 + 1.1j


@pytest.fixture(scope="session")
def fmap_star():
    r = check_assumption1(CubicMap(A_STAR))
    assert r.satisfied
    return CubicMap(A_STAR).with_critical_order(r.c0, r.c)


@pytest.fixture(scope="session")
def chart_star(fmap_star):
    return FatouChart(fmap_star)


@pytest.fixture(scope="session")
def partition_star(fmap_star, chart_star):
    from parabolic_basin.partition import build_partition

    return build_partition(fmap_star, chart_star)


@pytest.fixture(scope="session")
def accesses_star(partition_star):
    from parabolic_basin.accesses import build_access

    return {(k, s): build_access(partition_star, k, s) for k in (2, 3, 4) for s in "+-"}


@pytest.fixture(scope="session")
def graphs_star(partition_star, accesses_star):
    from parabolic_basin.puzzles import build_graph

    return {(k, s): build_graph(partition_star, k, s, accesses_star[(k, s)]) for k in (2, 3) for s in "+-"}


# -- acceptance reporting: one line per criterion in the terminal summary ----------

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    def record(n: int, ok: bool, detail: str, seconds: float, limit: float):
        verdict = "PASS" if ok and seconds < limit else "FAIL"
        line = f"{verdict} criterion {n:2d}: {detail} [{seconds:.2f} s, limit {limit:g} s]"
        ACCEPTANCE_LINES.append((n, line))
        print(line)
        return verdict == "PASS"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES, key=lambda x: x[0]):
        terminalreporter.write_line(line)
