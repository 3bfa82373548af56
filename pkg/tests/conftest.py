import numpy as np
import pytest

from partdiv import GroupSpec, make_measure

Z = GroupSpec.integers()
R1 = GroupSpec.real_lattice(1.0)

_acceptance = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(tag, title): exit criterion from the acceptance list")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        tag, title = marker.args
        _acceptance.append((tag, title, report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    # one line per criterion, even when several tests share a tag
    merged: dict[str, list] = {}
    for tag, title, outcome, duration in _acceptance:
        row = merged.setdefault(tag, [title, True, 0.0])
        row[1] = row[1] and outcome == "passed"
        row[2] += duration
    terminalreporter.section("acceptance criteria")
    for tag in sorted(merged, key=lambda t: int(t[2:])):
        title, ok, duration = merged[tag]
        terminalreporter.write_line(f"{tag:>5} {'PASS' if ok else 'FAIL'}  {title}  ({duration:.2f}s)")


@pytest.fixture
def two_point():
    return make_measure(Z, [(0, 0.7), (1, 0.3)])


@pytest.fixture
def cos_measure():
    return make_measure(R1, [(1, 0.5), (-1, 0.5)])


def random_measure(rng, group=Z, lo=-3, hi=3, max_atoms=4):
    size = int(rng.integers(1, max_atoms + 1))
    points = rng.choice(np.arange(lo, hi + 1), size=size, replace=False)
    weights = rng.dirichlet(np.ones(size))
    return make_measure(group, list(zip(points.tolist(), weights.tolist())))
