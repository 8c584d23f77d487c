import numpy as np
import pytest

from mec import Action, DecisionSituation, TheoryKind, TheorySpec

KINDS = list(TheoryKind)


def random_situation(rng, *, max_actions=6, max_theories=5, kinds=KINDS,
                     allow_general=True, allow_flat=True, continuous=False):
    """A valid random situation mixing theory kinds, ties and reference sets."""
    n = int(rng.integers(1, max_actions + 1))
    actions = [f"a{i}" for i in range(n)]
    general = None
    if allow_general and rng.random() < 0.35:
        extra = [f"g{i}" for i in range(int(rng.integers(1, 3)))]
        if rng.random() < 0.7:
            general = actions + extra
        else:
            # a reference set that only partly overlaps the decision set
            general = actions[: max(1, n // 2)] + extra
    scored = list(dict.fromkeys(actions + (general or [])))

    theories, tables = [], {}
    for j in range(int(rng.integers(1, max_theories + 1))):
        kind = kinds[int(rng.integers(len(kinds)))]
        credence = float(rng.choice([0.0, 1.0, rng.random()], p=[0.05, 0.25, 0.7]))
        probs = False
        roll = rng.random()
        if allow_flat and roll < 0.1:
            value = float(rng.normal())
            scores = {a: value for a in scored}
        elif kind is TheoryKind.ORDINAL and roll < 0.4:
            probs = True
            scores = {a: float(rng.random()) for a in scored}
        elif kind is TheoryKind.ORDINAL or (not continuous and roll < 0.5):
            scores = {a: float(rng.integers(0, 4)) for a in scored}
        else:
            scores = {a: float(rng.normal(scale=rng.uniform(0.1, 10))) for a in scored}
        tid = f"t{j}"
        theories.append(TheorySpec(tid, kind, credence, probs))
        tables[tid] = scores
    return DecisionSituation(actions=[Action(a) for a in actions], theories=theories,
                             score_tables=tables, general_set=general)


@pytest.fixture
def situation_factory():
    return random_situation


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance exit criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = getattr(report, "criterion", None)
    if marker:
        _ACCEPTANCE.append((marker, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark:
        outcome.get_result().criterion = mark.args


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), outcome in sorted(_ACCEPTANCE):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
