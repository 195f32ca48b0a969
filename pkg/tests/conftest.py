from __future__ import annotations

import numpy as np
import pytest

from optchoice.core import Dataset, Lot


def lots_with_prime_at_rank(n_lots: int, k: int, rank: int, seed: int = 0) -> Dataset:
    """One-feature lots of k choices; the prime holds the rank-th largest value (1 = top)."""
    rng = np.random.default_rng(seed)
    lots = []
    for i in range(n_lots):
        values = np.sort(rng.permutation(k).astype(float))[::-1] / k  # distinct, descending
        order = rng.permutation(k)
        x = values[order]
        prime = int(np.flatnonzero(order == rank - 1)[0])
        lots.append(Lot(x[:, None], prime, f"L{i}"))
    return Dataset(("f1",), tuple(lots))


@pytest.fixture
def second_best():
    return lots_with_prime_at_rank(10, 10, 2)


@pytest.fixture
def tiny():
    return Dataset(
        ("f1", "f2"),
        (
            Lot([[0.4, 0.2], [0.1, 0.9], [0.7, 0.5]], 2, "a"),
            Lot([[0.3, 0.3], [0.8, 0.1]], 1, "b"),
            Lot([[0.5, 0.5], [0.2, 0.6], [0.9, 0.0]], None, "c"),
        ),
    )


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    rep = outcome.get_result()
    if mark is None or rep.when != "call":
        return
    status = "PASS" if rep.passed else "FAIL"
    line = f"{status}  {mark.args[0]}"
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
