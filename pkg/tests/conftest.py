import random
from functools import lru_cache

import pytest

from tverdeg.experiments import random_collection, special_collection


@lru_cache(maxsize=None)
def cached_random(d: int, r: int, seed: int):
    return random_collection(d, r, random.Random(f"fixture:{d}:{r}:{seed}"))


@lru_cache(maxsize=None)
def cached_special(d: int, r: int):
    return special_collection(d, r)


@pytest.fixture
def c0_23():
    return cached_special(2, 3)


@pytest.fixture
def rand_23():
    return cached_random(2, 3, 0)


ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(name: str, ok: bool, detail: str = "") -> None:
    """Register an acceptance outcome, then fail the calling test if needed."""
    ACCEPTANCE.append((name, ok, detail))
    assert ok, f"{name}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
