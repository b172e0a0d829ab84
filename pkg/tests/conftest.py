from __future__ import annotations

import math
from functools import lru_cache

import pytest

from casalter.lattice import ModelParams
from casalter.lifshitz import AltermagnetSheet, LifshitzConfig
from casalter.response import KuboConfig

KUBO = KuboConfig()


@lru_cache(maxsize=64)
def sheet(B=10.0, T=30.0, B_bias=0.0, grid_n=None):
    """Cached altermagnetic sheet; electron temperature follows the field temperature."""
    kubo = KUBO if grid_n is None else KUBO.with_(grid_n=grid_n)
    return AltermagnetSheet(ModelParams(B=B, B_bias=B_bias, temperature=T), kubo)


@pytest.fixture(scope="session")
def sheet_factory():
    return sheet


@pytest.fixture(scope="session")
def fig2_cfg():
    """d = 30 nm, T = 30 K, theta = pi/4."""
    return LifshitzConfig(d=30e-9, T=30.0, theta=math.pi / 4)


ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    store = request.config.stash.setdefault(ACCEPTANCE_KEY, {})

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        store[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(ACCEPTANCE_KEY, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        terminalreporter.write_line(store[number])
