import hypothesis
import numpy as np
import pytest

from circadian import ModelParams

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

_ACCEPTANCE = []


def record_criterion(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
    _ACCEPTANCE.append(line)
    print(line)
    return ok


@pytest.fixture
def criterion():
    return record_criterion


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture
def table():
    return ModelParams()


@pytest.fixture
def p04():
    return ModelParams(vs=0.4)


@pytest.fixture
def p05():
    return ModelParams(vs=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
