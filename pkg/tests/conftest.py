import sys
from pathlib import Path

import pytest
from hypothesis import settings

# make tests/oracles.py importable as a plain module
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    """Record one line per acceptance criterion; printed in the terminal summary."""

    def record(label, passed, detail, runtime=None, limit=None):
        timing = ""
        if runtime is not None:
            timing = f" [{runtime:.1f} s" + (f" / limit {limit:.0f} s]" if limit is not None else "]")
        _ACCEPTANCE.append(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}{timing}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
