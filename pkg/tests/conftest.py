import re
from fractions import Fraction

import pytest

from gibbslab import ChannelParams

_ACCEPTANCE = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_results: dict[int, tuple[str, str]] = {}


@pytest.fixture
def std_channel() -> ChannelParams:
    """d=2, k=3, uniform input, eps=1/4: the default worked example."""
    return ChannelParams(2, 3, (Fraction(1, 2), Fraction(1, 2)), Fraction(1, 4))


@pytest.fixture
def channel_eps10() -> ChannelParams:
    return ChannelParams(2, 3, (Fraction(1, 2), Fraction(1, 2)), Fraction(1, 10))


def pytest_runtest_logreport(report):
    m = _ACCEPTANCE.search(report.nodeid)
    if m and report.when == "call":
        _results[int(m.group(1))] = (m.group(2), report.outcome.upper())


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(_results):
        name, outcome = _results[num]
        word = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(
            f"CRITERION {num:02d} {word}  {name.replace('_', ' ')}")
