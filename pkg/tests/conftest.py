import pytest

from spsbsim.battery import BatteryParams
from spsbsim.scenario import demo_scenario
from spsbsim.timebase import IntervalSet, ticks


def k(minutes):
    """Minutes -> ticks at the default resolution."""
    return ticks(minutes)


def iset(*pairs):
    return IntervalSet([(k(a), k(b)) for a, b in pairs])


@pytest.fixture
def demo_params():
    return BatteryParams(alpha=40375, beta=0.273, m=10)


@pytest.fixture(scope="session")
def demo():
    return demo_scenario()


ACCEPTANCE_LINES: list[str] = []


def verdict(number, ok, detail):
    """Print and remember one PASS/FAIL line for an acceptance criterion."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
