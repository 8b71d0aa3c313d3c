"""Shared fixtures and the acceptance summary printed at the end of a run."""
import numpy as np
import pytest

from ctsf.model import BandPlan, ChannelSet

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _ACCEPTANCE.append((props["criterion"], report.passed, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(_ACCEPTANCE, key=lambda r: int(r[0].split()[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toy():
    """One true band and one decoy with unit noise."""
    plan = BandPlan(2, (0,), (1,), 0.5)
    ch = ChannelSet([2.0, 1.0], [0.5, 1.5])
    return plan, ch
