import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from jostpole import Doublet, KWindow, compute_coefficients, default_profile, locate_ep, scan_window  # noqa: E402

K1_PUB = complex(2.2101546, -0.1366887)
K2_PUB = complex(2.2321776, -0.0017984)
EP_PUB = dict(d=1.1314661145, v3=1.038235081, k=complex(2.22697606, -0.07220139))
WINDOW = KWindow(2.0, 2.4, -0.3, 0.0)


@pytest.fixture(scope="session")
def profile():
    return default_profile()


@pytest.fixture(scope="session")
def doublet(profile):
    z = scan_window(profile, WINDOW, 64)
    return Doublet(z[0], z[1], profile)


@pytest.fixture(scope="session")
def ep(doublet):
    return locate_ep(doublet)


@pytest.fixture(scope="session")
def coeffs(ep):
    return compute_coefficients(ep)


_criteria = {}


@pytest.fixture(scope="session")
def criteria():
    return _criteria


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok, detail = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
