from pathlib import Path

import numpy as np
import pytest

from ordept.codes import resolve_code
from ordept.decoders import build_syndrome_lookup

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def hamming():
    return resolve_code("hamming-7-4")


@pytest.fixture(scope="session")
def bch32():
    return resolve_code("bch-32-21")


@pytest.fixture(scope="session")
def bch32_lookup(bch32):
    return build_syndrome_lookup(bch32)


@pytest.fixture(scope="session")
def polar128():
    return resolve_code("polar-128-116")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record one PASS/FAIL line for an acceptance criterion and return the verdict."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def emit(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
