import numpy as np
import pytest

from wblab.mtsfm import WaveformParams


@pytest.fixture
def desk_params():
    """Q = 5, TBP = 100 at T = 1 s: fc = 500 Hz, delta_f = 100 Hz, fs = 1600 Hz."""
    return WaveformParams.from_q_tbp(5, 100)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; lines are printed in the terminal summary."""

    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} | {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
