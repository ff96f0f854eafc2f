from pathlib import Path

import numpy as np
import pytest

REPO = Path(__file__).resolve().parents[1]
FIXTURE_CSV = REPO / "data" / "synthetic_1000x6_seed42.csv"

# reference sample 0 for amplitude encoding (unit norm to 3 decimals)
AMPLITUDE_SAMPLE = np.array([0.191, 0.639, 0.211, 0.241, 0.652, 0.166])

# angles recovered from a reference 6-qubit angle-encoded state:
# x_q = 2*atan(amp(2**q) / amp(0)); its other listed amplitudes agree to 5e-10
ANGLE_SAMPLE = np.array([
    0.7578463801795933, 2.5419528084642415, 0.8369603074203231,
    0.959139851977168, 2.590449921930731, 0.6611094278925809,
])

# a few listed amplitudes of that state, keyed by ket
ANGLE_AMPLITUDES = {
    "000000": 0.0572475166,
    "000011": 0.0737336334,
    "010010": 0.6549021249,
    "011010": 0.3405912331,
    "101010": 0.0330474066,
    "110010": 0.2247262459,
    "111111": 0.0206961874,
}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def fixture_csv():
    return FIXTURE_CSV


# one line per acceptance criterion, printed after the run
_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    def record(number: int, passed: bool, detail: str) -> bool:
        _CRITERIA[number] = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(_CRITERIA[number])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
