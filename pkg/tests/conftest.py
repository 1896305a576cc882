import warnings

import pytest

from accelchannel import bogoliubov as bg
from accelchannel import modes as md
from accelchannel import pipeline as pl

_CRITERIA = {}


@pytest.fixture(scope="session")
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, printed at the end of the run."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        print("\n" + line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])


@pytest.fixture(scope="session")
def params01():
    return {
        "inertial": md.standard_params("inertial", 0.1),
        "passive": md.standard_params("passive_output", 0.1),
    }


@pytest.fixture(scope="session")
def input01(params01):
    return md.build_input_mode(params01["inertial"])


@pytest.fixture(scope="session")
def passive01(params01):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return md.build_passive_output_mode(params01["passive"])


@pytest.fixture(scope="session")
def passive_spectrum01(passive01):
    return md.rindler_spectrum(passive01)


@pytest.fixture(scope="session")
def mink01(input01):
    return md.minkowski_spectrum(input01)


@pytest.fixture(scope="session")
def mode01():
    """Passive mode data at A = 0.1, L = 2, k0 = 5, m = 0.1 (cutoff spectrum, alpha, beta, N)."""
    return pl.mode_data(pl.ModeSetup(0.1))


@pytest.fixture(scope="session")
def coeff_I():
    return bg.MinkRindCoeff("I")
