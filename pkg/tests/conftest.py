"""Session-wide KKT audit: every fitted SVM produced during the tests is checked."""

import math

import pytest

from svmgeom import classifiers
from svmgeom.kkt import verify_kkt_hard, verify_kkt_soft

KKT_TOL = 1e-6
AUDIT = {"fits": 0, "worst": 0.0, "failures": []}

_original = classifiers._solution


def _audited(data, res, C):
    sol = _original(data, res, C)
    if math.isinf(C):
        report = verify_kkt_hard(data, sol, KKT_TOL)
    else:
        report = verify_kkt_soft(data, sol, C, KKT_TOL)
    AUDIT["fits"] += 1
    AUDIT["worst"] = max(AUDIT["worst"], report.max_violation)
    if report.max_violation > KKT_TOL:
        AUDIT["failures"].append((data.n, data.d, C, report.violations))
        raise AssertionError(f"KKT violated at C={C}: {report.violations}")
    return sol


classifiers._solution = _audited


@pytest.fixture
def kkt_audit():
    return AUDIT


CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record ``criterion N: PASS/FAIL detail`` lines for the end-of-run summary."""

    def record(number: int, ok: bool, detail: str = ""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}".rstrip()
        CRITERIA[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA and not AUDIT["fits"]:
        return
    lines = dict(CRITERIA)
    ok = not AUDIT["failures"] and AUDIT["worst"] <= KKT_TOL
    # criterion 2 covers every fit in the session, so it is settled only here
    lines[2] = (f"criterion 2: {'PASS' if ok else 'FAIL'} {AUDIT['fits']} fits audited "
                f"in this session, worst KKT violation {AUDIT['worst']:.2e}")
    terminalreporter.section("acceptance criteria")
    for k in sorted(lines):
        terminalreporter.write_line(lines[k])
