import collections

import pytest

# criterion number -> list of (ok, detail) collected by test_acceptance.py
ACCEPTANCE = collections.OrderedDict()

TITLES = {
    1: "RIS 3-dB beamwidth in [10, 13] deg",
    2: "1-bit steering within 2 deg",
    3: "1-bit quantisation loss <= 4.5 dB",
    4: "Doppler ridge at 55.0 Hz +-1 bin",
    5: "T3 peak track +, zero at turn, -",
    6: "median |f| T1 < 0.5 x T3",
    7: "band power T1 > T2+RIS > T2 bare (>= 3 dB)",
    8: "T4 power 2 m standoff > 3 m",
    9: "image method == ray launching",
    10: "phase rate == -2 pi f dL/dt / c",
    11: "determinism and <= 10 s per preset",
}


@pytest.fixture
def record():
    def _record(criterion, ok, detail=""):
        ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[c]
        ok = all(r[0] for r in rows)
        details = "; ".join(d for _, d in rows if d)
        tr.write_line(f"criterion {c:2d} {'PASS' if ok else 'FAIL'}  {TITLES.get(c, '')}  [{details}]")
