import json
from pathlib import Path

import pytest

from vcwb.qlaurent import LaurentPoly

DATA = Path(__file__).parent / "data"
REPO = Path(__file__).parent.parent


@pytest.fixture(scope="session")
def golden_jones():
    """J(1..7) of k4_3 as {N: LaurentPoly}, from the reference q-power table."""
    raw = json.loads((DATA / "jones_k43_q_powers.json").read_text())
    return {int(N): LaurentPoly.from_q_powers({e: c for e, c in pairs}) for N, pairs in raw.items()}


def pytest_terminal_summary(terminalreporter):
    lines = [
        value
        for reports in terminalreporter.stats.values()
        for rep in reports
        if getattr(rep, "when", None) == "call"
        for key, value in getattr(rep, "user_properties", ())
        if key == "acceptance"
    ]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
