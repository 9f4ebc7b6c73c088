"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured numbers
and the pinned tolerance; the full table is repeated in the pytest terminal
summary.  Run ``python tests/test_acceptance.py`` for the table alone.
"""

import sys

import pytest

from qrabi.verify import CRITERIA, format_results, run_criterion

RESULTS = []


@pytest.mark.slow
@pytest.mark.parametrize("cid", list(CRITERIA), ids=[f"criterion_{c}" for c in CRITERIA])
def test_criterion(cid):
    res = run_criterion(cid)
    RESULTS.append(res)
    print(res.line())
    assert res.passed, res.detail


if __name__ == "__main__":
    out = [run_criterion(c) for c in CRITERIA]
    for r in out:
        print(r.line(), flush=True)
    sys.stdout.write(format_results(out))
    sys.exit(0 if all(r.passed for r in out) else 1)
