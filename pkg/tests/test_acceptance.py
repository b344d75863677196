"""The eleven acceptance criteria, one test each, at their stated tolerances."""

import json

import pytest

from tll.suite import CRITERIA, run_criterion

SEED = 42


@pytest.mark.parametrize("ident", [c[0] for c in CRITERIA], ids=[f"{c[0]:02d}-{c[1]}" for c in CRITERIA])
def test_criterion(ident, capsys):
    row = run_criterion(ident, SEED)
    with capsys.disabled():
        status = "PASS" if row["passed"] else "FAIL"
        print(f"\n[acceptance {row['id']:2d}] {status}  {row['name']}  ({row['seconds']:.1f} s)")
    assert row["passed"], json.dumps(row, default=str, indent=1)
