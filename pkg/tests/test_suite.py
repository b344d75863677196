from tll import suite


def test_crash_becomes_failing_row(monkeypatch):
    def boom(seed):
        raise ValueError("kaput")

    monkeypatch.setattr(suite, "CRITERIA", [(1, "boom", boom)])
    row = suite.run_criterion(1)
    assert row["passed"] is False and "kaput" in row["error"]
    rep = suite.run_suite(only=[1])
    assert rep["passed"] is False and len(rep["rows"]) == 1


def test_seed_changes_random_draws_not_outcome():
    a, b = suite.run_criterion(2, seed=1), suite.run_criterion(2, seed=2)
    assert a["passed"] and b["passed"]
    assert a["metrics"]["max_oracle_error"] != b["metrics"]["max_oracle_error"]
