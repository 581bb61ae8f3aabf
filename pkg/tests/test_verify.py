"""The aggregated check suite: report schema, budget policy, fault injection."""

import pytest

from qforms.verify import CHECK_COSTS, dumps, verify_all


def test_entry_schema():
    rep = verify_all((5,), budget=6)
    for c in rep["checks"]:
        assert {"id", "paper_anchor", "pass", "details"} <= set(c)
    assert rep["pass"] is True


def test_budget_skips_but_passes():
    rep = verify_all((5, 7), budget=CHECK_COSTS["operator_identities"])
    assert rep["pass"] and rep["skipped"] == len(CHECK_COSTS) - 1
    assert all(w.endswith("skipped: budget") for w in rep["warnings"])
    assert any(c.get("skipped") and c["id"] == "traces" for c in rep["checks"])


def test_fault_breaks_theta_identities():
    rep = verify_all((5, 7), budget=6, inject_fault="theta")
    bad = {c["id"] for c in rep["checks"] if c["pass"] is False}
    assert {"operator_identities[5]", "operator_identities[7]", "theta_operator_head"} <= bad
    assert not rep["pass"]


def test_validation():
    with pytest.raises(ValueError):
        verify_all((3,))
    with pytest.raises(ValueError):
        verify_all((5,), inject_fault="eta")


def test_dumps_stable():
    a = dumps(verify_all((5,), budget=4))
    b = dumps(verify_all((5,), budget=4))
    assert a == b and a.endswith("\n")
