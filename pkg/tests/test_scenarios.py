from __future__ import annotations

import pytest

from cxmut.scenarios import SCENARIOS, run_scenario


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_facts(name):
    rep = run_scenario(name)
    failed = [f["fact"] for f in rep["facts"] if not f["ok"]]
    assert rep["ok"], failed
    assert all(f["provenance"] for f in rep["facts"])
