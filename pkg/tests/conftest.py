from __future__ import annotations

import pytest

from cxmut.constants import named_constants


@pytest.fixture
def report(capsys):
    """Print one PASS/FAIL line that survives pytest's output capture."""
    def emit(criterion, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
    return emit


_CACHE = {}


def constants_at(k, p=None):
    """named_constants on P^2, memoized across the session (the k = 2 run takes about two minutes)."""
    key = (k, p)
    if key not in _CACHE:
        _CACHE[key] = named_constants(2, k, p=p)
    return _CACHE[key]
