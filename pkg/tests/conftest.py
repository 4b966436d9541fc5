from __future__ import annotations

import pytest


@pytest.fixture
def criterion(capsys):
    """Print one PASS/FAIL line for an acceptance criterion, bypassing output capture."""

    def report(number: int, title: str, ok: bool, detail: str = "") -> bool:
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} {title}" + (f" ({detail})" if detail else ""))
        return ok

    return report
