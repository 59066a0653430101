import pytest


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line per acceptance criterion, then assert it."""

    def report(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return report
