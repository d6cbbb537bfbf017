import pytest

# criterion number -> (passed, detail), filled by tests/test_acceptance.py
ACCEPTANCE: dict = {}


@pytest.fixture
def record(request):
    """Record one acceptance verdict; a test that errors out is recorded as FAIL."""
    seen = []

    def _record(n: int, passed: bool, detail: str = ""):
        ACCEPTANCE[n] = (bool(passed), detail)
        seen.append(n)
        print(f"criterion {n}: {'PASS' if passed else 'FAIL'} {detail}")
        return passed

    yield _record
    n = getattr(request.function, "criterion", None)
    if n is not None and n not in seen:
        ACCEPTANCE[n] = (False, "raised before reaching a verdict")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}")
