import pytest

# filled by test_acceptance: (criterion number, title, passed, seconds, detail)
ACCEPTANCE: list[tuple[int, str, bool, float, str]] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, passed, seconds, detail in sorted(ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {num}. {title} ({seconds:.2f}s) {detail}".rstrip())
