import pytest

_ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_criterion(name: str, ok: bool, detail: str = "") -> None:
    _ACCEPTANCE_RESULTS.append((name, ok, detail))
    suffix = f" - {detail}" if detail else ""
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}{suffix}")


@pytest.fixture
def acceptance():
    return record_criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, ok, detail in sorted(_ACCEPTANCE_RESULTS):
        suffix = f" - {detail}" if detail else ""
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}{suffix}")
