import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE: dict[int, str] = {}


def record(num: int, name: str, ok: bool, detail: str) -> bool:
    """Store one acceptance line; it is printed again in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {name} | {detail}"
    ACCEPTANCE[num] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[num])
