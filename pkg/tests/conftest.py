import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[str, tuple[bool, str]] = {}


def record_criterion(name: str, ok: bool, detail: str) -> None:
    """Log one acceptance-criterion outcome; echoed at session end."""
    _CRITERIA[name] = (ok, detail)
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} - {detail}",
          flush=True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda k: (len(k), k)):
        ok, detail = _CRITERIA[name]
        terminalreporter.write_line(
            f"{name:>4}  {'PASS' if ok else 'FAIL'}  {detail}")
