import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_acceptance: dict = {}


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        _acceptance[number] = (title, ok, detail)
        print(_line(number))
        return ok

    return record


def _line(number: int) -> str:
    title, ok, detail = _acceptance[number]
    text = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}"
    return f"{text} ({detail})" if detail else text


def pytest_terminal_summary(terminalreporter):
    if _acceptance:
        terminalreporter.section("acceptance")
        for n in sorted(_acceptance):
            terminalreporter.write_line(_line(n))
