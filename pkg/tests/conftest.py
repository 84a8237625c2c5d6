"""Shared fixtures plus a pass/fail summary line per acceptance criterion."""

from __future__ import annotations

import os
import re
import stat
from pathlib import Path

import pytest

TOOLS = Path(__file__).parent / "tools"

_CRITERION = re.compile(r"test_criterion_(\d+)")
_ACCEPTANCE: dict[int, str] = {}


def tool(name: str) -> str:
    return str(TOOLS / name)


@pytest.fixture(scope="session", autouse=True)
def _executable_tools():
    for script in TOOLS.glob("*.py"):
        mode = script.stat().st_mode
        script.chmod(mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
    yield


@pytest.fixture()
def tools_dir() -> Path:
    return TOOLS


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match:
        return
    number = int(match.group(1))
    if report.when == "call":
        _ACCEPTANCE[number] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and report.failed:
        _ACCEPTANCE[number] = "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(
            f"acceptance criterion {number}: {_ACCEPTANCE[number]}"
        )
