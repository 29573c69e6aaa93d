from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fso_cvmdi import Scenario, load_config

CONFIG_DIR = Path(__file__).parent.parent / "src" / "fso_cvmdi" / "configs"

# Collected acceptance results, printed as a summary block at the end.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_criterion(name: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((name, passed, detail))
    assert passed, f"{name}: {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fig2_scenario() -> Scenario:
    return load_config(CONFIG_DIR / "fig2.toml")


@pytest.fixture(scope="session")
def fig3_scenario() -> Scenario:
    return load_config(CONFIG_DIR / "fig3.toml")


@pytest.fixture(scope="session")
def fig4_scenario() -> Scenario:
    return load_config(CONFIG_DIR / "fig4.toml")


@pytest.fixture(scope="session")
def fig4b_scenario() -> Scenario:
    return load_config(CONFIG_DIR / "fig4b.toml")


@pytest.fixture(scope="session")
def fig5_scenario() -> Scenario:
    return load_config(CONFIG_DIR / "fig5.toml")


@pytest.fixture(scope="session")
def fig6_scenario() -> Scenario:
    return load_config(CONFIG_DIR / "fig6.toml")
