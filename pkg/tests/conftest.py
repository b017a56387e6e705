from __future__ import annotations

import pytest

from kinkmanifold import FamilyLabel, ModelParams, family_member

H1_PARAMS = ModelParams(0.25, 0.5, 0.6)

# Lines recorded by the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def p_h1() -> ModelParams:
    return H1_PARAMS


@pytest.fixture(scope="session")
def family_trajectories():
    return {label: family_member(label, H1_PARAMS) for label in FamilyLabel}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
