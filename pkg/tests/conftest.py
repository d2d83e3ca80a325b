from pathlib import Path

import pytest

from phevopt import (
    BatteryParams,
    DpConfig,
    PowertrainAssembly,
    RuleConfig,
    VehicleParams,
    default_decisions,
    synthetic_cycle,
)

REPO_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def cycle():
    return synthetic_cycle()


@pytest.fixture(scope="session")
def vp():
    return VehicleParams()


@pytest.fixture(scope="session")
def assembly():
    return PowertrainAssembly.synthetic()


@pytest.fixture(scope="session")
def battery():
    return BatteryParams()


@pytest.fixture(scope="session")
def genset_point(assembly):
    return assembly.genset_point(2600.0, 38.57868)


@pytest.fixture(scope="session")
def rule_config(genset_point):
    return RuleConfig(genset_point=genset_point, initial_soc=15.0)


@pytest.fixture(scope="session")
def decisions(assembly):
    return default_decisions(assembly, 18.9)


@pytest.fixture(scope="session")
def dp_config(decisions):
    return DpConfig(decisions=decisions, initial_soc=14.0)


@pytest.fixture(scope="session")
def scenario_dir():
    return REPO_ROOT / "scenarios"
