"""Synthetic platform simulator: scenarios, generation, oracle, mock servers."""

from .generate import FixtureSet, GroundTruthLedger, PlatformFixture, generate
from .oracle import expected_index, platform_mean
from .scenario import (
    CountryGender,
    GenderConfig,
    LinkPlan,
    NamePools,
    PlatformScenario,
    ScenarioConfig,
    WorkerPopulation,
)
from .server import MockPlatformServer, build_app

__all__ = [
    "CountryGender",
    "FixtureSet",
    "GenderConfig",
    "GroundTruthLedger",
    "LinkPlan",
    "MockPlatformServer",
    "NamePools",
    "PlatformFixture",
    "PlatformScenario",
    "ScenarioConfig",
    "WorkerPopulation",
    "build_app",
    "expected_index",
    "generate",
    "platform_mean",
]
