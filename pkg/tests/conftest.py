from __future__ import annotations

import json
from pathlib import Path

import pytest

from mechgen.loader import load_domain, load_mechanics

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "mechgen" / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


@pytest.fixture(scope="session")
def rpg_spec():
    return load_domain(fixture_path("rpg.domain.json"))


@pytest.fixture(scope="session")
def rpg_mechanics(rpg_spec):
    return load_mechanics(fixture_path("rpg_mechanics.json"), rpg_spec)


@pytest.fixture(scope="session")
def platformer_spec():
    return load_domain(fixture_path("platformer.domain.json"))


@pytest.fixture(scope="session")
def platformer_mechanics(platformer_spec):
    return load_mechanics(fixture_path("platformer_mechanics.json"), platformer_spec)


@pytest.fixture(scope="session")
def flat_spec():
    return load_domain(fixture_path("platformer_flat.domain.json"))


@pytest.fixture(scope="session")
def progression_spec():
    return load_domain(fixture_path("progression.domain.json"))


@pytest.fixture(scope="session")
def progression_noledge_spec():
    return load_domain(fixture_path("progression_noledge.domain.json"))


@pytest.fixture(scope="session")
def progression_mechanics(progression_spec):
    return load_mechanics(fixture_path("progression_mechanics.json"), progression_spec)


@pytest.fixture(scope="session")
def rpg3_spec():
    return load_domain(fixture_path("rpg3.domain.json"))


@pytest.fixture(scope="session")
def rpg3_seed(rpg3_spec):
    return load_mechanics(fixture_path("rpg3_seed.json"), rpg3_spec)


@pytest.fixture(scope="session")
def mana_overlay():
    return json.loads(fixture_path("mana_reserve.overlay.json").read_text())
