from __future__ import annotations

import json
from pathlib import Path

import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from conftest import fixture_path

SCHEMAS = Path(__file__).resolve().parent.parent / "schemas"


def _registry():
    resources = []
    for path in SCHEMAS.glob("*.schema.json"):
        doc = json.loads(path.read_text())
        resources.append((doc["$id"], Resource.from_contents(doc)))
        resources.append((path.name, Resource.from_contents(doc)))
    return Registry().with_resources(resources)


def validator(name: str) -> Draft202012Validator:
    doc = json.loads((SCHEMAS / name).read_text())
    return Draft202012Validator(doc, registry=_registry())


DOMAIN_FIXTURES = [
    "rpg", "platformer", "platformer_flat", "combined",
    "progression", "progression_noledge", "rpg3",
]


@pytest.mark.parametrize("name", DOMAIN_FIXTURES)
def test_domain_fixtures_match_schema(name):
    doc = json.loads(fixture_path(f"{name}.domain.json").read_text())
    errors = list(validator("domain.schema.json").iter_errors(doc))
    assert errors == [], [e.message for e in errors][:3]


@pytest.mark.parametrize(
    "name", ["rpg_mechanics", "platformer_mechanics", "progression_mechanics", "rpg3_seed"]
)
def test_mechanics_fixtures_match_schema(name):
    doc = json.loads(fixture_path(f"{name}.json").read_text())
    errors = list(validator("mechanics.schema.json").iter_errors(doc))
    assert errors == [], [e.message for e in errors][:3]


def test_trace_schema_accepts_planner_output(rpg_spec, rpg_mechanics):
    from mechgen.model import trace_to_json
    from mechgen.planner import plan

    result = plan(rpg_spec, [rpg_mechanics[1]], rpg_spec.instances[0])
    doc = trace_to_json(result.witness, {m.id: m for m in rpg_mechanics})
    errors = list(validator("trace.schema.json").iter_errors(doc))
    assert errors == [], [e.message for e in errors][:3]
