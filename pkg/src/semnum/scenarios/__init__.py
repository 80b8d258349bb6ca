"""Bundled .sns scenarios."""

from importlib import resources

from ..dsl import parse

NAMES = ("decimal", "mixed", "rational", "layered", "loop")


def scenario_path(name: str):
    return resources.files(__name__) / f"{name}.sns"


def load_scenario(name: str):
    return parse(scenario_path(name).read_text(encoding="utf-8"))
