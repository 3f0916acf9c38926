"""Fetch-and-carry object search simulator."""

import json

from ._core import (
    FetchsimError,
    InvariantViolation,
    Scenario,
    SchemaError,
    plan,
    scan_duration,
)
from . import _core

__all__ = [
    "FetchsimError",
    "InvariantViolation",
    "Scenario",
    "SchemaError",
    "compare",
    "generate_positions",
    "load_scenario",
    "plan",
    "run_mission",
    "scan_duration",
]


def load_scenario(path):
    return Scenario.from_file(str(path))


def run_mission(scenario, obj, strategy="manual", seed=0, concurrent_scan=False, learn=True, table=None):
    """Runs one mission and returns the report as a dict."""
    table_json = json.dumps(table) if table is not None else ""
    return json.loads(_core.run_mission(scenario, obj, strategy, seed, concurrent_scan, learn, table_json))


def compare(scenario, experiment, concurrent_scan=False):
    """Runs both strategies over an experiment (dict or path) and returns the table rows."""
    if not isinstance(experiment, dict):
        with open(experiment) as f:
            experiment = json.load(f)
    return json.loads(_core.compare(scenario, json.dumps(experiment), concurrent_scan))["rows"]


def generate_positions(scenario, room, seed=0):
    return json.loads(_core.generate_positions(scenario, room, seed))
