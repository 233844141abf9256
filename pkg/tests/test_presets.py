"""Shipped preset files must match the in-code builders exactly."""

import os

from dwde.config import canonical_json, load_scenario, scenario_to_dict
from dwde.presets import PRESETS, get_preset

PRESET_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "presets")


def test_every_preset_is_shipped():
    files = {f[:-5] for f in os.listdir(PRESET_DIR) if f.endswith(".json")}
    assert files == set(PRESETS)


def test_shipped_files_match_builders():
    for name in PRESETS:
        path = os.path.join(PRESET_DIR, f"{name}.json")
        loaded = load_scenario(path)
        built = get_preset(name)
        assert scenario_to_dict(loaded) == scenario_to_dict(built), name
        with open(path, "r", encoding="utf-8") as fh:
            assert fh.read() == canonical_json(scenario_to_dict(built)), name
