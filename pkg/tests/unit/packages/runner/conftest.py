"""Scenario fixtures for runner tests."""

import copy

import pytest
import yaml

BASE_SCENARIO = {
    "schema_version": 1,
    "name": "tiny",
    "description": "Small single-mode scan",
    "seed": 5,
    "reps": 1500,
    "modes": [{"frequency_hz": 867000.0}],
    "drive": {"force_yn": 100.0, "t_d": 200.0e-6, "t_d_variants": [400.0e-6]},
    "sweep": {
        "start_hz": 857000.0,
        "stop_hz": 877000.0,
        "step_hz": 2000.0,
        "spectrum_step_hz": 50.0,
    },
    "outputs": ["rms_spectrum", "phase_trace"],
    "expectations": [
        {
            "name": "peak",
            "kind": "peak_location",
            "product": "rms_spectrum",
            "expected": 867000.0,
            "tolerance": 50.0,
        },
        {
            "name": "linewidth",
            "kind": "linewidth_ratio",
            "product": "rms_spectrum",
            "reference": "rms_spectrum_td1",
            "expected": 2.0,
            "rel_tolerance": 0.02,
        },
        {"name": "nulls", "kind": "null_depth", "expected": 1e-12, "comparison": "at_most"},
    ],
}


@pytest.fixture
def scenario_data():
    return copy.deepcopy(BASE_SCENARIO)


@pytest.fixture
def write_scenario(tmp_path):
    """Write a scenario mapping to YAML and return its path."""

    def _write(data, name="tiny.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data), encoding="utf-8")
        return path

    return _write
