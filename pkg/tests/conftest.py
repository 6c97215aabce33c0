"""
Pytest fixtures for the only-believing model checker tests
"""

import json
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent.parent))

from committee_examples import committee_instance, write_instance
from formula_parser import parse_instance

settings.register_profile(
    "checker", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile("checker")


def make_document(**overrides):
    """Minimal one-agent document: Γ_1 = B_1 = {p}, V = {p}, query K 1 p"""
    document = {
        "agents": 1,
        "atoms": ["p"],
        "gamma": {"1": ["p"]},
        "base": {"1": ["p"]},
        "valuation": ["p"],
        "query": "K 1 p",
    }
    document.update(overrides)
    return document


@pytest.fixture
def temp_dir(tmp_path):
    """Create temporary directory for test files"""
    return tmp_path


@pytest.fixture
def instance_document():
    """Factory for instance documents with field overrides"""
    return make_document


@pytest.fixture
def one_agent_instance():
    """Γ_1 = {p}, B_1 = {p}, V = {p}, query K 1 p"""
    return parse_instance(json.dumps(make_document()))


@pytest.fixture
def two_agent_instance():
    """Two agents, one atom; agent 1 may hold △_2 q about agent 2"""
    return parse_instance(json.dumps({
        "agents": 2,
        "atoms": ["q"],
        "gamma": {"1": ["B 2 q", "q"], "2": ["q"]},
        "base": {"1": ["B 2 q"], "2": ["q"]},
        "valuation": ["q"],
        "query": "K 1 B 2 q",
    }))


@pytest.fixture
def model_file(temp_dir):
    """Write a document to disk and return its path"""
    def _write(document, name="model.json"):
        path = temp_dir / name
        path.write_text(json.dumps(document))
        return str(path)
    return _write


@pytest.fixture(scope="session")
def committee3():
    """Committee n = 3, first variant, query φ0"""
    return committee_instance(3, "first")


@pytest.fixture
def committee3_file(temp_dir, committee3):
    return str(write_instance(temp_dir / "committee3.json", committee3))


@pytest.fixture
def isolated_config(temp_dir, monkeypatch):
    """Point HOME at a temp dir so no user config or log file is touched"""
    monkeypatch.setenv("HOME", str(temp_dir))
    return temp_dir
