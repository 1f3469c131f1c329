from __future__ import annotations

from pathlib import Path

import pytest

from ovmkit import corpus_path
from ovmkit.documents import parse_layered_model, parse_variability_model

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def engine_layered_path() -> Path:
    return corpus_path("engine-flat-layered.json")


@pytest.fixture(scope="session")
def engine_plm_path() -> Path:
    return corpus_path("engine-flat-plm.json")


@pytest.fixture(scope="session")
def hierarchical_path() -> Path:
    return corpus_path("engine-hierarchical-layered.json")


@pytest.fixture(scope="session")
def logistics_path() -> Path:
    return corpus_path("logistics-vm.json")


@pytest.fixture(scope="session")
def engine_layered(engine_layered_path):
    model, products = parse_layered_model(engine_layered_path.read_bytes())
    assert products is None
    return model


@pytest.fixture(scope="session")
def engine_plm(engine_plm_path):
    return parse_variability_model(engine_plm_path.read_bytes())


@pytest.fixture(scope="session")
def hierarchical_layered(hierarchical_path):
    model, _ = parse_layered_model(hierarchical_path.read_bytes())
    return model


@pytest.fixture(scope="session")
def logistics_plm(logistics_path):
    return parse_variability_model(logistics_path.read_bytes())
