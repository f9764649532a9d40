"""Shared fixtures: corpus t-norms, configuration and small hand-built spaces."""
import json
from pathlib import Path

import pytest

from models.distribution import StepDistribution, kappa
from models.spaces import ClassicalMetricSpace, ProbMetricSpace
from models.tnorm import OrdinalSumTNorm
from services.config_manager import ConfigManager

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

CORPUS = {
    "min": OrdinalSumTNorm.minimum(),
    "product": OrdinalSumTNorm.product(),
    "lukasiewicz": OrdinalSumTNorm.lukasiewicz(),
    "luk_0.2_0.8": OrdinalSumTNorm.from_intervals([(0.2, 0.8, "lukasiewicz")]),
    "prod_0.3_1": OrdinalSumTNorm.from_intervals([(0.3, 1.0, "product")]),
    "luk_0.3_1": OrdinalSumTNorm.from_intervals([(0.3, 1.0, "lukasiewicz")]),
}
K_STAR_ONE = ["min", "luk_0.2_0.8"]
K_STAR_BELOW_ONE = ["product", "lukasiewicz", "prod_0.3_1", "luk_0.3_1"]


def step(*plateaus) -> StepDistribution:
    return StepDistribution(tuple(plateaus))


@pytest.fixture(params=sorted(CORPUS), ids=str)
def corpus_tnorm(request) -> OrdinalSumTNorm:
    return CORPUS[request.param]


@pytest.fixture
def config(tmp_path) -> ConfigManager:
    """Defaults written to and re-read from a temporary file."""
    path = tmp_path / "config.json"
    defaults = ConfigManager(str(DATA_DIR.parent / "config.example.json"))
    defaults.save(str(path))
    return ConfigManager(str(path))


@pytest.fixture
def make_config(tmp_path):
    """Build a ConfigManager from section overrides."""
    def build(**sections) -> ConfigManager:
        path = tmp_path / "custom_config.json"
        path.write_text(json.dumps(sections))
        return ConfigManager(str(path))
    return build


@pytest.fixture
def line_metric() -> ClassicalMetricSpace:
    """a - b - c on a line: d(a,b) = 1, d(b,c) = 1.5, d(a,c) = 2."""
    return ClassicalMetricSpace(
        ("a", "b", "c"),
        ((0.0, 1.0, 2.0), (1.0, 0.0, 1.5), (2.0, 1.5, 0.0)),
    )


@pytest.fixture
def chi_space(line_metric) -> ProbMetricSpace:
    from services.probmetric import from_classical_metric

    return from_classical_metric(line_metric, OrdinalSumTNorm.minimum())


@pytest.fixture
def luk_space() -> ProbMetricSpace:
    """Three points valid for Lukasiewicz (same matrix as data/lukasiewicz_space.json)."""
    ab = step((1.0, 0.5), (2.0, 1.0))
    ac = step((0.5, 0.3), (1.5, 0.6), (3.0, 1.0))
    k = kappa()
    return ProbMetricSpace(
        ("a", "b", "c"),
        OrdinalSumTNorm.lukasiewicz(),
        ((k, ab, ac), (ab, k, ab), (ac, ab, k)),
    )
