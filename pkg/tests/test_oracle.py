"""Tests for the grid oracles, seeded generators and corpus manifests."""
import json
from pathlib import Path

import numpy as np
import pytest

from models.distribution import INF, convolve, evaluate_array, kappa
from models.errors import GeneratorError, SchemaError
from models.spaces import ClassicalMetricSpace
from models.tnorm import OrdinalSumTNorm
from services import oracle
from services.config_manager import GeneratorConfig, OracleConfig
from services.probmetric import check_axioms, check_nonexpansive, exp_family_from_metric, from_classical_metric
from tests.conftest import CORPUS, step

MANIFEST = Path(__file__).resolve().parent.parent / "corpus" / "manifest.json"


class TestGridSpec:
    def test_points_and_pitch(self):
        g = oracle.GridSpec(2.0, 8)
        assert g.pitch == 0.25
        assert g.points().tolist() == [0.25 * k for k in range(9)]

    @pytest.mark.parametrize("t_max, resolution", [(0.0, 10), (-1.0, 10), (INF, 10), (1.0, 0), (1.0, 2.5)])
    def test_invalid(self, t_max, resolution):
        with pytest.raises(ValueError):
            oracle.GridSpec(t_max, resolution)

    def test_parse(self):
        assert oracle.GridSpec.parse("4,100") == oracle.GridSpec(4.0, 100)
        with pytest.raises(SchemaError):
            oracle.GridSpec.parse("4")
        with pytest.raises(SchemaError):
            oracle.GridSpec.parse("4,-3")

    def test_default_grid(self):
        g = oracle.default_grid([step((1.0, 0.5), (3.0, 1.0)), kappa()], OracleConfig(resolution=300))
        assert g == oracle.GridSpec(6.0, 300)
        assert oracle.default_grid([kappa()]).t_max == 1.0


class TestConvolutionOracle:
    def test_chi_sum(self):
        g = oracle.GridSpec(4.0, 16)
        values = oracle.grid_convolve_oracle(OrdinalSumTNorm.minimum(), step((1.0, 1.0)), step((1.5, 1.0)), g)
        ts = g.points()
        # both splits must land strictly past their jumps
        assert values[ts <= 2.75].max() == 0.0
        assert values[ts >= 3.0].min() == 1.0

    def test_contract_on_random_pairs(self, corpus_tnorm):
        rng = np.random.default_rng(2024)
        settings = GeneratorConfig()
        for _ in range(200):
            phi, psi = oracle.random_step(rng, settings), oracle.random_step(rng, settings)
            g = oracle.default_grid([phi, psi])
            assert oracle.convolution_contract_violations(corpus_tnorm, phi, psi, g) == []

    def test_kappa_is_neutral(self, corpus_tnorm):
        phi = step((0.5, 0.3), (1.25, 0.8), (2.0, 1.0))
        g = oracle.GridSpec(4.0, 400)
        values = oracle.grid_convolve_oracle(corpus_tnorm, phi, kappa(), g)
        assert values[0] == 0.0
        assert np.array_equal(values[1:], evaluate_array(phi, g.points()[:-1]))
        assert oracle.convolution_contract_violations(corpus_tnorm, phi, kappa(), g) == []

    def test_wrong_convolution_is_caught(self):
        T = OrdinalSumTNorm.product()
        phi = psi = step((1.0, 0.5), (2.0, 1.0))
        wrong = convolve(OrdinalSumTNorm.lukasiewicz(), phi, psi)
        kinds = {v["kind"] for v in oracle.convolution_contract_violations(T, phi, psi, oracle.GridSpec(6.0, 60), wrong)}
        assert "domination" in kinds


class TestDeltaOracle:
    def test_singleton(self, chi_space):
        assert oracle.grid_delta_oracle(chi_space, "a", ["a"], oracle.GridSpec(2.0, 8)) == 0.0

    @pytest.mark.parametrize("d, expected", [(1.0, 1.0), (1.1, 1.25), (3.0, INF)])
    def test_chi(self, d, expected):
        M = from_classical_metric(ClassicalMetricSpace(("a", "b"), ((0.0, d), (d, 0.0))), OrdinalSumTNorm.minimum())
        assert oracle.grid_delta_oracle(M, "a", ["b"], oracle.GridSpec(2.0, 8)) == expected

    def test_exponential_never_reaches_one(self, line_metric):
        M = exp_family_from_metric(line_metric)
        assert oracle.grid_delta_oracle(M, "a", ["b", "c"], oracle.GridSpec(10.0, 100)) == INF

    def test_subset_must_be_nonempty(self, chi_space):
        with pytest.raises(ValueError):
            oracle.grid_delta_oracle(chi_space, "a", [], oracle.GridSpec(2.0, 8))


class TestGenerators:
    def test_seeded_spaces_repeat(self, corpus_tnorm):
        assert oracle.random_space(corpus_tnorm, 4, 11) == oracle.random_space(corpus_tnorm, 4, 11)

    def test_two_points_take_the_first_draw(self):
        M = oracle.random_space(OrdinalSumTNorm.product(), 2, 5)
        assert M.carrier == ("p0", "p1")
        assert M.entry("p0", "p1") == oracle.random_step(np.random.default_rng(5), GeneratorConfig())

    @pytest.mark.parametrize("seed", range(100))
    def test_lukasiewicz_spaces_are_valid(self, seed):
        assert check_axioms(oracle.random_space(OrdinalSumTNorm.lukasiewicz(), 5, seed)).passed

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            oracle.random_space(OrdinalSumTNorm.minimum(), 1, 0)

    def test_gives_up_with_diagnostics(self, make_config):
        config = make_config(generator={"jump_grid": [0.0], "value_grid": [1.0], "max_attempts": 3})
        with pytest.raises(GeneratorError) as excinfo:
            oracle.random_space(OrdinalSumTNorm.minimum(), 2, 9, config)
        diagnostics = excinfo.value.diagnostics
        assert diagnostics["attempts"] == 3
        assert diagnostics["seed"] == 9
        assert diagnostics["tnorm"] == "min"
        assert "kappa" in diagnostics["last_error"]

    @pytest.mark.parametrize("seed", range(20))
    def test_random_metric(self, seed):
        D = oracle.random_metric(5, seed)
        assert D.is_valid()
        assert D == oracle.random_metric(5, seed)

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_nonexpansive_pairs(self, name):
        for seed in range(10):
            M, N, f = oracle.random_nonexpansive_pair(CORPUS[name], 4, 3, seed)
            assert check_axioms(M).passed
            assert check_nonexpansive(f, M, N).passed

    def test_counterexample(self):
        M, N, f = oracle.expansive_counterexample()
        assert not check_nonexpansive(f, M, N).passed


class TestManifest:
    def test_shipped_corpus(self):
        entries = oracle.load_manifest(str(MANIFEST))
        assert len(entries) == 30
        assert {json.dumps(e["tnorm"], sort_keys=True) for e in entries} == {
            json.dumps(t, sort_keys=True) for t in oracle.CORPUS_TNORMS.values()
        }

    def test_write_and_load(self, tmp_path):
        path = tmp_path / "manifest.json"
        entries = [{"seed": 3, "tnorm": oracle.CORPUS_TNORMS["luk_0.3_1"], "n_points": 3}]
        oracle.write_manifest(str(path), entries)
        assert json.loads(path.read_text())["algorithm"] == oracle.GENERATOR_ALGORITHM
        assert oracle.load_manifest(str(path)) == entries

    @pytest.mark.parametrize("document, field", [
        ({"entries": [{"seed": -1, "tnorm": "min", "n_points": 3}]}, "entries[0].seed"),
        ({"entries": [{"seed": 1, "tnorm": "min", "n_points": 1}]}, "entries[0].n_points"),
        ({"entries": [{"seed": 1, "tnorm": "min"}]}, "entries[0]"),
        ({"entries": [{"seed": 1, "tnorm": "hamacher", "n_points": 3}]}, "tnorm"),
        ({"seeds": []}, "entries"),
    ])
    def test_schema_errors(self, tmp_path, document, field):
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(document))
        with pytest.raises(SchemaError) as excinfo:
            oracle.load_manifest(str(path))
        assert excinfo.value.field == field

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_replay(self, name):
        result = oracle.replay_entry({"seed": 4, "tnorm": oracle.CORPUS_TNORMS[name], "n_points": 4})
        assert result.passed
        assert result.error is None
        assert set(result.checks) == {"axioms", "approach_axioms", "delta_via_lambda", "remetrize_min", "remetrize_product"}
