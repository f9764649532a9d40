"""End-to-end tests of the command-line verbs through main.main()."""
import json

import pytest

import main
from models.reports import TransformReport
from tests.conftest import DATA_DIR

CHI = str(DATA_DIR / "chi_metric.json")
EXP = str(DATA_DIR / "exp_metric.json")
LUK = str(DATA_DIR / "lukasiewicz_space.json")
KAPPA = str(DATA_DIR / "kappa_offdiagonal_space.json")
LUK_TAIL = str(DATA_DIR / "tnorm_luk_tail.json")
INNER_LUK = str(DATA_DIR / "tnorm_inner_luk.json")


@pytest.fixture
def run(tmp_path):
    """Run main with --out and return (exit code, parsed payload)."""
    out = tmp_path / "report.json"

    def invoke(*argv):
        if out.exists():
            out.unlink()
        code = main.main(["--out", str(out), *argv])
        payload = json.loads(out.read_text()) if out.exists() else None
        return code, payload
    return invoke


class TestVerify:
    @pytest.mark.parametrize("tnorm", ["min", "product", "lukasiewicz", LUK_TAIL, INNER_LUK])
    def test_tnorm_suite(self, run, tnorm):
        code, payload = run("verify-tnorm", "--tnorm", tnorm)
        assert code == 0
        assert payload["passed"] is True

    @pytest.mark.parametrize("path", [CHI, EXP, LUK])
    def test_valid_spaces(self, run, path):
        code, payload = run("verify-space", "--space", path)
        assert code == 0
        assert [c["name"] for c in payload["checks"]] == ["P1", "P2", "P3", "P4", "P5"]

    def test_off_diagonal_kappa_fails_p4(self, run):
        code, payload = run("verify-space", "--space", KAPPA)
        assert code == 1
        failed = [c["name"] for c in payload["checks"] if not c["passed"]]
        assert failed == ["P4"]

    def test_waiver(self, run):
        code, _ = run("verify-space", "--space", KAPPA, "--waive-p4")
        assert code == 0

    def test_tnorm_override(self, run):
        code, payload = run("verify-space", "--space", CHI, "--tnorm", "product")
        assert code == 0
        assert payload["subject"].endswith("product")


class TestApproachVerbs:
    def test_derive_with_grid(self, run):
        code, payload = run("derive", "--space", CHI, "--grid", "8,800")
        assert code == 0
        assert payload["delta"]["delta"]["a|{b,c}"] == 1.0
        assert payload["axioms"]["checks"][-1]["name"] == "grid_oracle"

    def test_derive_lukasiewicz(self, run):
        code, payload = run("derive", "--space", LUK)
        assert code == 0
        assert payload["delta"]["delta"]["a|{c}"] == 3.0

    def test_closure(self, run):
        code, payload = run("closure", "--space", CHI, "--subset", "c,a")
        assert code == 0
        assert payload["closures"] == [{"S": ["c", "a"], "closure": ["a", "c"]}]

    def test_derive_from_an_approach_document(self, run, tmp_path):
        path = tmp_path / "delta.json"
        path.write_text(json.dumps({"derive_from": CHI}))
        code, payload = run("derive", "--approach", str(path))
        assert code == 0
        assert payload["delta"]["delta"]["a|{b,c}"] == 1.0

    def test_approach_table_is_checked(self, run, tmp_path):
        _, payload = run("derive", "--space", CHI)
        table = payload["delta"]
        table["delta"]["a|{a}"] = 1.0
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(table))
        code, payload = run("derive", "--approach", str(path))
        assert code == 1
        failed = [check["name"] for check in payload["axioms"]["checks"] if not check["passed"]]
        assert "A1" in failed

    def test_closure_of_an_approach_table(self, run, tmp_path):
        _, payload = run("derive", "--space", CHI)
        path = tmp_path / "delta.json"
        path.write_text(json.dumps(payload["delta"]))
        code, payload = run("closure", "--approach", str(path), "--subset", "c,a")
        assert code == 0
        assert payload["closures"] == [{"S": ["c", "a"], "closure": ["a", "c"]}]

    def test_grid_needs_a_space(self, run, tmp_path):
        path = tmp_path / "delta.json"
        path.write_text(json.dumps({"derive_from": CHI}))
        code, _ = run("derive", "--approach", str(path), "--grid", "8,800")
        assert code == 2

    def test_neighborhoods(self, run):
        code, payload = run("neighborhoods", "--space", CHI, "--t", "0.5,1.0", "--point", "b")
        assert code == 0
        assert payload["neighborhoods"]["b"] == [{"t": 0.5, "points": ["b"]}, {"t": 1.0, "points": ["b"]}]

    def test_lambda(self, run):
        code, payload = run("lambda", "--space", LUK, "--point", "a")
        assert code == 0
        assert payload["stabilization"]["a"] == 3
        assert [table["n"] for table in payload["tables"]["a"]] == [1, 2, 3]

    def test_gauge(self, run):
        code, payload = run("gauge", "--space", CHI, "--n", "1,4")
        assert code == 0
        assert [g["n"] for g in payload["gauges"]] == [1, 4]

    def test_gauge_needs_the_minimum(self, run):
        code, payload = run("gauge", "--space", LUK)
        assert code == 2
        assert payload is None


class TestTransformVerbs:
    def test_project_min(self, run):
        code, payload = run("transform", "project-min", "--space", LUK)
        assert code == 0
        assert payload["delta_preserved"] is True
        report = TransformReport.from_dict(payload)
        assert report.output.tnorm.is_minimum
        assert report.passed
        assert report.output.entry("a", "c").plateaus == ((3.0, 1.0),)

    def test_luk_to_prod(self, run):
        code, payload = run("transform", "luk-to-prod", "--space", LUK)
        assert code == 0
        assert payload["output_tnorm"] == {"intervals": [{"a": 0.0, "b": 1.0, "archetype": "product"}]}

    def test_tail_rescale_down(self, run):
        code, payload = run("transform", "tail-rescale", "--space", LUK, "--to", LUK_TAIL)
        assert code == 0
        assert payload["stages"] == ["tail_rescale_down"]

    def test_remetrize(self, run):
        code, payload = run("transform", "remetrize", "--space", LUK, "--target", "product")
        assert code == 0
        assert payload["stages"] == ["luk_to_prod"]

    def test_remetrize_needs_a_target(self, run):
        code, _ = run("transform", "remetrize", "--space", LUK)
        assert code == 2

    def test_min_retag_needs_to(self, run):
        code, _ = run("transform", "min-retag", "--space", CHI)
        assert code == 2

    def test_classify(self, run):
        code, payload = run("classify", "--space", LUK)
        assert code == 0
        assert payload["case"] == 1
        assert payload["wedgesup_witness"]["k_star"] == 0.0

    def test_classify_metric(self, run):
        code, payload = run("classify", "--space", CHI)
        assert code == 0
        assert payload["wedgesup_witness"] is None


class TestNonexpansiveVerb:
    @staticmethod
    def map_file(tmp_path, mapping):
        path = tmp_path / "map.json"
        path.write_text(json.dumps({"map": mapping}))
        return str(path)

    def test_identity(self, run, tmp_path):
        f = self.map_file(tmp_path, {"a": "a", "b": "b", "c": "c"})
        code, payload = run("nonexpansive", "--space", CHI, "--into", CHI, "--map", f)
        assert code == 0
        assert payload["checks"][0]["name"] == "nonexpansive"

    def test_stretching_map(self, run, tmp_path):
        f = self.map_file(tmp_path, {"a": "a", "b": "c", "c": "b"})
        code, payload = run("nonexpansive", "--space", CHI, "--into", CHI, "--map", f)
        assert code == 1
        witness = payload["checks"][0]["witness"]
        assert witness["source"] > witness["target"]

    def test_undecided_pairs_fail(self, run, tmp_path):
        f = self.map_file(tmp_path, {"a": "a", "b": "b", "c": "c"})
        code, payload = run("nonexpansive", "--space", CHI, "--into", EXP, "--map", f)
        assert code == 1
        assert "unchecked" in payload["checks"][0]["witness"]

    def test_partial_map(self, run, tmp_path):
        code, _ = run("nonexpansive", "--space", CHI, "--into", CHI, "--map", self.map_file(tmp_path, {"a": "a"}))
        assert code == 2


class TestCorpusAndErrors:
    def test_single_seed(self, run):
        code, payload = run("corpus", "--seed", "3", "--tnorm", "lukasiewicz", "--points", "3")
        assert code == 0
        assert payload["entries"][0]["passed"] is True

    def test_missing_space_file(self, run, tmp_path):
        code, payload = run("verify-space", "--space", str(tmp_path / "nope.json"))
        assert code == 2
        assert payload is None

    def test_invalid_config(self, run, tmp_path):
        config = tmp_path / "bad.json"
        config.write_text(json.dumps({"oracle": {"resolution": 0}}))
        code, _ = run("--config", str(config), "verify-space", "--space", CHI)
        assert code == 2

    def test_missing_config(self, run, tmp_path):
        code, _ = run("--config", str(tmp_path / "absent.json"), "verify-space", "--space", CHI)
        assert code == 2

    def test_carrier_cap(self, run):
        code, _ = run("--max-carrier", "2", "derive", "--space", CHI)
        assert code == 2
