"""Tests for the re-metrization transforms, remetrize and classify."""
import math

import pytest

from models.distribution import kappa
from models.errors import AxiomViolationError, TransformError
from models.spaces import ProbMetricSpace
from models.tnorm import OrdinalSumTNorm
from services import transforms
from services.oracle import random_space
from services.probmetric import exp_family_from_metric
from tests.conftest import CORPUS, K_STAR_BELOW_ONE, K_STAR_ONE, step


def dyadic_luk_pair() -> ProbMetricSpace:
    ab = step((1.0, 0.25), (2.0, 0.75), (3.0, 1.0))
    k = kappa()
    return ProbMetricSpace(("a", "b"), OrdinalSumTNorm.lukasiewicz(), ((k, ab), (ab, k)))


class TestMinRetag:
    def test_any_tnorm(self, chi_space, corpus_tnorm):
        report = transforms.min_retag(chi_space, corpus_tnorm)
        assert report.passed
        assert report.output.tnorm == corpus_tnorm
        assert report.output.alpha == chi_space.alpha

    def test_input_must_be_valid_for_the_minimum(self):
        ab = step((1.0, 0.6), (2.0, 1.0))
        k = kappa()
        M = ProbMetricSpace(("a", "b", "c"), OrdinalSumTNorm.lukasiewicz(),
                            ((k, ab, step((2.0, 0.2), (3.0, 1.0))), (ab, k, ab), (step((2.0, 0.2), (3.0, 1.0)), ab, k)))
        with pytest.raises(AxiomViolationError):
            transforms.min_retag(M, OrdinalSumTNorm.product())


class TestLukasiewiczAndProduct:
    def test_exp_minus_one(self):
        assert transforms.exp_minus_one(1.0) == 1.0
        assert transforms.exp_minus_one(0.0) == math.exp(-1.0)
        assert transforms.exp_minus_one(0.999999999999) < 1.0

    def test_data_space(self, luk_space):
        report = transforms.luk_to_prod(luk_space)
        assert report.passed
        assert report.output.tnorm == OrdinalSumTNorm.product()
        ab = report.output.entry("a", "b")
        assert ab.evaluate(0.5) == math.exp(-1.0)
        assert ab.evaluate(1.5) == math.exp(-0.5)
        assert ab.evaluate(2.5) == 1.0

    @pytest.mark.parametrize("seed", range(100))
    def test_random_spaces(self, seed):
        M = random_space(OrdinalSumTNorm.lukasiewicz(), seed % 4 + 2, seed)
        report = transforms.luk_to_prod(M)
        assert report.passed
        back = transforms.prod_to_luk(report.output)
        assert back.passed
        assert back.output.tnorm == OrdinalSumTNorm.lukasiewicz()

    def test_exponential_entries_are_rejected(self, line_metric):
        with pytest.raises(TransformError):
            transforms.luk_to_prod(exp_family_from_metric(line_metric))


class TestTailRescale:
    def test_round_trip_is_exact(self):
        M = dyadic_luk_pair()
        T1 = OrdinalSumTNorm.from_intervals([(0.5, 1.0, "lukasiewicz")])
        down = transforms.tail_rescale_down(M, T1)
        assert down.passed
        assert down.output.tnorm == T1
        assert down.output.entry("a", "b") == step((0.0, 0.5), (1.0, 0.625), (2.0, 0.875), (3.0, 1.0))
        up = transforms.tail_rescale_up(down.output)
        assert up.passed
        assert up.output == M

    @pytest.mark.parametrize("name", ["prod_0.3_1", "luk_0.3_1"])
    def test_up_on_random_spaces(self, name):
        T = CORPUS[name]
        tail = T.tail_interval()
        for seed in range(20):
            report = transforms.tail_rescale_up(random_space(T, 4, seed))
            assert report.passed
            assert report.output.tnorm == OrdinalSumTNorm.archetype_norm(tail.archetype)

    def test_archetype_mismatch(self, chi_space):
        with pytest.raises(TransformError):
            transforms.tail_rescale_down(chi_space, CORPUS["luk_0.3_1"])

    def test_no_tail_below_one(self, chi_space):
        with pytest.raises(TransformError):
            transforms.tail_rescale_up(chi_space)

    def test_q_must_be_k_star(self):
        M = random_space(CORPUS["prod_0.3_1"], 3, 0)
        with pytest.raises(TransformError):
            transforms.tail_rescale_up(M, q=0.5)


class TestProjection:
    @pytest.mark.parametrize("name", K_STAR_ONE + K_STAR_BELOW_ONE)
    def test_random_spaces(self, name):
        T = CORPUS[name]
        for seed in range(50):
            report = transforms.idempotent_projection(random_space(T, 4, seed))
            assert report.passed
            assert report.output.tnorm.is_minimum
            assert bool(report.notes) == (T.k_star() < 1.0)

    @pytest.mark.parametrize("name", K_STAR_ONE + K_STAR_BELOW_ONE)
    def test_projecting_twice_changes_nothing(self, name):
        for seed in range(30):
            once = transforms.idempotent_projection(random_space(CORPUS[name], 4, seed)).output
            twice = transforms.idempotent_projection(once)
            assert twice.output.alpha == once.alpha
            assert twice.delta_preserved
            T = CORPUS[name]
            assert all(T.idempotent_floor(v) == v for row in once.alpha for phi in row for v in phi.values)

    def test_values_drop_to_their_floor(self, luk_space):
        report = transforms.idempotent_projection(luk_space)
        assert report.output.entry("a", "c") == step((3.0, 1.0))
        assert transforms.FINITE_CARRIER_NOTE in report.notes[0]

    def test_minimum_is_the_identity(self, line_metric):
        M = exp_family_from_metric(line_metric)
        report = transforms.idempotent_projection(M)
        assert report.output is M
        assert report.passed


class TestRemetrize:
    @pytest.mark.parametrize("name", ["luk_0.3_1", "prod_0.3_1"])
    def test_product_target_on_tails(self, name):
        T = CORPUS[name]
        for seed in range(100):
            report = transforms.remetrize(random_space(T, seed % 3 + 2, seed), "product")
            assert report.passed
            assert report.output.tnorm == OrdinalSumTNorm.product()

    def test_stages(self):
        M = random_space(CORPUS["luk_0.3_1"], 3, 7)
        assert transforms.remetrize(M, "product").stages == ["tail_rescale_up", "luk_to_prod"]
        assert transforms.remetrize(M, "min").stages == ["idempotent_projection"]
        chi = random_space(CORPUS["luk_0.2_0.8"], 3, 7)
        assert transforms.remetrize(chi, "product").stages == ["idempotent_projection", "min_retag"]

    def test_product_space_is_already_the_target(self):
        report = transforms.remetrize(random_space(OrdinalSumTNorm.product(), 3, 1), "product")
        assert report.stages == []
        assert report.passed
        assert "already the target" in report.notes[-1]

    def test_exponential_family_to_minimum(self, line_metric):
        assert transforms.remetrize(exp_family_from_metric(line_metric), "min").passed

    def test_lukasiewicz_is_not_a_target(self, chi_space):
        with pytest.raises(TransformError):
            transforms.remetrize(chi_space, "lukasiewicz")


class TestWedgeSupWitness:
    @pytest.mark.parametrize("name", K_STAR_ONE)
    def test_none_when_k_star_is_one(self, name):
        assert transforms.wedgesup_witness(CORPUS[name]) is None

    @pytest.mark.parametrize("name", K_STAR_BELOW_ONE)
    def test_floors_stay_at_k_star(self, name):
        T = CORPUS[name]
        witness = transforms.wedgesup_witness(T)
        assert all(floor == T.k_star() for floor in witness.floors)
        assert witness.floor_sup == T.k_star()
        assert witness.sequence[-1] >= 1.0 - 2.0 ** -20
        assert list(witness.sequence) == sorted(witness.sequence)
        assert witness.limit == 1.0


class TestClassify:
    def test_metric_space(self, chi_space):
        report = transforms.classify(chi_space)
        assert report.case == 1
        assert report.minimum_certificate and report.product_certificate
        assert transforms.FINITE_CARRIER_NOTE in report.notes

    @pytest.mark.parametrize("name", K_STAR_BELOW_ONE)
    def test_random_spaces(self, name):
        report = transforms.classify(random_space(CORPUS[name], 4, 3))
        assert report.case == 1
        assert report.certified_families == ["every continuous t-norm"]
        assert report.notes[0].startswith("k* =")

    def test_invalid_input(self):
        ab = step((1.0, 0.6), (2.0, 1.0))
        ac = step((2.0, 0.2), (3.0, 1.0))
        k = kappa()
        M = ProbMetricSpace(("a", "b", "c"), OrdinalSumTNorm.minimum(), ((k, ab, ac), (ab, k, ab), (ac, ab, k)))
        with pytest.raises(AxiomViolationError):
            transforms.classify(M)

    def test_compare_delta(self, chi_space, luk_space):
        assert transforms.compare_delta(chi_space, chi_space) == (True, None)
        equal, witness = transforms.compare_delta(chi_space, luk_space)
        assert not equal
        assert witness["x"] == "a"
