"""Tests for ordinal-sum t-norms and the property suite."""
import numpy as np
import pytest

from models.errors import InvalidTNormError, SchemaError
from models.tnorm import (
    BELOW_ONE,
    Archetype,
    OrdinalInterval,
    OrdinalSumTNorm,
    idempotent_floor,
    k_star,
    transported_iso,
)
from services.tnorm_checks import floor_array, verify_tnorm
from tests.conftest import CORPUS, K_STAR_BELOW_ONE, K_STAR_ONE


class TestConstruction:
    def test_named_constructors(self):
        assert OrdinalSumTNorm.minimum().name == "min"
        assert OrdinalSumTNorm.product().name == "product"
        assert OrdinalSumTNorm.lukasiewicz().name == "lukasiewicz"
        assert OrdinalSumTNorm.minimum().is_minimum

    def test_descriptor_names_and_intervals(self):
        assert OrdinalSumTNorm.from_descriptor("prod") == OrdinalSumTNorm.product()
        T = OrdinalSumTNorm.from_descriptor({"intervals": [{"a": 0.3, "b": 1, "archetype": "product"}]})
        assert T == CORPUS["prod_0.3_1"]
        assert OrdinalSumTNorm.from_descriptor(T.to_dict()) == T

    def test_minimum_cannot_tag_an_interval(self):
        with pytest.raises(InvalidTNormError):
            OrdinalInterval(0.2, 0.5, Archetype.MINIMUM)

    def test_overlapping_intervals_are_schema_errors(self):
        descriptor = {"intervals": [
            {"a": 0.1, "b": 0.5, "archetype": "product"},
            {"a": 0.4, "b": 0.9, "archetype": "lukasiewicz"},
        ]}
        with pytest.raises(SchemaError) as excinfo:
            OrdinalSumTNorm.from_descriptor(descriptor, "bad.json")
        assert excinfo.value.field == "tnorm.intervals"
        assert excinfo.value.source == "bad.json"

    def test_unknown_name(self):
        with pytest.raises(SchemaError):
            OrdinalSumTNorm.from_descriptor("drastic")

    def test_out_of_range_interval(self):
        with pytest.raises(SchemaError):
            OrdinalSumTNorm.from_descriptor({"intervals": [{"a": 0.5, "b": 1.5, "archetype": "product"}]})


class TestEvaluation:
    def test_archetype_values(self):
        assert OrdinalSumTNorm.product().eval(0.5, 0.5) == 0.25
        assert OrdinalSumTNorm.lukasiewicz().eval(0.5, 0.5) == 0.0
        assert OrdinalSumTNorm.lukasiewicz().eval(0.75, 0.5) == 0.25
        assert OrdinalSumTNorm.minimum().eval(0.3, 0.7) == 0.3

    def test_ordinal_sum_is_minimum_outside_intervals(self):
        T = CORPUS["prod_0.3_1"]
        assert T.eval(0.2, 0.9) == 0.2
        assert T.eval(0.65, 0.65) == pytest.approx(0.3 + 0.7 * 0.25)

    def test_interval_endpoints_act_as_minimum(self):
        T = CORPUS["luk_0.2_0.8"]
        assert T.eval(0.8, 0.5) == 0.5
        assert T.eval(0.2, 0.7) == 0.2
        assert T.eval(0.5, 0.5) == 0.2

    def test_eval_array_matches_eval(self, corpus_tnorm):
        g = np.linspace(0.0, 1.0, 41)
        P, Q = np.meshgrid(g, g, indexing="ij")
        values = corpus_tnorm.eval_array(P, Q)
        for i, p in enumerate(g.tolist()):
            for j, q in enumerate(g.tolist()):
                assert values[i, j] == corpus_tnorm.eval(p, q)


class TestIdempotents:
    def test_floor(self):
        T = CORPUS["luk_0.2_0.8"]
        assert idempotent_floor(T, 0.5) == 0.2
        assert idempotent_floor(T, 0.8) == 0.8
        assert idempotent_floor(T, 0.9) == 0.9
        assert idempotent_floor(OrdinalSumTNorm.product(), 0.9) == 0.0

    @pytest.mark.parametrize("name,expected", [
        ("min", 1.0), ("product", 0.0), ("lukasiewicz", 0.0),
        ("luk_0.2_0.8", 1.0), ("prod_0.3_1", 0.3), ("luk_0.3_1", 0.3),
    ])
    def test_k_star(self, name, expected):
        assert k_star(CORPUS[name]) == expected

    def test_k_star_partition(self):
        assert all(CORPUS[name].k_star() == 1.0 for name in K_STAR_ONE)
        assert all(CORPUS[name].k_star() < 1.0 for name in K_STAR_BELOW_ONE)

    def test_is_idempotent_agrees_with_floor_near_interval_ends(self, corpus_tnorm):
        for interval in corpus_tnorm.intervals:
            for end, toward in ((interval.b, 0.0), (interval.a, 1.0)):
                q = end
                for _ in range(8):
                    q = float(np.nextafter(q, toward))
                    assert not corpus_tnorm.is_idempotent(q)
                    assert corpus_tnorm.idempotent_floor(q) == interval.a

    def test_largest_double_below_one_is_not_idempotent_in_a_product_tail(self):
        T = CORPUS["prod_0.3_1"]
        assert not T.is_idempotent(BELOW_ONE)
        assert T.idempotent_floor(BELOW_ONE) == 0.3

    def test_endpoints_are_idempotent(self, corpus_tnorm):
        for q in corpus_tnorm.idempotent_points():
            assert corpus_tnorm.is_idempotent(q)
            assert corpus_tnorm.eval(q, q) == q

    def test_floor_array_matches_floor(self, corpus_tnorm):
        g = np.linspace(0.0, 1.0, 201)
        expected = [corpus_tnorm.idempotent_floor(q) for q in g.tolist()]
        assert floor_array(corpus_tnorm, g).tolist() == expected

    def test_floor_of_a_meet_is_the_meet_of_floors(self, corpus_tnorm):
        g = np.linspace(0.0, 1.0, 200)
        P, Q = np.meshgrid(g, g, indexing="ij")
        lhs = floor_array(corpus_tnorm, corpus_tnorm.eval_array(P, Q))
        rhs = np.minimum(floor_array(corpus_tnorm, P), floor_array(corpus_tnorm, Q))
        assert np.array_equal(lhs, rhs)


class TestTransport:
    def test_forward_and_backward(self):
        forward, backward = transported_iso(CORPUS["prod_0.3_1"].tail_interval())
        assert forward(0.2) == 0.0
        assert forward(0.3) == 0.0
        assert forward(1.0) == 1.0
        assert forward(0.65) == pytest.approx(0.5)
        assert backward(0.0) == 0.3
        assert backward(1.0) == 1.0

    def test_values_below_one_stay_below_one(self):
        forward, backward = transported_iso(CORPUS["luk_0.3_1"].tail_interval())
        assert forward(BELOW_ONE) < 1.0
        assert backward(BELOW_ONE) < 1.0

    def test_requires_a_tail_interval(self):
        with pytest.raises(InvalidTNormError):
            transported_iso(OrdinalInterval(0.2, 0.8, Archetype.LUKASIEWICZ))


class TestPropertySuite:
    def test_corpus_passes(self, corpus_tnorm):
        report = verify_tnorm(corpus_tnorm)
        assert report.passed, [c.to_dict() for c in report.failures]

    def test_transport_check_only_with_a_tail(self):
        names = [c.name for c in verify_tnorm(CORPUS["luk_0.2_0.8"]).checks]
        assert "transport" not in names
        names = [c.name for c in verify_tnorm(CORPUS["luk_0.3_1"]).checks]
        assert "transport" in names

    def test_diagonal_agrees_with_idempotents_on_the_grid(self, corpus_tnorm):
        check = verify_tnorm(corpus_tnorm).get("idempotent_eval")
        assert check is not None and check.passed

    def test_archetype_order_for_pure_archetypes(self):
        names = [c.name for c in verify_tnorm(OrdinalSumTNorm.product()).checks]
        assert "archetype_order" in names
