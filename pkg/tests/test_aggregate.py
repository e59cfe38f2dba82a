"""Base aggregation functions, lookup matrices, and connector rules."""

import itertools
import random

import pytest

from riskgraph import (
    AttributeSchema,
    DomainValue,
    EmptyInputError,
    LookupMatrix,
    MissingAxisError,
    OutOfDomainError,
    SchemaMismatchError,
    TieBreakPolicy,
    TieBreaker,
    aggregate_and,
    aggregate_or,
    f_max,
    f_min,
    f_prod,
    f_sum,
    matrix_lookup,
)
from riskgraph.aggregate import Connector


def rank_schema(name, lo, hi, kind="node"):
    return AttributeSchema(
        name=name, kind=kind,
        values=tuple(DomainValue(str(r), r) for r in range(lo, hi + 1)))


DIN_SCHEMAS = {
    "Resources": rank_schema("Resources", 1, 5),
    "Knowledge": rank_schema("Knowledge", 1, 5),
    "Location": rank_schema("Location", 0, 1),
}


class TestBaseFunctions:
    def test_max(self):
        assert f_max([2, 4, 3]) == 4
        assert f_max([5]) == 5

    def test_min(self):
        assert f_min([2, 4, 3]) == 2
        assert f_min([1]) == 1

    def test_sum_caps_at_domain_maximum(self):
        assert f_sum([3, 2], 5) == 5
        assert f_sum([3, 4], 5) == 5
        assert f_sum([1, 1], 5) == 2

    def test_sum_uncapped(self):
        assert f_sum([17, 3, 7], None) == 27

    def test_prod_caps_at_domain_maximum(self):
        assert f_prod([2, 3], 5) == 5
        assert f_prod([1, 4], 5) == 4
        assert f_prod([2, 2], 5) == 4

    @pytest.mark.parametrize("fn", [f_max, f_min, f_sum, f_prod])
    def test_empty_input(self, fn):
        with pytest.raises(EmptyInputError):
            fn([])


class TestLookupMatrix:
    def paf(self, din):
        return din.pipeline.stages[0].matrix

    def test_printed_cells(self, din):
        paf = self.paf(din)
        assert matrix_lookup(paf, {"Resources": 2, "Knowledge": 2}) == 4
        assert matrix_lookup(paf, {"Resources": 5, "Knowledge": 5}) == 1
        assert matrix_lookup(paf, {"Resources": 2, "Knowledge": 5}) == 2

    def test_missing_axis(self, din):
        with pytest.raises(MissingAxisError):
            matrix_lookup(self.paf(din), {"Resources": 2})

    def test_out_of_domain(self, din):
        with pytest.raises(OutOfDomainError):
            matrix_lookup(self.paf(din), {"Resources": 0, "Knowledge": 2})

    def test_totality_over_full_domain(self, din):
        paf = self.paf(din)
        for r, k in itertools.product(range(1, 6), range(1, 6)):
            value = matrix_lookup(paf, {"Resources": r, "Knowledge": k})
            assert 1 <= value <= 5

    def test_partial_matrix_rejected(self):
        out = rank_schema("Out", 1, 2)
        axis = rank_schema("In", 1, 3)
        with pytest.raises(ValueError):
            LookupMatrix(axes=(axis,), cells={(1,): 1, (2,): 2}, output=out)

    def test_monotonicity_check(self, din):
        assert self.paf(din).is_monotone("non-increasing")
        assert not self.paf(din).is_monotone("non-decreasing")


class TestConjunctive:
    def test_password_example(self):
        children = [
            {"Resources": 1, "Knowledge": 3, "Location": 0},
            {"Resources": 1, "Knowledge": 2, "Location": 0},
        ]
        assert aggregate_and(children, DIN_SCHEMAS) == {
            "Resources": 2, "Knowledge": 5, "Location": 0}

    def test_single_child_passthrough(self):
        child = {"Resources": 2, "Knowledge": 2, "Location": 1}
        assert aggregate_and([child], DIN_SCHEMAS) == child

    def test_cap_forced(self):
        children = [{"Knowledge": 4}, {"Knowledge": 4}]
        schemas = {"Knowledge": DIN_SCHEMAS["Knowledge"]}
        assert aggregate_and(children, schemas) == {"Knowledge": 5}

    def test_schema_mismatch(self):
        with pytest.raises(SchemaMismatchError):
            aggregate_and([{"Resources": 1}, {"Knowledge": 1}], DIN_SCHEMAS)

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            aggregate_and([], DIN_SCHEMAS)

    def test_permutation_invariance(self):
        rng = random.Random(7)
        for _ in range(200):
            children = [
                {"Resources": rng.randint(1, 5), "Knowledge": rng.randint(1, 5),
                 "Location": rng.randint(0, 1)}
                for _ in range(rng.randint(1, 5))
            ]
            expected = aggregate_and(children, DIN_SCHEMAS)
            shuffled = children[:]
            rng.shuffle(shuffled)
            assert aggregate_and(shuffled, DIN_SCHEMAS) == expected

    def test_cap_safety_random(self):
        rng = random.Random(13)
        for _ in range(300):
            children = [
                {"Resources": rng.randint(1, 5), "Knowledge": rng.randint(1, 5),
                 "Location": rng.randint(0, 1)}
                for _ in range(rng.randint(1, 6))
            ]
            result = aggregate_and(children, DIN_SCHEMAS)
            for name, value in result.items():
                schema = DIN_SCHEMAS[name]
                assert schema.x_min <= value <= schema.x_max


POLICY = TieBreakPolicy(
    metric="AttackFeasibility",
    tiebreakers=(TieBreaker("attribute", "Resources"),
                 TieBreaker("attribute", "Knowledge")))


class TestDisjunctive:
    def test_resources_break_the_tie(self):
        shoulder = {"Resources": 1, "Knowledge": 4, "Location": 0}
        corrupt = {"Resources": 2, "Knowledge": 2, "Location": 0}
        chosen, attrs = aggregate_or(
            [("look-over-shoulder", shoulder, 4), ("corrupt-sys-admin", corrupt, 4)],
            POLICY)
        assert chosen == "look-over-shoulder"
        assert attrs == shoulder

    def test_highest_metric_wins(self):
        a = {"Resources": 5, "Knowledge": 5, "Location": 1}
        b = {"Resources": 1, "Knowledge": 1, "Location": 0}
        chosen, attrs = aggregate_or([("a", a, 3), ("b", b, 4)], POLICY)
        assert chosen == "b" and attrs == b

    def test_identical_children_take_lowest_id(self):
        attrs = {"Resources": 2, "Knowledge": 2, "Location": 0}
        chosen, _ = aggregate_or(
            [("zeta", dict(attrs), 4), ("alpha", dict(attrs), 4)], POLICY)
        assert chosen == "alpha"

    def test_knowledge_breaks_second_tie(self):
        a = {"Resources": 1, "Knowledge": 3, "Location": 0}
        b = {"Resources": 1, "Knowledge": 2, "Location": 0}
        chosen, _ = aggregate_or([("a", a, 4), ("b", b, 4)], POLICY)
        assert chosen == "b"

    def test_attribute_sum_tiebreaker(self):
        policy = TieBreakPolicy(metric="AttackFeasibility",
                                tiebreakers=(TieBreaker("attribute-sum"),))
        a = {"ElapsedTime": 4, "Equipment": 4}
        b = {"ElapsedTime": 1, "Equipment": 0}
        chosen, _ = aggregate_or([("a", a, 4), ("b", b, 4)], policy)
        assert chosen == "b"

    def test_selection_never_synthesizes(self):
        rng = random.Random(23)
        for _ in range(200):
            children = [
                (f"c{i}",
                 {"Resources": rng.randint(1, 5), "Knowledge": rng.randint(1, 5),
                  "Location": rng.randint(0, 1)},
                 rng.randint(1, 5))
                for i in range(rng.randint(1, 5))
            ]
            chosen, attrs = aggregate_or(children, POLICY)
            assert attrs == dict(children[[c[0] for c in children].index(chosen)][1])

    def test_missing_metric(self):
        with pytest.raises(EmptyInputError):
            aggregate_or([("a", {"Resources": 1}, None)], POLICY)

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            aggregate_or([], POLICY)


class TestKofN:
    def test_two_of_three_combines_the_two_easiest(self):
        connector = Connector(name="2-of-n", mode="k-of-n", k=2)
        children = [
            ("a", {"Resources": 1, "Knowledge": 1, "Location": 0}, 5),
            ("b", {"Resources": 2, "Knowledge": 2, "Location": 0}, 4),
            ("c", {"Resources": 5, "Knowledge": 5, "Location": 1}, 1),
        ]
        attrs, selected = connector.aggregate(children, DIN_SCHEMAS, POLICY)
        assert selected == ["a", "b"]
        assert attrs == {"Resources": 3, "Knowledge": 3, "Location": 0}

    def test_k_of_one_reduces_to_selection(self):
        connector = Connector(name="1-of-n", mode="k-of-n", k=1)
        children = [
            ("a", {"Resources": 1, "Knowledge": 1, "Location": 0}, 5),
            ("b", {"Resources": 2, "Knowledge": 2, "Location": 0}, 4),
        ]
        attrs, selected = connector.aggregate(children, DIN_SCHEMAS, POLICY)
        assert selected == ["a"]
        assert attrs == {"Resources": 1, "Knowledge": 1, "Location": 0}
