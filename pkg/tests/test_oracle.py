"""Exact oracle: DP values, witnesses, and the independent enumeration."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oukp.core import Instance, simple_instance, validate_instance
from oukp.oracle import (
    OracleError,
    opt_brute_force,
    opt_exact,
    opt_unbounded,
)

sizes_st = st.fractions(min_value=Fraction(1, 20), max_value=1, max_denominator=20)
values_st = st.fractions(min_value=0, max_value=2, max_denominator=20)


def test_spec_examples():
    assert opt_unbounded(simple_instance(["51/100", "1"])).value == 1
    assert opt_unbounded(simple_instance(["3/10"])).value == Fraction(9, 10)
    res = opt_unbounded(simple_instance(["99/1000", "703/1000"]))
    assert res.value == 1
    assert res.witness.as_dict() == {0: 3, 1: 1}
    general = validate_instance([("1", "5"), ("1", "7")], "general")
    assert opt_unbounded(general).value == 7
    assert opt_brute_force(Instance((), "simple")) == 0


def test_witness_is_feasible_and_reproduces_value():
    inst = validate_instance(
        [("1/3", "2/5"), ("1/4", "1/5"), ("1/6", "1/10")], "general"
    )
    res = opt_unbounded(inst)
    res.witness.validate(inst)
    assert res.witness.total_value(inst) == res.value


def test_capacity_parameter():
    inst = simple_instance(["3/10"])
    assert opt_unbounded(inst, capacity=Fraction(1, 2)).value == Fraction(3, 10)
    assert opt_unbounded(inst, capacity=Fraction(0)).value == 0


def test_dp_limit_error():
    inst = simple_instance([Fraction(1, 2) + Fraction(1, 10**7),
                            Fraction(1, 2) + Fraction(3, 10**7)])
    with pytest.raises(OracleError, match="too fine"):
        opt_unbounded(inst)
    # the dispatcher still solves it through the closed form for large items
    assert opt_exact(inst).value == Fraction(1, 2) + Fraction(3, 10**7)


def test_opt_exact_enumeration_fallback():
    # denominators with a huge lcm but a tiny search space
    inst = simple_instance([Fraction(1, 3) + Fraction(1, 10**8), Fraction(2, 5)])
    value = opt_exact(inst).value
    assert value == opt_brute_force(inst)


def test_brute_force_node_limit():
    inst = simple_instance([Fraction(1, 12)] * 8)
    with pytest.raises(OracleError):
        opt_brute_force(inst, node_limit=50)


@settings(max_examples=150, deadline=None)
@given(st.lists(sizes_st, min_size=0, max_size=5))
def test_dp_matches_enumeration_simple(sizes):
    inst = simple_instance(sizes)
    assert opt_unbounded(inst, dp_limit=10**7).value == opt_brute_force(inst)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(sizes_st, values_st), min_size=0, max_size=4))
def test_dp_matches_enumeration_general(pairs):
    inst = validate_instance(pairs, "general")
    assert opt_unbounded(inst, dp_limit=10**7).value == opt_brute_force(inst)


@settings(max_examples=100, deadline=None)
@given(st.lists(sizes_st, min_size=1, max_size=5))
def test_simple_opt_at_most_one_and_monotone(sizes):
    inst = simple_instance(sizes)
    full = opt_unbounded(inst, dp_limit=10**7).value
    assert full <= 1
    shorter = opt_unbounded(simple_instance(sizes[:-1]), dp_limit=10**7).value
    assert shorter <= full


def test_deterministic_witness_ties_to_smallest_index():
    # two identical items: the witness must use only the first
    inst = simple_instance(["1/2", "1/2"])
    res = opt_unbounded(inst)
    assert res.witness.as_dict() == {0: 2}
