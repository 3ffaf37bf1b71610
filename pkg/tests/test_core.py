"""Domain model: exact rationals, validation, traces, text format."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oukp.core import (
    CapacityError,
    InvalidInstanceError,
    Item,
    Packing,
    format_instance_text,
    parse_instance_text,
    run_online,
    simple_instance,
    to_rational,
    validate_instance,
)

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=1000)


@given(rationals, rationals)
def test_rational_arithmetic_is_exact(a, b):
    assert (a + b) - b == a


def test_to_rational_parses_fraction_and_decimal_strings():
    assert to_rational("3/10") == Fraction(3, 10)
    assert to_rational("0.51") == Fraction(51, 100)
    assert to_rational("1e-6") == Fraction(1, 10**6)
    assert to_rational(2) == Fraction(2)


def test_to_rational_rejects_floats_and_junk():
    with pytest.raises(InvalidInstanceError):
        to_rational(0.1)
    with pytest.raises(InvalidInstanceError):
        to_rational("3/0")
    with pytest.raises(InvalidInstanceError):
        to_rational("abc")


def test_validate_instance_identity_case():
    inst = validate_instance([("1/2", "1/2")], "simple")
    assert len(inst) == 1
    assert inst.items[0].size == Fraction(1, 2)


def test_zero_size_with_positive_value_rejected():
    with pytest.raises(InvalidInstanceError, match="unbounded"):
        validate_instance([("0", "5")], "general")
    with pytest.raises(InvalidInstanceError):
        validate_instance([("0", "0")], "general")


def test_simple_requires_value_equal_size():
    with pytest.raises(InvalidInstanceError, match="value=size"):
        validate_instance([("3/10", "2/10")], "simple")


def test_item_bounds():
    with pytest.raises(InvalidInstanceError):
        Item(Fraction(11, 10), Fraction(1))
    with pytest.raises(InvalidInstanceError):
        Item(Fraction(1, 2), Fraction(-1))
    assert Item(Fraction(1, 3), Fraction(0)).max_copies == 3


def test_run_online_rejects_overpacking():
    class Greedy2:
        def decide(self, item, remaining):
            return 3  # 3 * 1/2 > 1

    with pytest.raises(CapacityError):
        run_online(Greedy2(), simple_instance(["1/2"]))


def test_run_online_gain_equals_fill_for_simple():
    class TakeOne:
        def decide(self, item, remaining):
            return 1 if remaining >= item.size else 0

    trace = run_online(TakeOne(), simple_instance(["1/3", "1/3", "2/3"]))
    assert trace.gain == trace.fill
    assert trace.fill <= 1
    assert trace.decisions == (1, 1, 0)


def test_packing_validation():
    inst = simple_instance(["1/2", "1/3"])
    Packing.from_dict({0: 1, 1: 1}).validate(inst)
    with pytest.raises(CapacityError):
        Packing.from_dict({0: 2, 1: 1}).validate(inst)
    with pytest.raises(InvalidInstanceError):
        Packing.from_dict({5: 1}).validate(inst)


def test_instance_text_round_trip():
    text = "simple\n1/2 1/2\n0.25 0.25\n"
    inst = parse_instance_text(text, "t")
    assert inst.kind == "simple"
    assert inst.items[1].size == Fraction(1, 4)
    again = parse_instance_text(format_instance_text(inst), "t")
    assert again.items == inst.items


def test_instance_text_comments_and_errors():
    inst = parse_instance_text("# comment\ngeneral\n1 5 # unit item\n")
    assert inst.kind == "general"
    assert inst.items[0].value == 5
    with pytest.raises(InvalidInstanceError):
        parse_instance_text("")
    with pytest.raises(InvalidInstanceError):
        parse_instance_text("weird\n1 1\n")
    with pytest.raises(InvalidInstanceError):
        parse_instance_text("simple\n1\n")


@settings(max_examples=200)
@given(st.lists(st.fractions(min_value=Fraction(1, 50), max_value=1, max_denominator=50),
                min_size=0, max_size=6))
def test_any_greedy_trace_respects_capacity(sizes):
    inst = simple_instance(sizes)

    class TakeAll:
        def decide(self, item, remaining):
            return int(remaining // item.size)

    trace = run_online(TakeAll(), inst)
    assert trace.fill <= 1
    assert trace.gain == trace.fill
