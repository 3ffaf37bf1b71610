"""Advice tapes: bit accounting, the one-bit selector, the eps scheme."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oukp.advice import (
    AdviceError,
    AdviceTape,
    BIT_GREEDY,
    BIT_WAIT,
    EpsAdvicePayload,
    advice_bit_bound,
    decode_payload,
    delta_for,
    encode_payload,
    eps_advice_algorithm,
    eps_advice_oracle,
    eps_advice_pipeline,
    one_bit_algorithm,
    one_bit_oracle,
    one_bit_pipeline,
)
from oukp.core import simple_instance, validate_instance
from oukp.harness import instance_stream, random_general_instance, random_simple_instance
from oukp.oracle import opt_exact, opt_unbounded


def test_tape_read_accounting():
    tape = AdviceTape([1, 0, 1, 1])
    assert tape.read_bit() == 1
    assert tape.read_uint(2) == 1
    assert tape.bits_read == 3
    tape.read_bit()
    with pytest.raises(AdviceError):
        tape.read_bit()


def test_tape_gamma_round_trip():
    from oukp.advice import _TapeWriter

    for value in (1, 2, 3, 9, 100, 12345):
        w = _TapeWriter()
        w.write_gamma(value)
        assert w.tape().read_gamma() == value


def test_hex_dump():
    assert AdviceTape([1, 0, 1, 0, 1, 1]).hex_dump() == "ac"
    assert AdviceTape([]).hex_dump() == ""


def test_one_bit_oracle_examples_including_tie():
    assert one_bit_oracle(simple_instance(["6/10"])) == BIT_GREEDY
    assert one_bit_oracle(simple_instance(["55/100", "7/10"])) == BIT_WAIT
    # both strategies pack two copies of 34/100: the tie goes to greedy
    assert one_bit_oracle(simple_instance(["34/100"])) == BIT_GREEDY


def test_one_bit_algorithm_reads_exactly_one_bit():
    inst = simple_instance(["51/100"])
    trace = one_bit_algorithm(inst, AdviceTape([BIT_GREEDY, 1, 1]))
    assert trace.bits_read == 1
    assert trace.gain == Fraction(51, 100)
    with pytest.raises(AdviceError):
        one_bit_algorithm(inst, AdviceTape([]))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.fractions(min_value=Fraction(1, 12), max_value=1, max_denominator=12),
                min_size=1, max_size=5))
def test_one_bit_pipeline_three_halves(sizes):
    inst = simple_instance(sizes)
    trace = one_bit_pipeline(inst)
    opt = opt_unbounded(inst, dp_limit=10**6).value
    assert 2 * opt <= 3 * trace.gain


def test_delta_examples():
    assert delta_for(Fraction(2)) == Fraction(1, 2)
    assert delta_for(Fraction(1, 5)) == Fraction(1, 11)


payloads = st.builds(
    lambda n, has_small, m, hq, large: EpsAdvicePayload(
        n=n,
        has_small=has_small and n > 0,
        m=(m % n) if (has_small and n > 0) else None,
        h_quant=hq if (has_small and n > 0) else 0,
        large_list=tuple((i % n, mult) for i, mult in large)[: n and 5] if n else (),
    ),
    st.integers(min_value=0, max_value=200),
    st.booleans(),
    st.integers(min_value=0, max_value=199),
    st.integers(min_value=0, max_value=5),
    st.lists(st.tuples(st.integers(min_value=0, max_value=199),
                       st.integers(min_value=1, max_value=5)), max_size=5),
)


@settings(max_examples=200)
@given(payloads)
def test_encode_decode_identity(payload):
    eps = Fraction(1, 2)  # floor(1/delta) = 5: all fields above fit
    tape = encode_payload(payload, eps)
    assert decode_payload(tape, eps) == payload
    assert tape.bits_read == len(tape)


def test_oracle_examples():
    # ten copies of a small item: everything is small, h = 1
    inst = simple_instance(["1/10"])
    eps = Fraction(1, 2)
    tape = eps_advice_oracle(inst, eps)
    payload = decode_payload(AdviceTape(tape.bits), eps)
    assert payload.has_small and payload.m == 0
    assert payload.h_quant == 5  # h = 1, delta = 1/5
    assert payload.large_list == ()
    trace = eps_advice_pipeline(inst, eps)
    assert trace.gain == 1  # h' = 1 reconstructs all ten copies

    general = validate_instance([("1", "3")], "general")
    tape = eps_advice_oracle(general, Fraction(1, 5))
    payload = decode_payload(AdviceTape(tape.bits), Fraction(1, 5))
    assert not payload.has_small
    assert payload.large_list == ((0, 1),)


def test_algorithm_rejects_foreign_tapes():
    inst = simple_instance(["1/2"])
    other = simple_instance(["1/2", "1/2", "1/2"])
    tape = eps_advice_oracle(other, Fraction(1, 2))
    with pytest.raises(AdviceError):
        eps_advice_algorithm(inst, Fraction(1, 2), tape)
    with pytest.raises(AdviceError):
        eps_advice_algorithm(inst, Fraction(1, 2), AdviceTape([1, 1]))


def test_empty_instance_round_trip():
    from oukp.core import Instance

    inst = Instance((), "general")
    trace = eps_advice_pipeline(inst, Fraction(1, 2))
    assert trace.gain == 0 and trace.decisions == ()
    assert trace.bits_read <= advice_bit_bound(0, Fraction(1, 2))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.fractions(min_value=Fraction(1, 40), max_value=3, max_denominator=40))
def test_bit_bound_growth(n, eps):
    if eps <= 0:
        return
    b1 = advice_bit_bound(n, eps)
    b2 = advice_bit_bound(2 * n + 1, eps)
    assert b2 >= b1  # monotone in n
    # logarithmic growth: doubling n adds at most a constant factor's worth
    inv = int(1 / delta_for(eps)) + 1
    assert b2 - b1 <= 2 * (inv + 3)


def test_eps_guarantee_on_random_instances():
    rng = instance_stream(20240811, 3)
    eps_values = (Fraction(1, 2), Fraction(1, 5), Fraction(1, 10))
    for i in range(60):
        if i % 2 == 0:
            inst = random_general_instance(rng, max_items=12, max_denominator=30)
        else:
            inst = random_simple_instance(rng, max_items=12, max_denominator=30)
        opt = opt_exact(inst).value
        for eps in eps_values:
            tape = eps_advice_oracle(inst, eps)
            trace = eps_advice_algorithm(inst, eps, tape)
            assert trace.gain >= (1 - eps) * opt
            assert trace.fill <= 1
            # the decoder consumes exactly the payload, nothing more
            assert trace.bits_read == len(tape)
            assert trace.bits_read <= advice_bit_bound(len(inst), eps)
