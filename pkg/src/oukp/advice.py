"""Advice tapes and advice-assisted algorithms.

An all-knowing oracle writes a bit string; the online algorithm may read a
prefix of it, and its advice complexity is the number of bits actually read.
The tape may not signal information through its length, so the instance
length is encoded self-delimitingly (Elias gamma) at the front of the
near-optimal scheme's payload.

Two pipelines live here: the one-bit selector between greedy and
wait-and-fill (ratio 3/2 on simple instances), and the (1-eps)-guarantee
scheme that rebuilds an optimal witness from O((1/eps) log(n/eps)) bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Instance,
    Item,
    ONE,
    RunTrace,
    ZERO,
    run_online,
    to_rational,
)
from .oracle import opt_unbounded
from . import algorithms

BIT_GREEDY = 0
BIT_WAIT = 1


class AdviceError(ValueError):
    """Malformed tape, or a read past the end of the tape."""


class AdviceTape:
    """Bit sequence with a read cursor; reads past the end are an error."""

    def __init__(self, bits=()) -> None:
        self._bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in self._bits):
            raise AdviceError("tape bits must be 0 or 1")
        self.cursor = 0

    def __len__(self) -> int:
        return len(self._bits)

    @property
    def bits(self) -> tuple[int, ...]:
        return self._bits

    @property
    def bits_read(self) -> int:
        return self.cursor

    def read_bit(self) -> int:
        if self.cursor >= len(self._bits):
            raise AdviceError("read past the end of the advice tape")
        b = self._bits[self.cursor]
        self.cursor += 1
        return b

    def read_uint(self, width: int) -> int:
        value = 0
        for _ in range(width):
            value = (value << 1) | self.read_bit()
        return value

    def read_gamma(self) -> int:
        """Elias gamma decode of a positive integer."""
        zeros = 0
        while self.read_bit() == 0:
            zeros += 1
            if zeros > 64:
                raise AdviceError("malformed gamma prefix")
        value = 1
        for _ in range(zeros):
            value = (value << 1) | self.read_bit()
        return value

    def hex_dump(self) -> str:
        """MSB-first hex rendering for reports."""
        if not self._bits:
            return ""
        padded = list(self._bits) + [0] * (-len(self._bits) % 4)
        digits = []
        for i in range(0, len(padded), 4):
            nibble = padded[i] * 8 + padded[i + 1] * 4 + padded[i + 2] * 2 + padded[i + 3]
            digits.append(f"{nibble:x}")
        return "".join(digits)


class _TapeWriter:
    def __init__(self) -> None:
        self.bits: list[int] = []

    def write_bit(self, b: int) -> None:
        self.bits.append(int(b))

    def write_uint(self, value: int, width: int) -> None:
        if value < 0 or value >= 1 << width:
            raise AdviceError(f"value {value} does not fit in {width} bits")
        for shift in range(width - 1, -1, -1):
            self.bits.append((value >> shift) & 1)

    def write_gamma(self, value: int) -> None:
        if value < 1:
            raise AdviceError("gamma encoding needs a positive integer")
        n_bits = value.bit_length()
        self.bits.extend([0] * (n_bits - 1))
        for shift in range(n_bits - 1, -1, -1):
            self.bits.append((value >> shift) & 1)

    def tape(self) -> AdviceTape:
        return AdviceTape(self.bits)


# ---------------------------------------------------------------------------
# one advice bit: choose between greedy and wait-and-fill
# ---------------------------------------------------------------------------


def one_bit_oracle(instance: Instance) -> int:
    """Simulate both strategies offline; ties go to greedy."""
    g = algorithms.greedy_fill(instance).gain
    w = algorithms.wait_and_fill(instance).gain
    return BIT_WAIT if w > g else BIT_GREEDY


def one_bit_algorithm(instance: Instance, tape: AdviceTape) -> RunTrace:
    """Read exactly one bit and run the selected strategy."""
    bit = tape.read_bit()
    if bit == BIT_GREEDY:
        trace = algorithms.greedy_fill(instance)
    else:
        trace = algorithms.wait_and_fill(instance)
    return RunTrace(trace.decisions, trace.gain, trace.fill, bits_read=1)


def one_bit_pipeline(instance: Instance) -> RunTrace:
    """Oracle + algorithm; ratio at most 3/2 on every simple instance."""
    return one_bit_algorithm(instance, AdviceTape([one_bit_oracle(instance)]))


# ---------------------------------------------------------------------------
# near-optimal advice: densest small item + explicit large items
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsAdvicePayload:
    """Decoded payload of the near-optimal scheme.

    h' = h_quant * delta approximates the total small-item size h of a fixed
    optimal witness from below, with h - delta < h' <= h; large_list carries
    (index, multiplicity) for every large item of that witness.
    """

    n: int
    has_small: bool
    m: int | None
    h_quant: int
    large_list: tuple[tuple[int, int], ...]


def delta_for(eps: Fraction) -> Fraction:
    return eps / (eps + 2)


@dataclass(frozen=True)
class _Widths:
    index: int
    h_quant: int
    count: int
    mult: int


def _field_widths(n: int, eps: Fraction) -> _Widths:
    delta = delta_for(eps)
    inv = int(ONE // delta)  # floor(1/delta)
    return _Widths(
        index=n.bit_length(),        # ceil(log2(n+1))
        h_quant=(inv + 1).bit_length(),  # ceil(log2(floor(1/delta)+2))
        count=inv.bit_length(),      # ceil(log2(floor(1/delta)+1))
        mult=inv.bit_length(),
    )


def encode_payload(payload: EpsAdvicePayload, eps: Fraction) -> AdviceTape:
    w = _field_widths(payload.n, eps)
    out = _TapeWriter()
    out.write_gamma(payload.n + 1)
    out.write_bit(1 if payload.has_small else 0)
    if payload.has_small:
        out.write_uint(payload.m, w.index)
        out.write_uint(payload.h_quant, w.h_quant)
    out.write_uint(len(payload.large_list), w.count)
    for index, mult in payload.large_list:
        out.write_uint(index, w.index)
        out.write_uint(mult, w.mult)
    return out.tape()


def decode_payload(tape: AdviceTape, eps: Fraction) -> EpsAdvicePayload:
    n = tape.read_gamma() - 1
    w = _field_widths(n, eps)
    has_small = tape.read_bit() == 1
    m = None
    h_quant = 0
    if has_small:
        m = tape.read_uint(w.index)
        h_quant = tape.read_uint(w.h_quant)
    count = tape.read_uint(w.count)
    large = []
    for _ in range(count):
        index = tape.read_uint(w.index)
        mult = tape.read_uint(w.mult)
        large.append((index, mult))
    return EpsAdvicePayload(n, has_small, m, h_quant, tuple(large))


def eps_advice_oracle(instance: Instance, eps) -> AdviceTape:
    """Encode a fixed optimal witness: quantized small mass plus large items.

    Small means size <= delta = eps/(eps+2).  The densest small item of the
    witness (max value/size, ties to the smallest index) stands in for all
    small items; h_quant = floor(h/delta) quantizes their total size h so
    that h - delta < h_quant*delta <= h.
    """
    eps = to_rational(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    delta = delta_for(eps)
    witness = opt_unbounded(instance).witness
    counts = witness.as_dict()

    h = ZERO
    small_indices = []
    large = []
    for i in sorted(counts):
        item = instance.items[i]
        if item.size <= delta:
            h += counts[i] * item.size
            small_indices.append(i)
        else:
            large.append((i, counts[i]))

    if h > 0:
        m = max(
            small_indices,
            key=lambda i: (instance.items[i].value / instance.items[i].size, -i),
        )
        payload = EpsAdvicePayload(
            n=len(instance),
            has_small=True,
            m=m,
            h_quant=int(h // delta),
            large_list=tuple(large),
        )
    else:
        payload = EpsAdvicePayload(
            n=len(instance), has_small=False, m=None, h_quant=0, large_list=tuple(large)
        )
    return encode_payload(payload, eps)


class _EpsAdviceStrategy:
    def __init__(self, payload: EpsAdvicePayload, h_prime: Fraction) -> None:
        self.payload = payload
        self.h_prime = h_prime
        self.large = dict(payload.large_list)
        self.position = -1

    def decide(self, item: Item, remaining: Fraction) -> int:
        self.position += 1
        if self.payload.has_small and self.position == self.payload.m:
            return int(self.h_prime // item.size)
        return self.large.get(self.position, 0)


def eps_advice_algorithm(instance: Instance, eps, tape: AdviceTape) -> RunTrace:
    """Decode the tape and replay: the small stand-in is packed
    floor(h'/s_m) times, large items exactly as in the witness.

    Guarantees gain >= (1-eps) * opt(I) -- precisely, the gap to the
    optimum is at most eps*opt -- and never overfills.
    """
    eps = to_rational(eps)
    delta = delta_for(eps)
    payload = decode_payload(tape, eps)
    n = len(instance)
    if payload.n != n:
        raise AdviceError(f"tape encodes length {payload.n}, instance has {n}")
    for index, _ in payload.large_list:
        if index >= n:
            raise AdviceError(f"decoded index {index} beyond instance length {n}")
    if payload.has_small and payload.m >= n:
        raise AdviceError(f"decoded index {payload.m} beyond instance length {n}")
    h_prime = payload.h_quant * delta
    trace = run_online(_EpsAdviceStrategy(payload, h_prime), instance)
    return RunTrace(trace.decisions, trace.gain, trace.fill, bits_read=tape.bits_read)


def eps_advice_pipeline(instance: Instance, eps) -> RunTrace:
    return eps_advice_algorithm(instance, eps, eps_advice_oracle(instance, eps))


def advice_bit_bound(n: int, eps) -> int:
    """Exact worst-case bit count of the tape layout.

    gamma(n+1), the has_small flag, index and h_quant fields, a count field,
    and up to floor(1/delta) (index, multiplicity) entries.  Every tape the
    oracle emits is at most this long, and the bound grows as
    O((1/eps) log(n/eps)).
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    eps = to_rational(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    delta = delta_for(eps)
    inv = int(ONE // delta)
    w = _field_widths(n, eps)
    gamma_len = 2 * ((n + 1).bit_length() - 1) + 1
    return gamma_len + 1 + w.index + w.h_quant + w.count + inv * (w.index + w.mult)
