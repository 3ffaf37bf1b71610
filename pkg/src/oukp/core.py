"""Exact domain model for the online unbounded knapsack.

Sizes, values, gains, and fills are arbitrary-precision rationals
(``fractions.Fraction``), so lower-bound identities hold exactly.  The
knapsack capacity is 1.  Online strategies consume items one at a time
through :func:`run_online`, which also enforces the capacity invariant
centrally: no trace produced anywhere in this package can overfill.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Protocol

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)
TWO_THIRDS = Fraction(2, 3)

SIMPLE = "simple"
GENERAL = "general"


class InvalidInstanceError(ValueError):
    """An instance violates a model invariant (bad size, value, or kind)."""


class CapacityError(RuntimeError):
    """A strategy emitted a decision that would overfill the knapsack."""


def to_rational(x) -> Fraction:
    """Convert exactly to a Fraction.

    Accepts Fractions, ints, and strings ("3/10", "0.51", "1e-6"); decimal
    strings convert exactly.  Floats are rejected: their binary value is
    rarely what the caller meant, pass a string instead.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstanceError(f"cannot parse rational {x!r}: {exc}") from None
    if isinstance(x, float):
        raise InvalidInstanceError(
            f"refusing float {x!r}: pass a string or Fraction for exactness"
        )
    raise InvalidInstanceError(f"cannot convert {type(x).__name__} to a rational")


@dataclass(frozen=True)
class Item:
    """One arriving item: size in (0, 1], value >= 0."""

    size: Fraction
    value: Fraction

    def __post_init__(self) -> None:
        if self.size <= 0:
            if self.value > 0:
                raise InvalidInstanceError(
                    "zero size with positive value makes opt unbounded"
                )
            raise InvalidInstanceError("item size must be positive")
        if self.size > 1:
            raise InvalidInstanceError(f"item size {self.size} exceeds capacity 1")
        if self.value < 0:
            raise InvalidInstanceError(f"item value {self.value} is negative")

    @property
    def max_copies(self) -> int:
        """How often the item fits into an empty knapsack."""
        return int(ONE // self.size)

    @property
    def solo_gain(self) -> Fraction:
        """Gain from packing this item alone as often as it fits."""
        return self.max_copies * self.value


@dataclass(frozen=True)
class Instance:
    """A sequence of items in arrival order plus the problem kind."""

    items: tuple[Item, ...]
    kind: str = SIMPLE
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in (SIMPLE, GENERAL):
            raise InvalidInstanceError(f"unknown instance kind {self.kind!r}")
        if self.kind == SIMPLE:
            for i, item in enumerate(self.items):
                if item.value != item.size:
                    raise InvalidInstanceError(
                        f"simple requires value=size, item {i} has "
                        f"size {item.size} and value {item.value}"
                    )

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[Item]:
        return iter(self.items)

    @property
    def is_simple(self) -> bool:
        return self.kind == SIMPLE

    def sizes(self) -> tuple[Fraction, ...]:
        return tuple(item.size for item in self.items)

    def prefix(self, length: int, name: str = "") -> "Instance":
        return Instance(self.items[:length], self.kind, name or self.name)


def validate_instance(raw, kind: str = SIMPLE, name: str = "") -> Instance:
    """Build a canonical Instance from raw (size, value) pairs.

    Raises InvalidInstanceError describing the violated invariant.
    """
    items = []
    for entry in raw:
        size_raw, value_raw = entry
        items.append(Item(to_rational(size_raw), to_rational(value_raw)))
    return Instance(tuple(items), kind, name)


def simple_instance(sizes, name: str = "") -> Instance:
    """Shorthand for a simple instance given only sizes."""
    items = tuple(Item(s, s) for s in (to_rational(v) for v in sizes))
    return Instance(items, SIMPLE, name)


@dataclass(frozen=True)
class Packing:
    """Multiplicities per item index (sparse, 0-based, sorted)."""

    counts: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def from_dict(counts: Mapping[int, int]) -> "Packing":
        return Packing(tuple(sorted((i, c) for i, c in counts.items() if c)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)

    def total_size(self, instance: Instance) -> Fraction:
        return sum((c * instance.items[i].size for i, c in self.counts), ZERO)

    def total_value(self, instance: Instance) -> Fraction:
        return sum((c * instance.items[i].value for i, c in self.counts), ZERO)

    def validate(self, instance: Instance) -> None:
        for i, c in self.counts:
            if not 0 <= i < len(instance):
                raise InvalidInstanceError(f"packing references missing item {i}")
            if c < 0:
                raise InvalidInstanceError(f"negative multiplicity for item {i}")
        if self.total_size(instance) > 1:
            raise CapacityError("packing exceeds capacity 1")


@dataclass(frozen=True)
class RunTrace:
    """Per-item multiplicities chosen online, with gain/fill accounting."""

    decisions: tuple[int, ...]
    gain: Fraction
    fill: Fraction
    bits_read: int = 0


class OnlineStrategy(Protocol):
    """One-way item feed: decide a multiplicity for each arriving item.

    ``remaining`` is the strategy's own free capacity, which it could track
    itself; it is passed for convenience.  Nothing about later items (or the
    instance length) is observable.
    """

    def decide(self, item: Item, remaining: Fraction) -> int: ...


def run_online(strategy: OnlineStrategy, instance: Instance, *, bits_read: int = 0) -> RunTrace:
    """Feed items one at a time and assemble the trace.

    Central capacity check: a decision that overfills raises CapacityError,
    so every RunTrace in the repository satisfies fill <= 1.
    """
    remaining = ONE
    gain = ZERO
    decisions: list[int] = []
    for item in instance.items:
        count = strategy.decide(item, remaining)
        if count < 0:
            raise CapacityError(f"negative decision {count}")
        cost = count * item.size
        if cost > remaining:
            raise CapacityError(
                f"decision {count} x {item.size} exceeds remaining {remaining}"
            )
        remaining -= cost
        gain += count * item.value
        decisions.append(count)
    return RunTrace(tuple(decisions), gain=gain, fill=ONE - remaining, bits_read=bits_read)


@dataclass(frozen=True)
class InstanceRecord:
    """One row of a ratio report."""

    instance: str
    opt: Fraction
    gain: Fraction | None = None          # exact gain of a deterministic run
    expected_gain: float | None = None    # Monte Carlo or exact expectation
    ratio: object = None                  # Fraction or float; None <=> unbounded
    unbounded: bool = False
    stats: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class RatioReport:
    """Per-instance ratios plus the aggregate worst case."""

    algorithm: str
    records: tuple[InstanceRecord, ...]
    seed: int | None = None
    trials: int | None = None
    params: Mapping[str, str] = field(default_factory=dict)

    @property
    def any_unbounded(self) -> bool:
        return any(r.unbounded for r in self.records)

    @property
    def worst_ratio(self):
        """Largest finite ratio, or None when some record is unbounded."""
        if self.any_unbounded:
            return None
        finite = [r.ratio for r in self.records if r.ratio is not None]
        return max(finite, default=None)


# ---------------------------------------------------------------------------
# Instance text format: first line "simple" or "general", then one item per
# line as "<size> <value>"; fields are p/q or exact decimal strings.  Blank
# lines and '#' comments are skipped.
# ---------------------------------------------------------------------------

def parse_instance_text(text: str, name: str = "") -> Instance:
    lines = []
    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise InvalidInstanceError("empty instance file")
    kind = lines[0].lower()
    if kind not in (SIMPLE, GENERAL):
        raise InvalidInstanceError(f"first line must be 'simple' or 'general', got {lines[0]!r}")
    pairs = []
    for line in lines[1:]:
        fields = line.split()
        if len(fields) != 2:
            raise InvalidInstanceError(f"expected '<size> <value>', got {line!r}")
        pairs.append((fields[0], fields[1]))
    return validate_instance(pairs, kind, name)


def format_instance_text(instance: Instance) -> str:
    lines = [instance.kind]
    for item in instance.items:
        lines.append(f"{item.size} {item.value}")
    return "\n".join(lines) + "\n"


def load_instance(path, name: str = "") -> Instance:
    from pathlib import Path

    p = Path(path)
    return parse_instance_text(p.read_text(), name or p.stem)
