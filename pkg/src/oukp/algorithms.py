"""Online strategies for the simple unbounded knapsack.

Each strategy is a small state machine consuming items one at a time via
core.run_online; none of them can look ahead or learn the instance length.
Deterministic strategies return plain traces; randomized ones return a
StrategyOutcome carrying the draws that were made, and where an exact
expectation exists it is computed symbolically over rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import numerics
from .core import (
    HALF,
    Instance,
    InvalidInstanceError,
    Item,
    ONE,
    RunTrace,
    TWO_THIRDS,
    ZERO,
    run_online,
    to_rational,
)
from .numerics import DistributionSpec


@dataclass(frozen=True)
class StrategyOutcome:
    trace: RunTrace
    strategy_id: str
    random_draws: tuple[float, ...] = ()


@dataclass(frozen=True)
class ExpectedOutcome:
    """Symbolic expectation of a randomized strategy on one instance."""

    strategy_id: str
    expected_gain: Fraction
    detail: Mapping[str, object] = field(default_factory=dict)


def _require_simple(instance: Instance, who: str) -> None:
    if not instance.is_simple:
        raise InvalidInstanceError(f"{who} is defined for simple instances only")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


# ---------------------------------------------------------------------------
# deterministic strategies
# ---------------------------------------------------------------------------


class _FirstItemFill:
    """Pack the first item as often as it fits; ignore everything after."""

    def __init__(self) -> None:
        self.seen_first = False

    def decide(self, item: Item, remaining: Fraction) -> int:
        if self.seen_first:
            return 0
        self.seen_first = True
        return item.max_copies


class _GreedyFill:
    def decide(self, item: Item, remaining: Fraction) -> int:
        return int(remaining // item.size)


class _WaitAndFill:
    """Skip items until one is <= 1/2 or >= 2/3, pack it as often as it
    fits, then continue greedily (discarding later items never helps)."""

    def __init__(self) -> None:
        self.triggered = False

    def decide(self, item: Item, remaining: Fraction) -> int:
        if not self.triggered:
            if item.size <= HALF or item.size >= TWO_THIRDS:
                self.triggered = True
                return int(remaining // item.size)
            return 0
        return int(remaining // item.size)


def first_item_fill(instance: Instance) -> RunTrace:
    """Gain >= 1/2 on every nonempty simple instance; ratio at most 2."""
    _require_simple(instance, "first_item_fill")
    return run_online(_FirstItemFill(), instance)


def greedy_fill(instance: Instance) -> RunTrace:
    _require_simple(instance, "greedy_fill")
    return run_online(_GreedyFill(), instance)


def wait_and_fill(instance: Instance) -> RunTrace:
    """Gain >= 2/3 whenever some item is <= 1/2 or >= 2/3."""
    _require_simple(instance, "wait_and_fill")
    return run_online(_WaitAndFill(), instance)


# ---------------------------------------------------------------------------
# randomized threshold strategy
# ---------------------------------------------------------------------------


class _ThresholdStrategy:
    """Pack the first item whose solo gain reaches the threshold, as often
    as it fits; afterwards pack everything greedily."""

    def __init__(self, threshold: float) -> None:
        self.threshold = threshold
        self.accepted = False

    def decide(self, item: Item, remaining: Fraction) -> int:
        if not self.accepted:
            # exact comparison: Fraction >= float compares exactly in Python
            if item.solo_gain >= self.threshold:
                self.accepted = True
                return int(remaining // item.size)
            return 0
        return int(remaining // item.size)


def threshold_trace(instance: Instance, threshold: float) -> RunTrace:
    """Deterministic run of the threshold strategy for a fixed draw."""
    _require_simple(instance, "threshold strategy")
    return run_online(_ThresholdStrategy(threshold), instance)


def threshold_randomized(
    instance: Instance, dist: DistributionSpec, rng_seed
) -> StrategyOutcome:
    """Draw one threshold from ``dist`` and run the strategy.

    Bit-reproducible for a fixed seed.
    """
    _require_simple(instance, "threshold_randomized")
    u = float(_rng(rng_seed).random())
    x = numerics.sample_X(dist, u)
    return StrategyOutcome(
        trace=threshold_trace(instance, x),
        strategy_id="threshold_randomized",
        random_draws=(x,),
    )


def _threshold_breaks(instance: Instance) -> np.ndarray:
    """Strictly increasing solo-gain breakpoints; acceptance is at the first
    breakpoint reaching the drawn threshold.  Needs all sizes >= 1/2."""
    if any(item.size < HALF for item in instance.items):
        raise ValueError("vectorized threshold gains need all sizes >= 1/2")
    breaks: list[float] = []
    best = 0.0
    for item in instance.items:
        solo = float(item.solo_gain)
        if solo > best:
            breaks.append(solo)
            best = solo
    return np.asarray(breaks)


def threshold_gains_for_draws(instance: Instance, draws: np.ndarray) -> np.ndarray:
    """Vectorized gains of the threshold strategy for many threshold draws.

    Only valid when every size is at least 1/2 (the strategy then packs a
    single acceptance bucket and nothing else, so gain is a step function of
    the draw).  Breakpoints are rounded to doubles, so a draw exactly at a
    rounded breakpoint may tie-break differently from the exact trace; that
    is a measure-zero event for continuous draws.
    """
    breaks = _threshold_breaks(instance)
    if breaks.size == 0:
        return np.zeros_like(draws)
    idx = np.searchsorted(breaks, draws, side="left")
    return np.where(idx < breaks.size, breaks[np.minimum(idx, breaks.size - 1)], 0.0)


def threshold_gains_for_uniforms(
    instance: Instance, dist: DistributionSpec, u: np.ndarray
) -> np.ndarray:
    """Gains straight from uniform draws: the bucket of u is determined by
    the CDF values at the breakpoints, skipping the explicit inversion.

    Identical in distribution to sampling X first (X <= b iff u <= F(b)).
    """
    breaks = _threshold_breaks(instance)
    if breaks.size == 0:
        return np.zeros_like(u)
    cdf_at_breaks = np.array(
        [numerics.cdf_X(dist, min(float(b), 1.0)) for b in breaks]
    )
    idx = np.searchsorted(cdf_at_breaks, u, side="left")
    return np.where(idx < breaks.size, breaks[np.minimum(idx, breaks.size - 1)], 0.0)


# ---------------------------------------------------------------------------
# mixture of greedy and wait-and-fill (guessing the advice bit)
# ---------------------------------------------------------------------------


def mixture_branch_bounds(p) -> tuple[Fraction, Fraction]:
    """Worst-case ratio bounds of the two branches of the mixture.

    First: some item triggers the waiting branch, expected gain at least
    p/2 + (1-p) 2/3.  Second: no trigger exists, opt <= 2/3 and only the
    greedy branch gains, at least p/2.
    """
    p = to_rational(p)
    return (
        ONE / (p / 2 + (1 - p) * TWO_THIRDS),
        TWO_THIRDS / (p / 2),
    )


def mixture_ratio_bound(p) -> Fraction:
    a, b = mixture_branch_bounds(p)
    return max(a, b)


def mixture_two_strategy(
    instance: Instance,
    p,
    mode: str = "exact",
    rng_seed=None,
):
    """Play greedy_fill with probability p, else wait_and_fill.

    Exact mode returns the symbolic expected gain; sampled mode draws once.
    """
    _require_simple(instance, "mixture_two_strategy")
    p = to_rational(p)
    if not ZERO < p < ONE:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    if mode == "exact":
        g_greedy = greedy_fill(instance).gain
        g_wait = wait_and_fill(instance).gain
        expected = p * g_greedy + (1 - p) * g_wait
        return ExpectedOutcome(
            strategy_id="mixture_two_strategy",
            expected_gain=expected,
            detail={"p": p, "greedy_gain": g_greedy, "wait_gain": g_wait},
        )
    if mode == "sampled":
        u = float(_rng(rng_seed).random())
        trace = greedy_fill(instance) if u < float(p) else wait_and_fill(instance)
        return StrategyOutcome(trace=trace, strategy_id="mixture_two_strategy", random_draws=(u,))
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# prefix-family strategy: bucketed acceptance probabilities from harmonics
# ---------------------------------------------------------------------------


def prefix_acceptance_probs(n: int) -> tuple[Fraction, ...]:
    """p_0 = 1/(1 + H_2n - H_n), p_k = p_0/(n+k); sums to exactly 1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    p0 = ONE / (ONE + numerics.harmonic_diff(n))
    probs = [p0] + [p0 / (n + k) for k in range(1, n + 1)]
    return tuple(probs)


def _prefix_bucket(size: Fraction, n: int) -> int:
    if size < HALF or size > ONE:
        raise InvalidInstanceError(
            f"prefix_family_strategy needs sizes in [1/2, 1], got {size}"
        )
    k = int((size - HALF) * 2 * n)
    return min(k, n)


def prefix_family_strategy(
    instance: Instance,
    n: int,
    rng_seed=None,
    mode: str = "exact",
):
    """Accept an item in bucket k with marginal probability p_k; pack once.

    Buckets are the half-open intervals [1/2 + k/2n, 1/2 + (k+1)/2n), with
    size 1 falling into bucket n.  A single uniform draw is compared against
    the cumulative bucket probabilities, which couples the decisions so the
    *unconditional* acceptance probability of the k-th bucket is exactly p_k
    when buckets arrive in increasing order; that coupling is what makes the
    expected gain telescope.
    """
    _require_simple(instance, "prefix_family_strategy")
    probs = prefix_acceptance_probs(n)
    cum = []
    acc = ZERO
    for p in probs:
        acc += p
        cum.append(acc)
    thresholds = [cum[_prefix_bucket(item.size, n)] for item in instance.items]

    if mode == "exact":
        expected = ZERO
        reach = ZERO  # largest cumulative threshold seen so far
        accept_probs = []
        for item, ck in zip(instance.items, thresholds):
            pr = ck - reach if ck > reach else ZERO
            accept_probs.append(pr)
            expected += pr * item.size
            if ck > reach:
                reach = ck
        return ExpectedOutcome(
            strategy_id="prefix_family_strategy",
            expected_gain=expected,
            detail={"acceptance_probs": tuple(accept_probs), "n": n},
        )
    if mode == "sampled":
        u = float(_rng(rng_seed).random())
        return StrategyOutcome(
            trace=prefix_trace_for_draw(instance, n, u),
            strategy_id="prefix_family_strategy",
            random_draws=(u,),
        )
    raise ValueError(f"unknown mode {mode!r}")


class _FixedDecisions:
    def __init__(self, seq):
        self.seq = iter(seq)

    def decide(self, item, remaining):
        return next(self.seq)


def prefix_trace_for_draw(instance: Instance, n: int, u: float) -> RunTrace:
    """Deterministic replay of the prefix strategy for one uniform draw."""
    _require_simple(instance, "prefix_family_strategy")
    probs = prefix_acceptance_probs(n)
    cum = []
    acc = ZERO
    for p in probs:
        acc += p
        cum.append(acc)
    decisions = []
    accepted = False
    for item in instance.items:
        ck = cum[_prefix_bucket(item.size, n)]
        # float-vs-Fraction comparison is exact in Python
        if not accepted and u < ck:
            accepted = True
            decisions.append(1)
        else:
            decisions.append(0)
    return run_online(_FixedDecisions(decisions), instance)


def prefix_gains_for_draws(instance: Instance, n: int, draws: np.ndarray) -> np.ndarray:
    """Vectorized sampled-mode gains for many uniform draws."""
    probs = prefix_acceptance_probs(n)
    cum_f = np.cumsum([float(p) for p in probs])
    sizes = np.array([float(item.size) for item in instance.items])
    ck = np.array([cum_f[_prefix_bucket(item.size, n)] for item in instance.items])
    # accept the first item with u < ck; valid when ck is nondecreasing
    if np.any(np.diff(ck) < 0):
        raise ValueError("vectorized prefix gains need nondecreasing buckets")
    idx = np.searchsorted(ck, draws, side="right")
    return np.where(idx < len(ck), sizes[np.minimum(idx, len(ck) - 1)], 0.0)
