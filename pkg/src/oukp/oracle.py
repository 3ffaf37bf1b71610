"""Exact offline optimum for the unbounded knapsack.

opt(I) maximizes sum(k_i * v_i) over multiplicities k_i in N_0 subject to
sum(k_i * s_i) <= 1.  Sizes are rescaled by their common denominator D and
the classic unbounded-knapsack DP runs over integer capacities 0..D; values
are rescaled to integers too, so the whole computation is exact.  A separate
exhaustive enumeration (:func:`opt_brute_force`) serves as an independent
cross-check and never touches the DP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Instance, ONE, Packing, ZERO

DEFAULT_DP_LIMIT = 10**6

# Below this many table cells the pure-Python loop beats numpy call overhead.
_SMALL_DP_CELLS = 4096


class OracleError(RuntimeError):
    """Exact solve impossible within configured limits."""


@dataclass(frozen=True)
class OptResult:
    value: Fraction
    witness: Packing


def _scaled_arrays(instance: Instance, capacity: Fraction, dp_limit: int):
    """Common-denominator rescale; returns (D, cap_int, weights, V, values)."""
    denoms = [item.size.denominator for item in instance.items]
    denoms.append(capacity.denominator)
    D = math.lcm(*denoms)
    if D > dp_limit:
        raise OracleError(
            f"instance too fine for exact DP (common denominator {D} > limit {dp_limit})"
        )
    cap = int(capacity * D)
    weights = [int(item.size * D) for item in instance.items]
    V = math.lcm(*[item.value.denominator for item in instance.items])
    values = [int(item.value * V) for item in instance.items]
    return D, cap, weights, V, values


def _dp_python(cap: int, weights: list[int], values: list[int]) -> list[int]:
    dp = [0] * (cap + 1)
    for w, u in zip(weights, values):
        if w > cap or u <= 0:
            continue
        for c in range(w, cap + 1):
            cand = dp[c - w] + u
            if cand > dp[c]:
                dp[c] = cand
    return dp


def _dp_numpy(cap: int, weights: list[int], values: list[int]) -> np.ndarray:
    """Per-item doubling passes: the shift-by-2^j*w pass allows 2^j more
    copies, and binary decomposition reaches every feasible count, so each
    item costs O(log(cap/w)) full-array maximum passes."""
    dp = np.zeros(cap + 1, dtype=np.int64)
    for w, u in zip(weights, values):
        if w > cap or u <= 0:
            continue
        shift, bundle = w, u
        while shift <= cap:
            np.maximum(dp[shift:], dp[:-shift] + bundle, out=dp[shift:])
            shift *= 2
            bundle *= 2
    return dp


def _reconstruct(dp, cap: int, weights: list[int], values: list[int]) -> dict[int, int]:
    """Greedy backward scan over the final table.

    dp is monotone, so the first capacity where the current value appears is
    where an item boundary must sit; trying items in index order breaks ties
    toward the smallest item index, making witnesses deterministic.
    """
    counts: dict[int, int] = {}
    c = cap
    while c > 0 and dp[c] > 0:
        if dp[c] == dp[c - 1]:
            # jump to the first occurrence of this value (dp is monotone)
            lo, hi = 0, c
            target = dp[c]
            while lo < hi:
                mid = (lo + hi) // 2
                if dp[mid] >= target:
                    hi = mid
                else:
                    lo = mid + 1
            c = lo
            continue
        for i, (w, u) in enumerate(zip(weights, values)):
            if w <= c and dp[c - w] + u == dp[c]:
                counts[i] = counts.get(i, 0) + 1
                c -= w
                break
        else:  # pragma: no cover - would indicate a DP bug
            raise OracleError("witness reconstruction failed")
    return counts


def opt_unbounded(
    instance: Instance,
    *,
    capacity: Fraction = ONE,
    dp_limit: int = DEFAULT_DP_LIMIT,
) -> OptResult:
    """Exact maximum value and a feasible witness packing.

    Raises OracleError when the sizes' common denominator exceeds dp_limit.
    """
    if capacity < 0:
        raise OracleError(f"negative capacity {capacity}")
    usable = [i for i, item in enumerate(instance.items)
              if item.size <= capacity and item.value > 0]
    if not usable:
        return OptResult(ZERO, Packing())
    if len(usable) == 1:
        i = usable[0]
        item = instance.items[i]
        k = int(capacity // item.size)
        return OptResult(k * item.value, Packing.from_dict({i: k}))

    D, cap, weights, V, values = _scaled_arrays(instance, capacity, dp_limit)

    # int64 overflow guard for the numpy path
    bound = max(
        (cap // w) * u for w, u in zip(weights, values) if 0 < w <= cap
    ) * len(weights)
    if (cap + 1) * len(weights) <= _SMALL_DP_CELLS or bound >= 2**62:
        dp = _dp_python(cap, weights, values)
    else:
        dp = _dp_numpy(cap, weights, values)

    counts = _reconstruct(dp, cap, weights, values)
    witness = Packing.from_dict(counts)
    value = Fraction(int(dp[cap]), V)
    if witness.total_value(instance) != value:  # pragma: no cover - sanity
        raise OracleError("witness does not reproduce the optimum")
    return OptResult(value, witness)


def _enumerate_best(
    items, capacity: Fraction, node_limit: int
) -> tuple[Fraction, dict[int, int]]:
    """Exhaustive DFS over all multiplicity vectors; tracks one argmax."""
    est = 1
    for item in items:
        est *= int(capacity // item.size) + 1
        if est > node_limit:
            raise OracleError(
                f"brute-force search space exceeds limit ({est} > {node_limit})"
            )

    best = ZERO
    best_counts: dict[int, int] = {}
    stack: list[int] = []
    nodes = 0

    def dfs(i: int, remaining: Fraction, value: Fraction) -> None:
        nonlocal best, best_counts, nodes
        nodes += 1
        if nodes > node_limit:
            raise OracleError("brute-force node limit exceeded")
        if i == len(items):
            if value > best:
                best = value
                best_counts = {j: c for j, c in enumerate(stack) if c}
            return
        item = items[i]
        top = int(remaining // item.size)
        for k in range(top + 1):
            stack.append(k)
            dfs(i + 1, remaining - k * item.size, value + k * item.value)
            stack.pop()

    dfs(0, capacity, ZERO)
    return best, best_counts


def opt_brute_force(
    instance: Instance,
    *,
    capacity: Fraction = ONE,
    node_limit: int = 10**7,
) -> Fraction:
    """Independent oracle: exhaustive enumeration, sharing nothing with the
    DP.  Raises OracleError when the space would exceed node_limit nodes."""
    value, _ = _enumerate_best(instance.items, capacity, node_limit)
    return value


def _opt_all_large(instance: Instance, capacity: Fraction) -> OptResult | None:
    """Closed form when every usable size is >= 1/2 (and capacity is 1).

    At most one item is packed (twice when its size is exactly 1/2); the
    only multi-item packings combine two half-sized items.  Returns None
    when the shape does not apply.
    """
    if capacity != ONE:
        return None
    half = Fraction(1, 2)
    if any(item.size < half for item in instance.items):
        return None
    best = OptResult(ZERO, Packing())
    halves: list[tuple[Fraction, int]] = []
    for i, item in enumerate(instance.items):
        k = item.max_copies
        if k * item.value > best.value:
            best = OptResult(k * item.value, Packing.from_dict({i: k}))
        if item.size == half:
            halves.append((item.value, i))
    if len(halves) >= 2:
        halves.sort(key=lambda t: (-t[0], t[1]))
        (v1, i1), (v2, i2) = halves[0], halves[1]
        if v1 + v2 > best.value:
            best = OptResult(v1 + v2, Packing.from_dict({i1: 1, i2: 1}))
    return best


def opt_exact(
    instance: Instance,
    *,
    capacity: Fraction = ONE,
    dp_limit: int = DEFAULT_DP_LIMIT,
    node_limit: int = 10**7,
) -> OptResult:
    """Exact optimum through whichever exact route is feasible.

    Prefers the closed form for all-large instances, then the scaled DP;
    falls back to bounded enumeration when the common denominator is too
    fine for the DP (as in families built from powers of a small eps).
    Raises OracleError only when every route is infeasible.
    """
    large = _opt_all_large(instance, capacity)
    if large is not None:
        return large
    try:
        return opt_unbounded(instance, capacity=capacity, dp_limit=dp_limit)
    except OracleError:
        value, counts = _enumerate_best(instance.items, capacity, node_limit)
        return OptResult(value, Packing.from_dict(counts))
