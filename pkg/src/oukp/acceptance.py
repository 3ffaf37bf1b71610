"""Acceptance suite: every headline guarantee checked at desk scale.

Each criterion is a standalone check returning pass/fail plus a one-line
summary; the CLI `accept` subcommand and tests/test_acceptance.py both run
this registry.  Exact claims are asserted over rationals; statistical checks
run at fixed seeds with their significance levels stated inline.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import advice, algorithms
from .adversary import (
    chain_expected_ratios,
    det_minimax,
    det_minimax_with_advice,
    distinct_first_decisions,
    generate_family,
    rand_minimax_chain,
    uniform_bit_worst_ratios,
)
from .core import HALF, ONE, TWO_THIRDS, ZERO, simple_instance
from .harness import (
    ExperimentConfig,
    evaluate_randomized,
    instance_stream,
    random_general_instance,
    random_simple_instance,
)
from .numerics import (
    cdf_X,
    cdf_X_array,
    check_g_monotone,
    compute_constants,
    default_distribution,
    expected_ratio_exact,
    harmonic_diff,
    sample_X,
)
from .oracle import opt_brute_force, opt_exact, opt_unbounded

DEFAULT_ACCEPT_SEED = 271828


@dataclass
class CheckResult:
    criterion: int
    title: str
    passed: bool
    details: str
    elapsed: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] criterion {self.criterion:2d} ({self.elapsed:6.1f}s) "
            f"{self.title}: {self.details}"
        )


def _c1_oracle_equivalence(seed: int):
    rng = instance_stream(seed, 101)
    for i in range(500):
        if i % 2 == 0:
            inst = random_simple_instance(rng, max_items=6, max_denominator=20)
        else:
            inst = random_general_instance(rng, max_items=6, max_denominator=20)
        dp = opt_unbounded(inst).value
        bf = opt_brute_force(inst)
        if dp != bf:
            return False, f"DP {dp} != enumeration {bf} on {inst.items}"
    return True, "DP equals enumeration on 500 random instances (n<=6, denominators<=20)"


def _c2_deterministic_two(seed: int):
    rng = instance_stream(seed, 102)
    for _ in range(10**5):
        inst = random_simple_instance(rng, max_items=4, max_denominator=50)
        trace = algorithms.first_item_fill(inst)
        if trace.gain < HALF:
            return False, f"first-item fill gained {trace.gain} < 1/2 on {inst.items}"
    ratios = []
    for eps in (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)):
        res = det_minimax(generate_family("det2", eps=eps))
        expected = ONE / (HALF + eps)
        if res.ratio != expected:
            return False, f"det minimax on det2({eps}) = {res.ratio}, expected {expected}"
        ratios.append(res.ratio)
    if not (ratios[0] < ratios[1] < ratios[2] < 2):
        return False, f"ratios {ratios} do not increase toward 2"
    pretty = ", ".join(str(r) for r in ratios)
    return True, f"10^5 first-item fills gain >= 1/2; det2 minimax = 1/(1/2+eps): {pretty}"


def _c3_one_random_bit(seed: int):
    worst = uniform_bit_worst_ratios(Fraction(1, 10**6))
    bound = Fraction(2) - Fraction(1, 10**5)
    shown = []
    for p, ratio in sorted(worst.items()):
        if ratio is not None and ratio < bound:
            return False, f"p={p}: worst ratio {float(ratio):.6f} below 2 - 1e-5"
        shown.append(f"p={p}: {'unbounded' if ratio is None else format(float(ratio), '.6f')}")
    return True, "; ".join(shown)


def _c4_equalization(seed: int):
    r = rand_minimax_chain(generate_family("det2", eps=0)).ratio
    if r != Fraction(3, 2):
        return False, f"det2 limit gives {r}, expected 3/2"
    r = rand_minimax_chain(generate_family("three", eps=0)).ratio
    if r != Fraction(19, 12):
        return False, f"three limit gives {r}, expected 19/12"
    for n in (10, 100):
        r = rand_minimax_chain(generate_family("prefix", n=n, eps=0)).ratio
        if r != 1 + harmonic_diff(n):
            return False, f"prefix({n}) gives {r}, expected 1 + H_2n - H_n"
    big = rand_minimax_chain(
        generate_family("prefix", n=10**4, eps=0), verify=False
    ).ratio
    if big != 1 + harmonic_diff(10**4):
        return False, "prefix(10^4) does not equal 1 + H_2n - H_n"
    if not float(big) > 1.693:
        return False, f"prefix(10^4) ratio {float(big)} does not exceed 1.693"
    return True, f"3/2, 19/12, 1+H_2n-H_n exact; prefix(10^4) = {float(big):.6f} > 1.693"


def _c5_prefix_strategy(seed: int):
    n = 100
    family = generate_family("prefix", n=n, eps=Fraction(1, 10**6))
    instances = family.instances()
    probs = algorithms.prefix_acceptance_probs(n)
    if sum(probs, ZERO) != 1:
        return False, "acceptance probabilities do not sum to 1 exactly"
    full = instances[-1]
    out = algorithms.prefix_family_strategy(full, n, mode="exact")
    accept = out.detail["acceptance_probs"]
    ratios = []
    expected = ZERO
    best = ZERO
    for k, item in enumerate(full.items):
        expected += accept[k] * item.size
        best = max(best, item.solo_gain)
        ratios.append(best / expected)
    # the incremental sums must match a standalone prefix computation
    mid = algorithms.prefix_family_strategy(instances[50], n, mode="exact")
    e50 = sum((accept[k] * full.items[k].size for k in range(51)), ZERO)
    if mid.expected_gain != e50:
        return False, "prefix expectations disagree between full and standalone runs"
    spread = max(ratios) - min(ratios)
    if spread > Fraction(1, 10**5):
        return False, f"ratio spread {float(spread):.3e} exceeds 1e-5"
    return True, f"sum p_k = 1 exactly; 101 exact ratios within {float(spread):.2e}"


def _c6_probability_shift(seed: int):
    n = 50
    family = generate_family("prefix", n=n, eps=0)
    res = rand_minimax_chain(family)
    c = res.ratio
    probs = list(res.probabilities)
    delta = Fraction(1, 1000)
    tested = 0
    for i in (0, 10, 25, 48):
        for sign in (1, -1):
            q = probs.copy()
            q[i] += sign * delta
            q[i + 1] -= sign * delta
            if q[i] < 0 or q[i + 1] < 0:
                return False, f"shift at {i} leaves negative mass"
            ratios = chain_expected_ratios(family, q)
            for j, r in enumerate(ratios):
                if j < i:
                    if r != c:
                        return False, f"c_{j} changed under a shift at step {i}"
                elif j == i:
                    if not (r < c if sign > 0 else r > c):
                        return False, f"c_{i} moved the wrong way (sign {sign})"
                else:
                    if not (r > c if sign > 0 else r < c):
                        return False, f"c_{j} moved the wrong way (sign {sign})"
            tested += 1
    return True, f"{tested} mass shifts at steps 0/10/25/48 behave exactly as derived"


def _c7_constants(seed: int):
    dist = compute_constants(1e-10)
    inv = 1.0 / dist.p_half
    cdf1 = cdf_X(dist, 1.0)
    failures = []
    if dist.eq1_residual > 1e-9:
        failures.append(f"eq1 residual {dist.eq1_residual:.2e}")
    if dist.eq2_residual > 1e-9:
        failures.append(f"eq2 residual {dist.eq2_residual:.2e}")
    if not 1.7351 <= inv <= 1.7353:
        failures.append(f"1/p_half {inv:.6f}")
    if not 0.122 <= dist.p_two_thirds <= 0.123:
        failures.append(f"p_two_thirds {dist.p_two_thirds:.6f}")
    if abs(cdf1 - 1.0) > 1e-10:
        failures.append(f"cdf(1) off by {abs(cdf1 - 1.0):.2e}")
    if failures:
        return False, "; ".join(failures)
    return True, (
        f"1/p_half = {inv:.6f}, p_two_thirds = {dist.p_two_thirds:.6f}, "
        f"residuals ({dist.eq1_residual:.1e}, {dist.eq2_residual:.1e}), "
        f"cdf(1) = 1 {cdf1 - 1.0:+.1e}"
    )


def _ks_statistic(dist, xs: np.ndarray) -> float:
    vals, counts = np.unique(xs, return_counts=True)
    n = xs.size
    cum = np.cumsum(counts)
    F = cdf_X_array(dist, vals)
    atom = np.zeros_like(F)
    atom[vals == 0.5] = dist.p_half
    atom[vals == 2.0 / 3.0] = dist.p_two_thirds
    f_left = F - atom
    at = cum / n
    below = (cum - counts) / n
    return float(np.maximum(np.abs(at - F), np.abs(below - f_left)).max())


def _c8_threshold_behavior(seed: int):
    dist = default_distribution()
    bound = 1.0 / dist.p_half + 1e-4
    families = (
        ("det2", generate_family("det2", eps=Fraction(1, 10**6))),
        ("prefix(10^3)", generate_family("prefix", n=1000, eps=Fraction(1, 10**6))),
    )
    for label, fam in families:
        rows = expected_ratio_exact(dist, fam)
        worst = max(r.ratio for r in rows)
        if worst > bound:
            return False, f"exact ratio {worst:.6f} on {label} exceeds 1/p_half + 1e-4"

    zs = []
    for spec in ("det2:eps=1/1000000", "prefix:n=1000,eps=1/1000000"):
        report = evaluate_randomized(
            ExperimentConfig("threshold_randomized", family=spec, trials=10**6, seed=seed)
        )
        zs.extend(abs(r.stats["z"]) for r in report.records)
    zs = np.array(zs)
    within3 = float((zs <= 3.0).mean())
    if within3 < 0.99 or zs.max() > 6.0:
        return False, (
            f"MC agreement too loose: {within3*100:.1f}% cells within 3 SE, "
            f"max |z| = {zs.max():.2f}"
        )

    u = instance_stream(seed, 808).random(10**5)
    xs = np.array([sample_X(dist, float(v)) for v in u])
    D = _ks_statistic(dist, xs)
    crit = math.sqrt(-math.log(0.005) / 2.0) / math.sqrt(xs.size)
    if D >= crit:
        return False, f"KS statistic {D:.5f} >= 1% critical value {crit:.5f}"
    return True, (
        f"exact ratios <= 1/p_half + 1e-4; {within3*100:.2f}% of {zs.size} MC cells "
        f"within 3 SE (max |z| {zs.max():.2f}); KS {D:.5f} < {crit:.5f}"
    )


def _c9_g_monotone(seed: int):
    g = check_g_monotone(default_distribution(), 10**4)
    if not g.increasing:
        return False, f"min successive difference {g.min_successive_diff:.2e} < -1e-12"
    return True, f"g increasing on a 10^4 grid (min successive diff {g.min_successive_diff:.2e})"


def _c10_one_bit(seed: int):
    rng = instance_stream(seed, 110)
    for _ in range(10**5):
        inst = random_simple_instance(rng, max_items=5, max_denominator=24)
        trace = advice.one_bit_pipeline(inst)
        opt = opt_exact(inst).value
        if 2 * opt > 3 * trace.gain:
            return False, f"one-bit ratio exceeds 3/2 on {inst.items}"
    fam = generate_family("advice_lb", n=8, eps=Fraction(1, 100))
    for inst in fam.instances():
        trace = advice.one_bit_pipeline(inst)
        opt = opt_exact(inst).value
        if 2 * opt > 3 * trace.gain:
            return False, f"one-bit ratio exceeds 3/2 on {inst.name}"
    small = generate_family("advice_lb", n=5, eps=Fraction(1, 100))
    r1 = det_minimax_with_advice(small, 1).ratio
    lower = ONE / (TWO_THIRDS + Fraction(2, 100))
    if r1 is None or r1 < lower:
        return False, f"1-bit advice minimax {r1} below {lower}"
    r2 = det_minimax_with_advice(small, 2).ratio
    if r2 != 1:
        return False, f"2-bit advice minimax {r2} != 1"
    return True, (
        f"one-bit <= 3/2 on 10^5 random + advice_lb(8) instances; advice minimax "
        f"b=1: {float(r1):.6f} >= {float(lower):.6f}, b=2: 1"
    )


def _c11_mixture(seed: int):
    det2 = generate_family("det2", eps=Fraction(1, 10**6))
    instances = list(det2.instances()) + [simple_instance(["6/10"], name="(6/10)")]
    slack = Fraction(1, 10**9)
    shown = []
    for p, bound in ((Fraction(3, 4), Fraction(24, 13)), (Fraction(8, 11), Fraction(11, 6))):
        worst = ZERO
        for inst in instances:
            out = algorithms.mixture_two_strategy(inst, p, mode="exact")
            if out.expected_gain == 0:
                return False, f"mixture p={p} has zero expected gain on {inst.name}"
            worst = max(worst, opt_exact(inst).value / out.expected_gain)
        if worst > bound + slack:
            return False, f"mixture p={p} worst ratio {worst} exceeds {bound} + 1e-9"
        shown.append(f"p={p}: worst {float(worst):.4f} <= {float(bound):.4f}")
    b1, b2 = algorithms.mixture_branch_bounds(Fraction(8, 11))
    if not (b1 == b2 == Fraction(11, 6)):
        return False, f"branch bounds at p=8/11 are {b1} and {b2}, expected 11/6"
    return True, "; ".join(shown) + "; branch bounds coincide at 11/6 for p=8/11"


def _c12_distinct_decisions(seed: int):
    shown = []
    for m in (4, 16, 64):
        res = distinct_first_decisions(generate_family("exact_lb", m=m))
        if res.count != m + 1:
            return False, f"m={m}: {res.count} distinct decisions, expected {m + 1}"
        expected_bits = m.bit_length()  # ceil(log2(m+1))
        if res.required_bits != expected_bits:
            return False, f"m={m}: bits {res.required_bits}, expected {expected_bits}"
        shown.append(f"m={m}: {res.count} decisions -> >= {res.required_bits} advice bits")
    return True, "; ".join(shown)


def _c13_general_unbounded(seed: int):
    shown = []
    for k in (3, 5, 8):
        res = det_minimax(generate_family("general_values", k=k))
        if res.ratio != Fraction(2 ** (k - 1)):
            return False, f"general_values({k}) minimax {res.ratio}, expected 2^{k-1}"
        shown.append(f"k={k}: {res.ratio}")
    return True, "minimax grows without bound: " + ", ".join(shown)


def _c14_eps_advice(seed: int):
    rng = instance_stream(seed, 114)
    eps_values = (Fraction(1, 2), Fraction(1, 5), Fraction(1, 10))
    count = 0
    for kind in ("general", "simple"):
        for _ in range(200):
            if kind == "general":
                inst = random_general_instance(rng, max_items=40, max_denominator=50)
            else:
                inst = random_simple_instance(rng, max_items=40, max_denominator=50)
            opt = opt_exact(inst).value
            for eps in eps_values:
                trace = advice.eps_advice_pipeline(inst, eps)
                if trace.gain < (1 - eps) * opt:
                    return False, (
                        f"gain {trace.gain} < (1-{eps})*opt with opt {opt} on {kind} instance"
                    )
                if trace.bits_read > advice.advice_bit_bound(len(inst), eps):
                    return False, f"tape of {trace.bits_read} bits exceeds the bound (n={len(inst)})"
                count += 1
    return True, f"{count} pipelines keep gain >= (1-eps)*opt exactly, bits within bound"


CRITERIA: tuple[tuple[int, str, Callable], ...] = (
    (1, "oracle equivalence (DP vs independent enumeration)", _c1_oracle_equivalence),
    (2, "deterministic ratio 2: upper by first-item fill, lower by det2 minimax", _c2_deterministic_two),
    (3, "one uniformly random bit cannot beat ratio 2", _c3_one_random_bit),
    (4, "equalization: 3/2, 19/12, and 1+H_2n-H_n on prefix chains", _c4_equalization),
    (5, "prefix strategy equalizes exact ratios; probabilities sum to 1", _c5_prefix_strategy),
    (6, "probability-shift monotonicity on prefix(50)", _c6_probability_shift),
    (7, "threshold distribution constants and residuals", _c7_constants),
    (8, "threshold strategy: exact ratios, Monte Carlo, sampler KS", _c8_threshold_behavior),
    (9, "ratio numerator/denominator monotonicity on [2/3, 1]", _c9_g_monotone),
    (10, "one advice bit: ratio 3/2, and the b-bit minimax lower bound", _c10_one_bit),
    (11, "mixture strategies: 24/13 and 11/6 bounds, equal branches at 8/11", _c11_mixture),
    (12, "exact optimality needs log(m+1) advice bits", _c12_distinct_decisions),
    (13, "general values: deterministic minimax grows as 2^(k-1)", _c13_general_unbounded),
    (14, "near-optimal advice: gain >= (1-eps)*opt within the bit bound", _c14_eps_advice),
)


def run_criterion(number: int, seed: int | None = None) -> CheckResult:
    seed = DEFAULT_ACCEPT_SEED if seed is None else seed
    for num, title, fn in CRITERIA:
        if num == number:
            start = time.perf_counter()
            passed, details = fn(seed)
            return CheckResult(num, title, passed, details, time.perf_counter() - start)
    raise ValueError(f"no criterion {number}")


def run_all(seed: int | None = None, only=None, log=None) -> list[CheckResult]:
    results = []
    for num, _, _ in CRITERIA:
        if only is not None and num not in only:
            continue
        result = run_criterion(num, seed)
        if log is not None:
            log(result.line())
        results.append(result)
    return results
