"""Experiment orchestration: deterministic and Monte Carlo evaluation.

Ratios in expectation are always opt / E[gain] (never E[opt/gain]; the two
differ).  Per-trial randomness is derived from (master seed, instance index,
trial index) through a counter-based generator, so results do not depend on
evaluation order and a fixed master seed reproduces reports bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import advice, algorithms, numerics
from .adversary import ChainFamily, generate_family
from .core import (
    GENERAL,
    Instance,
    InstanceRecord,
    Item,
    RatioReport,
    RunTrace,
    SIMPLE,
)
from .numerics import DistributionSpec, default_distribution
from .oracle import DEFAULT_DP_LIMIT, opt_exact

SEED_ENV_VAR = "OUKP_SEED"


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, "1729"))


@dataclass
class ExperimentConfig:
    """What to run: algorithm id, its parameters, and the instance source."""

    algorithm: str
    instances: Sequence[Instance] = ()
    family: str | None = None
    trials: int = 1
    seed: int | None = None
    eps: Fraction | None = None
    p: Fraction | None = None
    n: int | None = None
    tolerance: float = 1e-10
    dp_limit: int = DEFAULT_DP_LIMIT
    output: Path | None = None

    def resolve_instances(self) -> list[Instance]:
        if self.family is not None:
            return list(parse_family_spec(self.family).instances())
        return list(self.instances)


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean_gain: float
    std_error: float
    trials: int
    ratio: float


def parse_family_spec(spec) -> ChainFamily:
    """Parse "kind:key=value,..." into a family (eps=0 selects limit mode)."""
    if isinstance(spec, ChainFamily):
        return spec
    kind, _, rest = spec.partition(":")
    params = {}
    if rest:
        for piece in rest.split(","):
            key, _, value = piece.partition("=")
            if not value:
                raise ValueError(f"malformed family parameter {piece!r}")
            params[key.strip()] = int(value) if value.strip().isdigit() else value.strip()
    return generate_family(kind.strip(), **params)


def instance_stream(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for one instance; splitting is order-independent."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(ss))


# ---------------------------------------------------------------------------
# deterministic / advice-assisted evaluation
# ---------------------------------------------------------------------------

DETERMINISTIC_ALGORITHMS = ("first_item_fill", "greedy_fill", "wait_and_fill",
                            "one_bit", "eps_advice")
RANDOMIZED_ALGORITHMS = ("threshold_randomized", "mixture", "prefix_family")


def _deterministic_runner(config: ExperimentConfig) -> Callable[[Instance], RunTrace]:
    name = config.algorithm
    if name == "first_item_fill":
        return algorithms.first_item_fill
    if name == "greedy_fill":
        return algorithms.greedy_fill
    if name == "wait_and_fill":
        return algorithms.wait_and_fill
    if name == "one_bit":
        return advice.one_bit_pipeline
    if name == "eps_advice":
        eps = config.eps if config.eps is not None else Fraction(1, 10)
        return lambda inst: advice.eps_advice_pipeline(inst, eps)
    raise ValueError(f"unknown deterministic algorithm {name!r}")


def evaluate_deterministic(config: ExperimentConfig) -> RatioReport:
    """Run a deterministic or advice-assisted algorithm over instances.

    Records exact rational ratios and checks oracle dominance on every run.
    """
    run = _deterministic_runner(config)
    records = []
    for idx, inst in enumerate(config.resolve_instances()):
        opt = opt_exact(inst, dp_limit=config.dp_limit).value
        trace = run(inst)
        if trace.gain > opt:
            raise RuntimeError(
                f"oracle dominance violated on {inst.name}: gain {trace.gain} > opt {opt}"
            )
        name = inst.name or f"instance[{idx}]"
        if opt == 0:
            records.append(InstanceRecord(name, opt, gain=trace.gain, ratio=Fraction(1)))
        elif trace.gain == 0:
            records.append(InstanceRecord(name, opt, gain=trace.gain, ratio=None,
                                          unbounded=True))
        else:
            records.append(InstanceRecord(name, opt, gain=trace.gain,
                                          ratio=opt / trace.gain))
    params = {}
    if config.eps is not None:
        params["eps"] = str(config.eps)
    return RatioReport(config.algorithm, tuple(records), seed=None, trials=None,
                       params=params)


# ---------------------------------------------------------------------------
# randomized evaluation with exact expectations where they exist
# ---------------------------------------------------------------------------


def _discrete_outcomes(
    config: ExperimentConfig,
    inst: Instance,
    draws: np.ndarray,
    dist: DistributionSpec | None,
) -> tuple[np.ndarray, np.ndarray] | None:
    """(possible gains, per-trial outcome index), or None when the instance
    needs the scalar fallback.  Every strategy here draws one uniform and
    gains one of at most len(instance)+1 values, so Monte Carlo statistics
    reduce to outcome counts."""
    name = config.algorithm
    if name == "threshold_randomized":
        try:
            breaks = algorithms._threshold_breaks(inst)
        except ValueError:
            return None
        values = np.append(breaks, 0.0)
        if breaks.size == 0:
            return values, np.zeros(draws.shape, dtype=np.intp)
        cdf_at_breaks = np.array(
            [numerics.cdf_X(dist, min(float(b), 1.0)) for b in breaks]
        )
        # X <= b iff u <= F(b): bucket = first breakpoint whose CDF reaches u
        return values, np.searchsorted(cdf_at_breaks, draws, side="left")
    if name == "mixture":
        p = float(config.p if config.p is not None else Fraction(3, 4))
        g_greedy = float(algorithms.greedy_fill(inst).gain)
        g_wait = float(algorithms.wait_and_fill(inst).gain)
        return np.array([g_greedy, g_wait]), (draws >= p).astype(np.intp)
    if name == "prefix_family":
        n = config.n if config.n is not None else max(1, len(inst))
        probs = algorithms.prefix_acceptance_probs(n)
        cum = np.cumsum([float(q) for q in probs])
        ck = np.array(
            [cum[algorithms._prefix_bucket(item.size, n)] for item in inst.items]
        )
        if np.any(np.diff(ck) < 0):
            return None
        sizes = np.array([float(item.size) for item in inst.items])
        values = np.append(sizes, 0.0)
        return values, np.searchsorted(ck, draws, side="right")
    raise ValueError(f"unknown randomized algorithm {name!r}")


def _gain_stats(
    config: ExperimentConfig,
    inst: Instance,
    draws: np.ndarray,
    dist: DistributionSpec | None,
) -> tuple[float, float]:
    """(mean gain, sample standard deviation) over the trial draws."""
    n = draws.size
    disc = _discrete_outcomes(config, inst, draws, dist)
    if disc is not None:
        values, idx = disc
        counts = np.bincount(idx, minlength=values.size)
        mean = float(counts @ values) / n
        ex2 = float(counts @ (values * values)) / n
        var = max(ex2 - mean * mean, 0.0) * (n / (n - 1)) if n > 1 else 0.0
        return mean, math.sqrt(var)
    name = config.algorithm
    if name == "threshold_randomized":
        xs = numerics.sample_X_array(dist, draws)
        gains = np.array(
            [float(algorithms.threshold_trace(inst, float(x)).gain) for x in xs]
        )
    elif name == "prefix_family":
        nn = config.n if config.n is not None else max(1, len(inst))
        gains = np.array(
            [float(algorithms.prefix_trace_for_draw(inst, nn, float(u)).gain)
             for u in draws]
        )
    else:  # pragma: no cover - mixture always vectorizes
        raise ValueError(f"no fallback for {name!r}")
    mean = float(gains.mean())
    sd = float(gains.std(ddof=1)) if n > 1 else 0.0
    return mean, sd


def _exact_expectation(
    config: ExperimentConfig, inst: Instance, dist: DistributionSpec | None
) -> float | None:
    name = config.algorithm
    if name == "threshold_randomized":
        try:
            rows = numerics.expected_ratio_exact(dist, [inst])
        except ValueError:
            return None
        return rows[0].expected_gain
    if name == "mixture":
        p = config.p if config.p is not None else Fraction(3, 4)
        return float(algorithms.mixture_two_strategy(inst, p, mode="exact").expected_gain)
    if name == "prefix_family":
        n = config.n if config.n is not None else max(1, len(inst))
        return float(algorithms.prefix_family_strategy(inst, n, mode="exact").expected_gain)
    return None


def evaluate_randomized(config: ExperimentConfig) -> RatioReport:
    """Monte Carlo evaluation; ratio = opt / mean gain per instance.

    Where an exact expectation exists it is reported next to the estimate
    together with the z-score of the Monte Carlo mean.
    """
    if config.trials < 1:
        raise ValueError("randomized evaluation needs trials >= 1")
    seed = config.seed if config.seed is not None else default_seed()
    dist = None
    if config.algorithm == "threshold_randomized":
        dist = default_distribution(config.tolerance)
    records = []
    for idx, inst in enumerate(config.resolve_instances()):
        opt_value = opt_exact(inst, dp_limit=config.dp_limit).value
        opt = float(opt_value)
        draws = instance_stream(seed, idx).random(config.trials)
        mean, sd = _gain_stats(config, inst, draws, dist)
        est = MonteCarloEstimate(
            mean_gain=mean,
            std_error=sd / math.sqrt(config.trials) if config.trials > 1 else math.inf,
            trials=config.trials,
            ratio=opt / mean if mean > 0 else math.inf,
        )
        stats = {"std_error": est.std_error, "trials": float(est.trials)}
        exact = _exact_expectation(config, inst, dist)
        if exact is not None:
            stats["exact_expected_gain"] = exact
            stats["exact_ratio"] = opt / exact if exact > 0 else math.inf
            if est.std_error > 0 and math.isfinite(est.std_error):
                stats["z"] = (mean - exact) / est.std_error
        name = inst.name or f"instance[{idx}]"
        if mean <= 0 and opt > 0:
            records.append(
                InstanceRecord(name, opt_value, expected_gain=mean, ratio=None,
                               unbounded=True, stats=stats)
            )
        else:
            ratio = est.ratio if mean > 0 else 1.0
            records.append(
                InstanceRecord(name, opt_value, expected_gain=mean, ratio=ratio,
                               stats=stats)
            )
    params = {}
    for key in ("eps", "p", "n"):
        value = getattr(config, key)
        if value is not None:
            params[key] = str(value)
    return RatioReport(config.algorithm, tuple(records), seed=seed,
                       trials=config.trials, params=params)


# ---------------------------------------------------------------------------
# random instance generators for property suites
# ---------------------------------------------------------------------------


def random_simple_instance(
    rng: np.random.Generator,
    *,
    max_items: int = 6,
    max_denominator: int = 20,
    name: str = "",
) -> Instance:
    """Random simple instance; sizes share one denominator so that the exact
    DP stays cheap (the oracle's common denominator then divides it)."""
    n = int(rng.integers(1, max_items + 1))
    q = int(rng.integers(2, max_denominator + 1))
    items = []
    for _ in range(n):
        p = int(rng.integers(1, q + 1))
        size = Fraction(p, q)
        items.append(Item(size, size))
    return Instance(tuple(items), SIMPLE, name)


def random_general_instance(
    rng: np.random.Generator,
    *,
    max_items: int = 6,
    max_denominator: int = 20,
    name: str = "",
) -> Instance:
    n = int(rng.integers(1, max_items + 1))
    q = int(rng.integers(2, max_denominator + 1))
    qv = int(rng.integers(1, max_denominator + 1))
    items = []
    for _ in range(n):
        p = int(rng.integers(1, q + 1))
        value = Fraction(int(rng.integers(0, qv + 1)), qv)
        items.append(Item(Fraction(p, q), value))
    return Instance(tuple(items), GENERAL, name)


# ---------------------------------------------------------------------------
# report serialization: JSON for machines, aligned text for humans, CSV rows
# ---------------------------------------------------------------------------


def _ratio_repr(value) -> str:
    if value is None:
        return "unbounded"
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


def report_to_json(report: RatioReport) -> str:
    payload = {
        "algorithm": report.algorithm,
        "seed": report.seed,
        "trials": report.trials,
        "params": dict(report.params),
        "worst_ratio": _ratio_repr(report.worst_ratio),
        "worst_ratio_float": (
            None if report.worst_ratio is None else float(report.worst_ratio)
        ),
        "records": [
            {
                "instance": r.instance,
                "opt": str(r.opt),
                "gain": None if r.gain is None else str(r.gain),
                "expected_gain": r.expected_gain,
                "ratio": _ratio_repr(r.ratio),
                "ratio_float": None if r.ratio is None else float(r.ratio),
                "unbounded": r.unbounded,
                "stats": dict(r.stats),
            }
            for r in report.records
        ],
    }
    return json.dumps(payload, indent=2)


def report_to_text(report: RatioReport) -> str:
    header = f"{'instance':24} {'opt':>14} {'gain':>16} {'ratio':>14}"
    lines = [f"algorithm: {report.algorithm}"]
    if report.params:
        lines.append("params: " + ", ".join(f"{k}={v}" for k, v in report.params.items()))
    if report.seed is not None:
        lines.append(f"seed: {report.seed}  trials: {report.trials}")
    lines.append(header)
    lines.append("-" * len(header))
    for r in report.records:
        gain = r.gain if r.gain is not None else r.expected_gain
        gain_s = str(gain) if isinstance(gain, Fraction) else (
            "" if gain is None else f"{gain:.9g}")
        ratio_s = _ratio_repr(r.ratio)
        if isinstance(r.ratio, Fraction):
            ratio_s = f"{float(r.ratio):.9g}"
        elif isinstance(r.ratio, float):
            ratio_s = f"{r.ratio:.9g}"
        lines.append(f"{r.instance:24} {str(r.opt):>14} {gain_s:>16} {ratio_s:>14}")
    lines.append(f"worst ratio: {_ratio_repr(report.worst_ratio)}")
    return "\n".join(lines) + "\n"


def report_to_csv(report: RatioReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["instance", "opt", "gain", "expected_gain", "ratio",
                     "ratio_float", "unbounded", "std_error", "z"])
    for r in report.records:
        writer.writerow([
            r.instance,
            str(r.opt),
            "" if r.gain is None else str(r.gain),
            "" if r.expected_gain is None else repr(r.expected_gain),
            _ratio_repr(r.ratio),
            "" if r.ratio is None else repr(float(r.ratio)),
            int(r.unbounded),
            r.stats.get("std_error", ""),
            r.stats.get("z", ""),
        ])
    return buf.getvalue()
