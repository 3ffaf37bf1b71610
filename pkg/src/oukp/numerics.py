"""Floating-point machinery for the randomized threshold strategy.

The strategy draws a threshold X supported on [1/2, 1] with atoms at 1/2 and
2/3 and densities p/x on (1/2, 2/3) and p*(1+ln(2-x))/(2x) on (2/3, 1],
where the atom masses solve a 2x2 system whose closed forms involve
J = integral of (1+ln(2-x))/x over [2/3, 1].  Everything here is double
precision; the error budget per operation is stated so test tolerances
compose.  Exact rational work (harmonic sums) lives here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

_TWO_THIRDS = 2.0 / 3.0

# resolution of the precomputed CDF table on (2/3, 1]
_PIECE2_CELLS = 1 << 16
# resolution of the inversion knots on (1/2, 2/3)
_PIECE1_KNOTS = 1 << 12


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge within the depth budget."""


def adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 60) -> float:
    """Adaptive Simpson with interval bisection and Richardson correction."""

    def rec(a, fa, fm, fb, b, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        if depth <= 0:
            raise QuadratureError(f"no convergence on [{a}, {b}]")
        return rec(a, fa, flm, fm, m, left, tol / 2.0, depth - 1) + rec(
            m, fm, frm, fb, b, right, tol / 2.0, depth - 1
        )

    fa, fb = f(a), f(b)
    fm = f(0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return rec(a, fa, fm, fb, b, whole, tol, max_depth)


def _piece2_density_over_x(x: float) -> float:
    """(1 + ln(2-x)) / x, the integrand of J."""
    return (1.0 + math.log(2.0 - x)) / x


@dataclass(frozen=True)
class DistributionSpec:
    """Threshold distribution: atom masses, J, and the precomputed CDF table."""

    p_half: float
    p_two_thirds: float
    integral_j: float
    tolerance: float
    eq1_residual: float
    eq2_residual: float
    xs2: np.ndarray          # piece-2 grid nodes on [2/3, 1]
    cdf2: np.ndarray         # CDF at xs2 (atom at 2/3 included)
    inv_cdf_f: np.ndarray    # inversion knots: CDF values ...
    inv_cdf_x: np.ndarray    # ... and the x they map back to

    @property
    def cdf_at_two_thirds(self) -> float:
        return float(self.cdf2[0])

    @property
    def cdf_before_two_thirds(self) -> float:
        return self.p_half * (1.0 + math.log(4.0 / 3.0))


def compute_constants(tolerance: float = 1e-10) -> DistributionSpec:
    """Solve for the atom masses and build the CDF table.

    J is evaluated by adaptive Simpson to ``tolerance``; the closed forms
    p_half = 2/(3+J) and p_two_thirds = (1 - 2 ln(4/3))/(3+J) follow from the
    defining system.  Residuals of both defining equations are reported, the
    second one via the independently built table quadrature.
    """
    if not 0.0 < tolerance <= 1e-6:
        raise ValueError(f"tolerance must be in (0, 1e-6], got {tolerance}")
    J = adaptive_simpson(_piece2_density_over_x, _TWO_THIRDS, 1.0, tolerance)
    ln43 = math.log(4.0 / 3.0)
    p_half = 2.0 / (3.0 + J)
    p_two_thirds = (1.0 - 2.0 * ln43) / (3.0 + J)

    # piece-2 CDF table: per-cell Simpson of the density, accumulated
    xs2 = np.linspace(_TWO_THIRDS, 1.0, _PIECE2_CELLS + 1)
    mids = 0.5 * (xs2[:-1] + xs2[1:])

    def f2(x):
        return p_half * (1.0 + np.log(2.0 - x)) / (2.0 * x)

    h = np.diff(xs2)
    cells = h / 6.0 * (f2(xs2[:-1]) + 4.0 * f2(mids) + f2(xs2[1:]))
    F23 = p_half * (1.0 + ln43) + p_two_thirds
    cdf2 = F23 + np.concatenate(([0.0], np.cumsum(cells)))

    eq1 = abs(p_half - (2.0 / 3.0) * (p_two_thirds + p_half + p_half * ln43))
    eq2 = abs(1.0 - float(cdf2[-1]))
    if max(eq1, eq2) > 10.0 * tolerance:
        raise QuadratureError(
            f"equation residuals {eq1:.3e}, {eq2:.3e} exceed 10*tolerance"
        )

    # inversion knots (CDF value -> x); atoms appear as flat x segments
    x1 = np.linspace(0.5, _TWO_THIRDS, _PIECE1_KNOTS + 1)
    F1 = p_half * (1.0 + np.log(2.0 * x1))
    inv_f = np.concatenate(([0.0], F1, [F23], cdf2[1:]))
    inv_x = np.concatenate(([0.5], x1, [_TWO_THIRDS], xs2[1:]))

    return DistributionSpec(
        p_half=p_half,
        p_two_thirds=p_two_thirds,
        integral_j=J,
        tolerance=tolerance,
        eq1_residual=eq1,
        eq2_residual=eq2,
        xs2=xs2,
        cdf2=cdf2,
        inv_cdf_f=inv_f,
        inv_cdf_x=inv_x,
    )


@lru_cache(maxsize=4)
def default_distribution(tolerance: float = 1e-10) -> DistributionSpec:
    return compute_constants(tolerance)


def _piece2_cdf_scalar(dist: DistributionSpec, x: float) -> float:
    """Table node plus a local Simpson correction; error ~1e-16."""
    xs2 = dist.xs2
    i = int(np.searchsorted(xs2, x, side="right")) - 1
    i = min(max(i, 0), len(xs2) - 2)
    a = float(xs2[i])
    if x <= a:
        return float(dist.cdf2[i])

    def f2(t):
        return dist.p_half * (1.0 + math.log(2.0 - t)) / (2.0 * t)

    m = 0.5 * (a + x)
    local = (x - a) / 6.0 * (f2(a) + 4.0 * f2(m) + f2(x))
    return float(dist.cdf2[i]) + local


def cdf_X(dist: DistributionSpec, x: float) -> float:
    """Right-continuous CDF of the threshold; F(1) = 1 within 1e-10."""
    if x < 0.0 or x > 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x < 0.5:
        return 0.0
    if x < _TWO_THIRDS:
        return dist.p_half * (1.0 + math.log(2.0 * x))
    return _piece2_cdf_scalar(dist, x)


def cdf_X_array(dist: DistributionSpec, x: np.ndarray) -> np.ndarray:
    """Vectorized CDF (table interpolation on piece 2; error < 1e-11)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    piece1 = (x >= 0.5) & (x < _TWO_THIRDS)
    out[piece1] = dist.p_half * (1.0 + np.log(2.0 * x[piece1]))
    piece2 = x >= _TWO_THIRDS
    out[piece2] = np.interp(x[piece2], dist.xs2, dist.cdf2)
    return out


def sample_X(dist: DistributionSpec, u: float) -> float:
    """Inverse CDF: inf{x : F(x) >= u}, resolved to 1e-12 by bisection.

    Atoms map [0, p_half) to 1/2 and [F(2/3-), F(2/3)) to 2/3.
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u}")
    if u < dist.p_half:
        return 0.5
    F23m = dist.cdf_before_two_thirds
    if u < F23m:
        lo, hi = 0.5, _TWO_THIRDS
        # closed-form piece-1 CDF: p_half * (1 + ln 2x)
        while hi - lo > 1e-13:
            mid = 0.5 * (lo + hi)
            if dist.p_half * (1.0 + math.log(2.0 * mid)) >= u:
                hi = mid
            else:
                lo = mid
        return hi
    F23 = dist.cdf_at_two_thirds
    if u < F23:
        return _TWO_THIRDS
    cdf2 = dist.cdf2
    if u >= float(cdf2[-1]):
        return 1.0
    # bracket on the table, then bisect inside one cell
    j = int(np.searchsorted(cdf2, u, side="left"))
    lo, hi = float(dist.xs2[j - 1]), float(dist.xs2[j])
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if _piece2_cdf_scalar(dist, mid) >= u:
            hi = mid
        else:
            lo = mid
    return hi


def sample_X_array(dist: DistributionSpec, u: np.ndarray) -> np.ndarray:
    """Vectorized inverse CDF via the precomputed knots (error < 1e-8).

    Suitable for Monte Carlo, where the inversion error is far below any
    standard error of interest; precision work should use sample_X.
    """
    return np.interp(np.asarray(u, dtype=float), dist.inv_cdf_f, dist.inv_cdf_x)


@dataclass(frozen=True)
class ChainRatioRow:
    label: str
    opt: float
    expected_gain: float
    ratio: float


def expected_ratio_exact(dist: DistributionSpec, chain) -> list[ChainRatioRow]:
    """Exact expected ratios of the threshold strategy on a >=1/2 chain.

    With every size at least 1/2 the strategy's gain is piecewise constant
    in X: it packs the first item whose solo gain reaches X (gaining exactly
    that solo gain) and nothing after.  The expectation is a sum of CDF
    increments over those acceptance buckets, and the offline optimum is the
    best solo gain seen so far.  ``chain`` may be a family object exposing
    ``instances()`` or any sequence of instances.
    """
    instances = list(chain.instances()) if hasattr(chain, "instances") else list(chain)
    rows: list[ChainRatioRow] = []
    prev_items: tuple = ()
    exp_gain = 0.0
    best_solo = 0.0
    prev_cdf = 0.0
    opt_solo = 0.0
    for inst in instances:
        if not inst.items[: len(prev_items)] == prev_items:
            # not a prefix continuation: restart the accumulation
            prev_items = ()
            exp_gain = 0.0
            best_solo = 0.0
            prev_cdf = 0.0
            opt_solo = 0.0
        for item in inst.items[len(prev_items):]:
            if item.size < Fraction(1, 2):
                raise ValueError(
                    f"chain violates precondition: item size {item.size} < 1/2"
                )
            solo = float(item.solo_gain)
            if solo > best_solo:
                F = cdf_X(dist, min(solo, 1.0))
                exp_gain += (F - prev_cdf) * solo
                prev_cdf = F
                best_solo = solo
            opt_solo = max(opt_solo, solo)
        prev_items = inst.items
        ratio = opt_solo / exp_gain if exp_gain > 0.0 else math.inf
        rows.append(ChainRatioRow(inst.name, opt_solo, exp_gain, ratio))
    return rows


@dataclass(frozen=True)
class GMonotonicity:
    increasing: bool
    min_successive_diff: float


def check_g_monotone(dist: DistributionSpec, grid_points: int) -> GMonotonicity:
    """Check that xi / (2/3 (p_half+p_two_thirds) + int_{2/3}^xi x f(x) dx)
    is increasing on [2/3, 1], on a uniform grid."""
    if grid_points < 10:
        raise ValueError("grid_points must be at least 10")
    xi = np.linspace(_TWO_THIRDS, 1.0, grid_points)
    # x * f2(x) = p_half (1 + ln(2-x)) / 2, accumulated per cell by Simpson
    mids = 0.5 * (xi[:-1] + xi[1:])

    def xf(x):
        return dist.p_half * (1.0 + np.log(2.0 - x)) / 2.0

    h = np.diff(xi)
    cells = h / 6.0 * (xf(xi[:-1]) + 4.0 * xf(mids) + xf(xi[1:]))
    base = 2.0 / 3.0 * (dist.p_half + dist.p_two_thirds)
    denom = base + np.concatenate(([0.0], np.cumsum(cells)))
    g = xi / denom
    diffs = np.diff(g)
    min_diff = float(diffs.min())
    return GMonotonicity(increasing=bool(min_diff >= -1e-12), min_successive_diff=min_diff)


def harmonic_diff(n: int) -> Fraction:
    """Exact H_{2n} - H_n = sum_{k=1}^{n} 1/(n+k), as a Fraction.

    Divide-and-conquer keeps the big-integer work near the leaves.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")

    def rec(lo: int, hi: int) -> Fraction:
        # sum of 1/k for k in [lo, hi)
        if hi - lo == 1:
            return Fraction(1, lo)
        mid = (lo + hi) // 2
        return rec(lo, mid) + rec(mid, hi)

    return rec(n + 1, 2 * n + 1)
