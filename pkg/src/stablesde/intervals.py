"""Finite unions of half-open intervals, geometric shells, stable capacities,
and the Wiener summation test for avoidability/thinness.

All sets are represented as sorted disjoint unions of half-open intervals
[a, b).  Endpoint conventions differ from the strict/non-strict inequalities
defining shells by sets of measure zero, which is irrelevant to every
integral computed downstream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma


@dataclass(frozen=True)
class IntervalSet:
    """Finite disjoint union of half-open intervals [a, b), kept normalized."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", _normalize(self.intervals))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def of(cls, *pairs) -> "IntervalSet":
        return cls(tuple((float(a), float(b)) for a, b in pairs))

    def is_empty(self) -> bool:
        return not self.intervals

    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals))

    def contains(self, x):
        """Vectorized membership test for scalar or array x."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            out |= (x >= a) & (x < b)
        return bool(out) if out.ndim == 0 else out

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.intervals + other.intervals)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        pieces = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    pieces.append((lo, hi))
        return IntervalSet(tuple(pieces))

    def complement_within(self, window: tuple[float, float]) -> "IntervalSet":
        """Complement of the set restricted to the window [lo, hi)."""
        lo, hi = window
        pieces = []
        cursor = lo
        for a, b in self.intervals:
            if b <= lo or a >= hi:
                continue
            if cursor < a:
                pieces.append((cursor, min(a, hi)))
            cursor = max(cursor, b)
        if cursor < hi:
            pieces.append((cursor, hi))
        return IntervalSet(tuple(pieces))

    def distance_to(self, x: float) -> float:
        """Distance from the point x to the set (0 if inside)."""
        if self.contains(x):
            return 0.0
        best = math.inf
        for a, b in self.intervals:
            best = min(best, abs(x - a), abs(x - b))
        return best

    def to_json(self) -> str:
        return json.dumps([[a, b] for a, b in self.intervals])

    @classmethod
    def from_json(cls, text: str) -> "IntervalSet":
        return cls.of(*json.loads(text))


def _normalize(pairs):
    """Sort, drop empty intervals, merge overlapping/adjacent ones."""
    cleaned = sorted((float(a), float(b)) for a, b in pairs if a < b)
    merged: list[list[float]] = []
    for a, b in cleaned:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return tuple((a, b) for a, b in merged)


@dataclass(frozen=True)
class ShellSpec:
    """Geometric shells around a center: the n-th shell is the set of points
    at distance in (lambda^{n-1}, lambda^n] from the center."""

    center: float = 0.0
    lam: float = 2.0
    n_min: int = 1
    n_max: int = 200

    def __post_init__(self):
        if self.lam <= 1:
            raise ValueError("shell ratio must exceed 1")
        if self.n_min > self.n_max:
            raise ValueError("empty shell index range")


def shell(spec: ShellSpec, n: int) -> IntervalSet:
    """The two-component shell at index n, as half-open intervals."""
    z, lam = spec.center, spec.lam
    r_in, r_out = lam ** (n - 1), lam ** n
    return IntervalSet.of((z - r_out, z - r_in), (z + r_in, z + r_out))


def ball_capacity(alpha: float, r: float) -> float:
    """Riesz capacity of a ball of radius r for the symmetric alpha-stable
    process on the line, alpha in (0,1): C(B_r) = r^(1-alpha) * C(B_1) with
    C(B_1) = Gamma(1/2) / (Gamma(alpha/2) * Gamma((1-alpha)/2 + 1))."""
    _check_alpha(alpha)
    if r <= 0:
        raise ValueError("radius must be positive")
    c1 = gamma(0.5) / (gamma(alpha / 2.0) * gamma((1.0 - alpha) / 2.0 + 1.0))
    return float(r ** (1.0 - alpha) * c1)


def capacity_lower_bound(alpha: float, s: IntervalSet) -> float:
    """Isoperimetric lower bound: any set of Lebesgue measure m has capacity
    at least that of the ball of the same measure (radius m/2)."""
    _check_alpha(alpha)
    m = s.measure()
    if m == 0.0:
        return 0.0
    return ball_capacity(alpha, 1.0) * 2.0 ** (alpha - 1.0) * m ** (1.0 - alpha)


def interval_capacity_upper(alpha: float, s: IntervalSet) -> float:
    """Subadditive upper bound: sum of per-component ball capacities.
    Exact for a single interval (which is a translated ball)."""
    _check_alpha(alpha)
    return float(sum(ball_capacity(alpha, (b - a) / 2.0) for a, b in s.intervals))


@dataclass
class SeriesVerdict:
    """Outcome of the Wiener summation test.  partial_sums accumulates the
    upper-bound terms; lower_partial_sums the isoperimetric lower bounds."""

    partial_sums: list[float] = field(default_factory=list)
    lower_partial_sums: list[float] = field(default_factory=list)
    verdict: str = "inconclusive"
    ratio_estimate: float | None = None
    terms_used: int = 0

    @property
    def total(self) -> float:
        return self.partial_sums[-1] if self.partial_sums else 0.0

    def to_json(self, max_sums: int = 50) -> str:
        return json.dumps(
            {
                "verdict": self.verdict,
                "partial_sums": self.partial_sums[-max_sums:],
                "ratio_estimate": self.ratio_estimate,
                "terms_used": self.terms_used,
            }
        )


#: ratio test needs this many consecutive contracting term ratios
RATIO_RUN = 20
RATIO_MARGIN = 1e-3
DIVERGENCE_BOUND = 1e6


def wiener_sum(
    alpha: float,
    spec: ShellSpec,
    s: IntervalSet,
    divergence_bound: float = DIVERGENCE_BOUND,
) -> SeriesVerdict:
    """Wiener summation test sum_n lambda^{n(alpha-1)} C(B cap S_n).

    The per-shell capacity is bracketed by the isoperimetric lower bound and
    the per-component subadditive upper bound.  `convergent` when the
    upper-bound terms contract geometrically over a sustained run;
    `divergent` when the lower-bound partial sums exceed the divergence
    bound or the lower-bound terms stop decaying; `inconclusive` otherwise.
    """
    _check_alpha(alpha)
    upper_sums: list[float] = []
    lower_sums: list[float] = []
    upper_terms: list[float] = []
    lower_terms: list[float] = []
    up_total = lo_total = 0.0
    for n in range(spec.n_min, spec.n_max + 1):
        piece = s.intersection(shell(spec, n))
        weight = spec.lam ** (n * (alpha - 1.0))
        u = weight * interval_capacity_upper(alpha, piece)
        l = weight * capacity_lower_bound(alpha, piece)
        up_total += u
        lo_total += l
        upper_terms.append(u)
        lower_terms.append(l)
        upper_sums.append(up_total)
        lower_sums.append(lo_total)

    out = SeriesVerdict(
        partial_sums=upper_sums,
        lower_partial_sums=lower_sums,
        terms_used=len(upper_terms),
    )
    nz = [t for t in upper_terms if t > 0.0]
    if not nz:
        out.verdict = "convergent"
        out.ratio_estimate = 0.0
        return out
    ratios = [b / a for a, b in zip(nz, nz[1:]) if a > 0.0]
    if ratios:
        out.ratio_estimate = float(np.median(ratios))

    if lo_total > divergence_bound:
        out.verdict = "divergent"
        return out
    # non-decaying positive lower-bound terms certify divergence even before
    # the partial sums clear the bound
    lnz = [t for t in lower_terms if t > 0.0]
    lratios = [b / a for a, b in zip(lnz, lnz[1:])]
    if len(lratios) >= RATIO_RUN and all(
        r >= 1.0 - RATIO_MARGIN for r in lratios[-RATIO_RUN:]
    ):
        out.verdict = "divergent"
        return out
    # a sustained contracting run plus an overall decayed tail certifies
    # convergence; the very last ratios may wobble once interval widths
    # quantize to ulps of the shell scale
    if _best_run(ratios) >= RATIO_RUN and nz[-1] <= nz[0]:
        out.verdict = "convergent"
        return out
    out.verdict = "inconclusive"
    return out


def _best_run(ratios) -> int:
    """Longest streak of consecutive ratios at or below 1 - RATIO_MARGIN."""
    best = cur = 0
    for r in ratios:
        cur = cur + 1 if r <= 1.0 - RATIO_MARGIN else 0
        best = max(best, cur)
    return best


def build_example_set(n_max: int) -> IntervalSet:
    """Union of the intervals [2^n - 2^((n-1)/3), 2^n) for n = 1..n_max:
    shrinking (relative to scale) blocks drifting to infinity, avoidable for
    every alpha in (0,1) yet of infinite potential for alpha > 2/3."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    pieces = [
        (2.0 ** n - 2.0 ** ((n - 1) / 3.0), 2.0 ** n) for n in range(1, n_max + 1)
    ]
    return IntervalSet.of(*pieces)


def example_set_potential_partial_sums(alpha: float, n_max: int):
    """Exact partial sums of the potential of the example set seen from 0,
    sum_n (2^{n a} - (2^n - 2^{(n-1)/3})^a) / a, together with a geometric
    tail bound.  Divergent for alpha > 2/3, convergent below."""
    _check_alpha(alpha)
    n = np.arange(1, n_max + 1, dtype=float)
    # 2^{n a}(1 - (1 - w/2^n)^a)/a with w = 2^{(n-1)/3}, via expm1/log1p to
    # dodge catastrophic cancellation once w/2^n nears machine epsilon
    ratio_w = 2.0 ** ((n - 1.0) / 3.0 - n)
    terms = 2.0 ** (n * alpha) * (-np.expm1(alpha * np.log1p(-ratio_w))) / alpha
    sums = np.cumsum(terms)
    ratio = 2.0 ** (alpha - 2.0 / 3.0)
    tail = math.inf if ratio >= 1.0 else float(terms[-1] * ratio / (1.0 - ratio))
    return sums, tail


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
