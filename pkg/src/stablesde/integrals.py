"""Singularity-aware evaluation of kernel integrals int f(y)|z-y|^(alpha-1) dy,
the monotone-pole small-time test, the closed-form power-law test, and the
construction of the irregular set O and zero set N for structured sigma.

Finiteness is always decided analytically from local exponents; quadrature is
only used to produce values for integrals already known to converge.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

from scipy.integrate import IntegrationWarning, quad

from .funcspec import FunctionSpec, FunctionSpecError, PowerForm, TableForm
from .intervals import IntervalSet

INF = math.inf


class UnflaggedZeroError(FunctionSpecError):
    """Raised when a verdict would require deciding thinness of an arbitrary
    set; only monotone-flagged point zeros and interval zeros are decidable."""


@dataclass
class TestVerdict:
    finiteness: str  # finite | infinite | inconclusive
    value_or_bound: float
    abs_error_estimate: float = 0.0
    method: str = ""

    def __post_init__(self):
        if self.finiteness == "finite" and not math.isfinite(self.value_or_bound):
            raise ValueError("finite verdict with non-finite value")

    def to_json(self) -> str:
        return json.dumps(
            {
                "finiteness": self.finiteness,
                "value": self.value_or_bound,
                "abs_error": self.abs_error_estimate,
                "method": self.method,
            }
        )


def _anchored_power_integral(cp: float, k: float, s: float, a: float, b: float):
    """int_a^b cp*|y-s|^k dy with full singularity/unboundedness handling.
    Returns (value, finite_flag)."""
    if cp == 0.0:
        return 0.0, True

    def side(lo: float, hi: float):
        # integral of d^k over d in [lo, hi], 0 <= lo < hi <= inf
        if lo == hi:
            return 0.0, True
        if lo == 0.0 and k <= -1.0:
            return INF, False
        if math.isinf(hi) and k >= -1.0:
            return INF, False
        if k == -1.0:
            return math.log(hi) - math.log(lo), True
        kp = k + 1.0
        top = 0.0 if math.isinf(hi) else hi ** kp
        bot = 0.0 if lo == 0.0 else lo ** kp
        return (top - bot) / kp, True

    if a < s < b:
        v1, ok1 = side(0.0, s - a)
        v2, ok2 = side(0.0, b - s)
        return (cp * (v1 + v2), True) if ok1 and ok2 else (INF, False)
    if s <= a:
        v, ok = side(a - s, b - s)
    else:
        v, ok = side(s - b, s - a)
    return (cp * v, True) if ok else (INF, False)


def _quad_with_breaks(fn, a: float, b: float, breaks, tol: float):
    """Adaptive quadrature split at interior singular points; returns
    (value, err, converged)."""
    pts = sorted({a, b, *(x for x in breaks if a < x < b)})
    total = err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        for lo, hi in zip(pts, pts[1:]):
            v, e = quad(fn, lo, hi, limit=300, epsabs=tol / max(1, len(pts)), epsrel=1e-10)
            total += v
            err += e
    return total, err, err <= max(tol, 1e-8 * abs(total) + 1e-300) * 10.0


def kernel_integral(
    alpha: float,
    z: float,
    f: FunctionSpec,
    domain: IntervalSet,
    tol: float = 1e-9,
) -> TestVerdict:
    """Evaluate int_domain f(y)|z-y|^(alpha-1) dy.

    Power pieces anchored at z (and pieces constant in y) are integrated in
    closed form including the singular cell; divergence is decided from the
    combined exponent.  Remaining pieces are integrated by adaptive
    quadrature split at the kernel singularity and at pole anchors.
    """
    _check_alpha(alpha)
    total = 0.0
    err = 0.0
    methods = set()
    for a, b in domain.intervals:
        for pc in f.pieces:
            lo, hi = max(a, pc.lo), min(b, pc.hi)
            if lo >= hi:
                continue
            if isinstance(pc.form, TableForm):
                if any(m.at is not None and lo < m.at < hi for m in f.poles):
                    return TestVerdict(
                        "inconclusive", INF, method="pole inside tabulated piece"
                    )
                g = pc.form
                fn = lambda y, g=g: _interp(g, y) * abs(y - z) ** (alpha - 1.0)
                v, e, ok = _quad_with_breaks(fn, lo, hi, [z], tol)
                if not ok:
                    return TestVerdict("inconclusive", v, e, "quadrature stalled")
                total += v
                err += e
                methods.add("quadrature")
                continue

            c, e_, p = pc.form.c, pc.form.e, pc.form.p
            if c == 0.0:
                continue
            if not math.isfinite(c):
                return TestVerdict("infinite", INF, method="infinite piece")
            if e_ == 0.0 or p == z:
                k = (alpha - 1.0) if e_ == 0.0 else (e_ + alpha - 1.0)
                v, ok = _anchored_power_integral(c, k, z, lo, hi)
                if not ok:
                    return TestVerdict("infinite", INF, method="exponent criterion")
                total += v
                methods.add("closed-form")
                continue

            # distinct anchors: decide finiteness from local exponents,
            # then integrate numerically
            if e_ < 0.0 and lo <= p <= hi and e_ <= -1.0:
                return TestVerdict("infinite", INF, method="exponent criterion")
            if (math.isinf(lo) or math.isinf(hi)) and e_ + alpha - 1.0 >= -1.0:
                return TestVerdict("infinite", INF, method="tail criterion")
            fn = lambda y, c=c, e_=e_, p=p: (
                c * abs(y - p) ** e_ * abs(y - z) ** (alpha - 1.0)
            )
            v, e, ok = _quad_with_breaks(fn, lo, hi, [z, p], tol)
            if not ok:
                return TestVerdict("inconclusive", v, e, "quadrature stalled")
            total += v
            err += e
            methods.add("quadrature")
    return TestVerdict("finite", total, err, "+".join(sorted(methods)) or "empty")


def _interp(g: TableForm, y: float) -> float:
    import numpy as np

    return float(np.interp(y, g.xs, g.ys))


def monotone_pole_test(
    alpha: float, z: float, f: FunctionSpec, epsilon: float, tol: float = 1e-9
) -> TestVerdict:
    """Small-time finiteness test at an isolated monotone pole of f: finite
    iff int_{z-eps}^{z+eps} f(y)|z-y|^(alpha-1) dy < inf.  A finite verdict
    certifies almost-sure small-time finiteness of the path integral from z;
    an infinite verdict puts z among the irregular points."""
    _check_alpha(alpha)
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    mark = f.pole_mark_at(z)
    if mark is None or not mark.isolated_monotone:
        raise UnflaggedZeroError(
            f"no isolated_monotone pole flag at z={z}; the test hypothesis "
            "cannot be checked from tabulated data"
        )
    if epsilon > mark.delta:
        raise ValueError("epsilon exceeds the flagged neighborhood radius")
    return kernel_integral(alpha, z, f, IntervalSet.of((z - epsilon, z + epsilon)), tol)


def power_law_test(alpha: float, beta: float) -> TestVerdict:
    """Closed form for sigma = |y|^beta at z = 0: the local kernel integral
    int |y|^(alpha(1-beta)-1) dy is finite iff beta < 1, with value
    2 eps^(alpha(1-beta)) / (alpha(1-beta)) at radius eps = 1.  The boundary
    beta = 1 diverges logarithmically."""
    _check_alpha(alpha)
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    expo = alpha * (1.0 - beta)
    if expo <= 0.0:
        return TestVerdict("infinite", INF, method="closed-form")
    return TestVerdict("finite", 2.0 / expo, 0.0, "closed-form")


@dataclass(frozen=True)
class PointedSet:
    """A finite set of points together with an interval set; the natural
    codomain of the irregular-set and zero-set constructions."""

    points: tuple[float, ...] = ()
    intervals: IntervalSet = IntervalSet.empty()

    def __post_init__(self):
        pts = tuple(sorted({p for p in self.points if not self.intervals.contains(p)}))
        object.__setattr__(self, "points", pts)

    def is_empty(self) -> bool:
        return not self.points and self.intervals.is_empty()

    def contains(self, x: float) -> bool:
        return x in self.points or bool(self.intervals.contains(x))

    def issubset(self, other: "PointedSet") -> bool:
        if any(not other.contains(p) for p in self.points):
            return False
        return self.intervals.intersection(
            other.intervals
        ).measure() == self.intervals.measure()

    def to_json(self) -> str:
        return json.dumps(
            {"points": list(self.points), "intervals": [list(i) for i in self.intervals.intervals]}
        )


def zero_set(sigma: FunctionSpec) -> PointedSet:
    """The marked zeros of sigma (points and intervals)."""
    pts = tuple(z.at for z in sigma.zeros if z.at is not None)
    spans = IntervalSet.of(*(z.interval for z in sigma.zeros if z.interval is not None))
    return PointedSet(pts, spans)


def irregular_set(alpha: float, sigma: FunctionSpec, tol: float = 1e-9) -> PointedSet:
    """Points from which the time-change integral is instantly infinite.

    For point zeros flagged isolated_monotone the thin set drops out of the
    integral test, so membership reduces to the monotone-pole test on
    f = sigma^(-alpha).  Zeros on nondegenerate intervals are included
    wholesale (f = +inf on a set of positive measure and positive potential).
    Unflagged point zeros are refused rather than guessed.
    """
    _check_alpha(alpha)
    for z in sigma.zeros:
        if z.at is not None and not z.isolated_monotone:
            raise UnflaggedZeroError(
                f"zero of sigma at {z.at} lacks the isolated_monotone flag; "
                "membership in the irregular set is undecidable"
            )
    f = sigma.inverse_power(alpha)
    pts = []
    for z in sigma.zeros:
        if z.at is None:
            continue
        eps = z.delta if math.isfinite(z.delta) else 1.0
        verdict = monotone_pole_test(alpha, z.at, f, eps, tol)
        if verdict.finiteness == "infinite":
            pts.append(z.at)
    spans = IntervalSet.of(*(z.interval for z in sigma.zeros if z.interval is not None))
    return PointedSet(tuple(pts), spans)


@lru_cache(maxsize=256)
def tail_kernel_finiteness(alpha: float, f: FunctionSpec) -> str:
    """Finiteness of int_{|y|>1} f(y)|y|^(alpha-1) dy, the integral test for
    the clock of a transient path running out at infinity.  `infinite` rules
    explosion out; `finite` makes an escaped path's clock certifiably
    exhausted."""
    return kernel_integral(
        alpha, 0.0, f, IntervalSet.of((-INF, -1.0), (1.0, INF))
    ).finiteness


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
