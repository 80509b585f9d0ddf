"""Path integrals I_t = int_0^t f(X_s) ds on sampled skeletons, their
right-continuous inverses, hitting and last-exit times, and the
explosion/freezing verdict for a single path.

Two occupation conventions coexist.  The plain left-point Riemann sum charges
+inf to any cell parked on a pole of f with positive dwell.  The alpha-aware
variant used by the SDE engine replaces the contribution of a cell parked
exactly on an isolated pole point by the kernel integral of f over the
spatial range dwell^(1/alpha) the process typically sweeps there; that cell
is infinite exactly when the local exponent e of f satisfies e + alpha <= 0,
matching the analytic small-time test instead of the grid artifact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .funcspec import FunctionSpec, FunctionSpecError
from .integrals import tail_kernel_finiteness
from .intervals import IntervalSet
from .stable import PathSample

INF = math.inf

#: default "numerically infinite" level for truncated integrals
DEFAULT_M = 1e9
#: escape radius multiplier: R = this times horizon^(1/alpha)
ESCAPE_MULTIPLIER = 1e3


@dataclass(frozen=True)
class Thresholds:
    """Resolution thresholds: M declares a truncated integral numerically
    infinite, R is the escape radius certifying stabilization by transience."""

    m: float = DEFAULT_M
    r: float | None = None

    def __post_init__(self):
        if self.m <= 0.0 or (self.r is not None and self.r <= 0.0):
            raise ValueError("thresholds must be positive")

    def escape_radius(self, alpha: float, horizon: float) -> float:
        if self.r is not None:
            return self.r
        return ESCAPE_MULTIPLIER * horizon ** (1.0 / alpha)


@dataclass
class PathVerdict:
    """Explosion/freezing verdict for one path; the two never co-occur."""

    integral_at_horizon: float
    explodes: str  # yes | no | undetermined
    freezes: str
    freeze_time: float | None = None
    step: float = 0.0
    horizon: float = 0.0
    m: float = DEFAULT_M
    r: float = 0.0

    def __post_init__(self):
        if self.explodes == "yes" and self.freezes == "yes":
            raise ValueError("explosion and freezing preclude one another")

    def to_json(self) -> str:
        return json.dumps(
            {
                "integral": None if math.isinf(self.integral_at_horizon) else self.integral_at_horizon,
                "explodes": self.explodes,
                "freezes": self.freezes,
                "freeze_time": self.freeze_time,
                "step": self.step,
                "horizon": self.horizon,
                "M": self.m,
                "R": self.r,
            }
        )


def _cell_edges(path: PathSample) -> np.ndarray:
    return np.append(path.times, path.end_time)


def _cell_values(path: PathSample, f: FunctionSpec):
    """(dwell, f(values)) per skeleton cell; the last cell extends to the
    killing time or horizon and may be empty."""
    dwell = np.diff(_cell_edges(path))
    return dwell, np.asarray(f(path.values), float)


def path_integral(path: PathSample, f: FunctionSpec, t: float) -> float:
    """Left-point Riemann sum of f along the skeleton up to time t; +inf as
    soon as any occupied cell has f = +inf with positive dwell."""
    if not 0.0 <= t <= path.horizon:
        raise ValueError("t must lie in [0, horizon]")
    edges = _cell_edges(path)
    dwell = np.clip(np.minimum(edges[1:], t) - edges[:-1], 0.0, None)
    fv = np.asarray(f(path.values), float)
    occupied = dwell > 0.0
    if np.any(np.isinf(fv) & occupied):
        return INF
    return float(np.dot(fv[occupied], dwell[occupied]))


def cumulative_integral(path: PathSample, f: FunctionSpec):
    """(edges, I(edges)): the path integral at every cell edge; infinite
    entries propagate once an infinite-mass cell is crossed."""
    dwell, fv = _cell_values(path, f)
    contrib = np.where(dwell > 0.0, fv, 0.0) * np.where(dwell > 0.0, dwell, 1.0)
    return _cell_edges(path), np.concatenate(([0.0], np.cumsum(contrib)))


def effective_contributions(path: PathSample, f: FunctionSpec, alpha: float) -> np.ndarray:
    """Per-cell contributions with the alpha-aware pole convention.

    A cell whose node sits exactly on an isolated pole point p of f with
    local behavior c|y-p|^e gets 2c/(e+alpha) * dwell^((e+alpha)/alpha),
    the kernel integral of f over the radius-dwell^(1/alpha) window; it is
    +inf exactly when e + alpha <= 0.  All other cells use f at the node.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    dwell, fv = _cell_values(path, f)
    with np.errstate(invalid="ignore"):
        contrib = np.where(dwell > 0.0, fv * np.maximum(dwell, 0.0), 0.0)
    contrib[np.isnan(contrib)] = 0.0
    for p in f.pole_points():
        mask = (path.values == p) & (dwell > 0.0)
        if not mask.any():
            continue
        try:
            c, e = f.local_power(p)
        except FunctionSpecError:
            contrib[mask] = INF
            continue
        k = e + alpha
        if k <= 0.0 or not math.isfinite(c):
            contrib[mask] = INF
        elif e < 0.0:
            contrib[mask] = 2.0 * c / k * dwell[mask] ** (k / alpha)
        else:
            contrib[mask] = (c if e == 0.0 else 0.0) * dwell[mask]
    return contrib


def inverse_time_change(path: PathSample, f: FunctionSpec, s: float) -> float:
    """phi_s = inf{t > 0 : I_t > s} on the skeleton; +inf if the integral
    never exceeds s within the horizon."""
    if s < 0.0:
        raise ValueError("s must be nonnegative")
    edges, cum = cumulative_integral(path, f)
    dwell, fv = _cell_values(path, f)
    for i in range(len(dwell)):
        if cum[i + 1] > s:
            if math.isinf(fv[i]) or fv[i] <= 0.0:
                return float(edges[i])
            return float(edges[i] + (s - cum[i]) / fv[i])
    return INF


def first_hitting_time(path: PathSample, target: IntervalSet) -> float:
    """First grid time with value in the target; +inf if never (inf of the
    empty set)."""
    if target.is_empty():
        return INF
    hits = np.flatnonzero(target.contains(path.values))
    if hits.size == 0:
        return INF
    return float(path.times[hits[0]])


def last_exit_time(path: PathSample, target: IntervalSet) -> float:
    """Last grid time with value in the target; 0 if never (sup of the
    empty set)."""
    if target.is_empty():
        return 0.0
    hits = np.flatnonzero(target.contains(path.values))
    if hits.size == 0:
        return 0.0
    return float(path.times[hits[-1]])


def discretization_bias(path: PathSample, f: FunctionSpec) -> float:
    """Crude bound on the left-point discretization error of the integral at
    the horizon: total variation of f along the skeleton weighted by dwell,
    plus one cell of slack at the largest observed level."""
    dwell, fv = _cell_values(path, f)
    fin = np.isfinite(fv)
    if not fin.all():
        return INF
    tv = float(np.dot(np.abs(np.diff(fv)), dwell[:-1])) if len(fv) > 1 else 0.0
    top = float(fv.max()) if len(fv) else 0.0
    return tv + top * float(dwell.max(initial=0.0))


def classify_path(
    path: PathSample,
    sigma: FunctionSpec,
    alpha: float,
    thresholds: Thresholds = Thresholds(),
) -> PathVerdict:
    """Explosion/freezing verdict from the time-change integrand sigma^-alpha.

    Freezing: the cumulative alpha-aware integral reaches +inf or M at a
    finite skeleton time.  Explosion: the integral at the horizon is finite,
    below M, and the path has escaped beyond R (transience certifies
    stabilization).  `no` is certified when the structure of sigma rules the
    event out; everything else is reported `undetermined`.
    """
    f = sigma.inverse_power(alpha)
    m = thresholds.m
    r = thresholds.escape_radius(alpha, path.horizon)
    edges = _cell_edges(path)
    contrib = effective_contributions(path, f, alpha)
    cum = np.concatenate(([0.0], np.cumsum(contrib)))
    dwell = np.diff(edges)
    step = float(np.median(dwell[dwell > 0.0])) if np.any(dwell > 0.0) else 0.0

    over = np.flatnonzero(~(cum[1:] < m))
    if over.size:
        k = int(over[0])
        if math.isfinite(contrib[k]) and contrib[k] > 0.0:
            rate = contrib[k] / dwell[k]
            freeze_time = float(edges[k] + (m - cum[k]) / rate)
        else:
            freeze_time = float(edges[k])
        return PathVerdict(
            integral_at_horizon=INF,
            explodes="no",
            freezes="yes",
            freeze_time=freeze_time,
            step=step,
            horizon=path.horizon,
            m=m,
            r=r,
        )

    total = float(cum[-1])
    can_freeze = bool(f.pole_points()) or not f.infinite_intervals().is_empty()
    freezes = "undetermined" if can_freeze else "no"
    escaped = abs(float(path.values[-1])) > r
    tail = tail_kernel_finiteness(alpha, f)
    if tail == "infinite":
        # slow decay at infinity keeps the clock running forever on every
        # transient (hence every non-frozen) path
        explodes = "no"
    elif escaped and tail == "finite":
        explodes, freezes = "yes", "no"
    else:
        explodes = "undetermined"
    return PathVerdict(
        integral_at_horizon=total,
        explodes=explodes,
        freezes=freezes,
        freeze_time=None,
        step=step,
        horizon=path.horizon,
        m=m,
        r=r,
    )
