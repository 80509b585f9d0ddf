"""Monte Carlo estimation harness: reproducible configs, per-replicate RNG
streams, Wilson intervals, and CSV reporting.

Replicate i always uses the counter-based stream keyed by (seed, i) and
outcomes are written into an index-addressed array, so results are identical
for any worker count.  Undetermined replicates are excluded from the point
estimate but reported as a fraction.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .funcspec import FunctionSpec, parse_inline
from .functionals import (
    Thresholds,
    effective_contributions,
    first_hitting_time,
    path_integral,
)
from .integrals import tail_kernel_finiteness
from .intervals import IntervalSet, interval_capacity_upper
from .sde import solve_time_change
from .stable import KillingSpec, PathSample, StableParams, sample_path, stream_rng

INF = math.inf

ESTIMATOR_NAMES = (
    "finiteness_prob",
    "hitting_prob",
    "freeze_prob",
    "explosion_prob",
    "smalltime_finiteness",
)

#: a non-hitting path is resolved once the residual hitting probability
#: bound capacity * distance^(alpha-1) drops below this
HITTING_RESIDUAL = 1e-2


@dataclass(frozen=True)
class ExperimentConfig:
    """One estimator run.  f_or_sigma is read as the coefficient sigma by the
    freeze/explosion estimators and as the integrand f by the others."""

    alpha: float
    f_or_sigma: FunctionSpec
    z: tuple[float, ...]
    replicates: int
    horizon: float
    step: float
    estimator: str
    seed: int = 0
    thresholds: Thresholds = Thresholds()
    killing: KillingSpec | None = None
    target: IntervalSet | None = None

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0,1), got {self.alpha}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.horizon <= 0.0 or self.step <= 0.0:
            raise ValueError("horizon and step must be positive")
        if self.estimator not in ESTIMATOR_NAMES:
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if self.estimator == "hitting_prob" and self.target is None:
            raise ValueError("hitting_prob requires a target set")
        zs = self.z if isinstance(self.z, (tuple, list)) else (self.z,)
        object.__setattr__(self, "z", tuple(float(v) for v in zs))

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        doc = json.loads(text)
        fs = doc["f_or_sigma"]
        func = parse_inline(fs) if isinstance(fs, str) else FunctionSpec.from_json(json.dumps(fs))
        th = doc.get("thresholds", {})
        kill = doc.get("killing")
        tgt = doc.get("target")
        return cls(
            alpha=doc["alpha"],
            f_or_sigma=func,
            z=doc["z"] if isinstance(doc["z"], list) else [doc["z"]],
            replicates=int(doc["replicates"]),
            horizon=float(doc["horizon"]),
            step=float(doc["step"]),
            estimator=doc["estimator"],
            seed=int(doc.get("seed", 0)),
            thresholds=Thresholds(m=float(th.get("M", 1e9)), r=th.get("R")),
            killing=KillingSpec(float(kill["q"])) if kill else None,
            target=IntervalSet.of(*tgt) if tgt else None,
        )


@dataclass(frozen=True)
class Estimate:
    point: float
    ci95: tuple[float, float]
    n: int
    undetermined_fraction: float
    seed: int

    def __post_init__(self):
        lo, hi = self.ci95
        if not (0.0 <= lo <= self.point <= hi <= 1.0):
            raise ValueError("confidence interval must bracket the point")
        if not 0.0 <= self.undetermined_fraction <= 1.0:
            raise ValueError("undetermined fraction out of range")


def wilson_ci(k: int, n: int, z: float = 1.9599639845400545) -> tuple[float, float]:
    """95% Wilson score interval; unanimous outcomes degenerate to a point
    (the sampling says nothing about sub-resolution failure rates)."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if n == 0:
        return (0.0, 1.0)
    if k == 0:
        return (0.0, 0.0)
    if k == n:
        return (1.0, 1.0)
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def _estimate_from_codes(codes: np.ndarray, seed: int) -> Estimate:
    n = len(codes)
    yes = int(np.sum(codes == 1))
    resolved = int(np.sum(codes >= 0))
    und = n - resolved
    if resolved == 0:
        return Estimate(0.0, (0.0, 1.0), n, 1.0, seed)
    return Estimate(yes / resolved, wilson_ci(yes, resolved), n, und / n, seed)


# -- per-replicate outcomes: True / False / None (undetermined) --------------


def _sample(cfg: ExperimentConfig, z: float, rng) -> PathSample:
    return sample_path(
        StableParams(cfg.alpha), z, cfg.horizon, cfg.step, rng, killing=cfg.killing
    )


def _finiteness_outcome(cfg: ExperimentConfig, z: float, rng):
    f = cfg.f_or_sigma
    path = _sample(cfg, z, rng)
    m = cfg.thresholds.m
    r = cfg.thresholds.escape_radius(cfg.alpha, cfg.horizon)
    total = path_integral(path, f, path.horizon)
    if not total < m:
        return False
    if f.lower_bound() > 0.0:
        # the integral grows without bound surely
        return False
    if abs(float(path.values[-1])) > r:
        return True
    # stagnation: no mass in the second half of the window and none at the
    # terminal position; resolved finite only heuristically
    half = path_integral(path, f, path.horizon / 2.0)
    if total == half and f(float(path.values[-1])) == 0.0:
        return True
    return None


def _hitting_outcome(cfg: ExperimentConfig, z: float, rng):
    path = _sample(cfg, z, rng)
    if math.isfinite(first_hitting_time(path, cfg.target)):
        return True
    d = cfg.target.distance_to(float(path.values[-1]))
    cap = interval_capacity_upper(cfg.alpha, cfg.target)
    if d > 0.0 and cap * d ** (cfg.alpha - 1.0) < HITTING_RESIDUAL:
        return False
    return None


def _freeze_outcome(cfg: ExperimentConfig, z: float, rng):
    sol = solve_time_change(
        cfg.alpha, cfg.f_or_sigma, z, cfg.horizon, cfg.step, rng, cfg.thresholds
    )
    return sol.status == "frozen"


def _explosion_outcome(cfg: ExperimentConfig, z: float, rng):
    sol = solve_time_change(
        cfg.alpha, cfg.f_or_sigma, z, cfg.horizon, cfg.step, rng, cfg.thresholds
    )
    if sol.status == "exploded":
        return True
    if sol.status == "frozen":
        return False
    f = cfg.f_or_sigma.inverse_power(cfg.alpha)
    if tail_kernel_finiteness(cfg.alpha, f) == "infinite":
        return False
    return None


def _smalltime_outcome(cfg: ExperimentConfig, z: float, rng):
    f = cfg.f_or_sigma
    path = _sample(cfg, z, rng)
    contrib = effective_contributions(path, f, cfg.alpha)
    dwell = np.diff(np.append(path.times, path.end_time))
    occupied = np.flatnonzero(dwell > 0.0)
    if occupied.size == 0:
        return None
    first = float(contrib[occupied[0]])
    return first < cfg.thresholds.m


_OUTCOMES = {
    "finiteness_prob": _finiteness_outcome,
    "hitting_prob": _hitting_outcome,
    "freeze_prob": _freeze_outcome,
    "explosion_prob": _explosion_outcome,
    "smalltime_finiteness": _smalltime_outcome,
}


def _run_replicates(cfg: ExperimentConfig, z: float, threads: int) -> np.ndarray:
    fn = _OUTCOMES[cfg.estimator]
    codes = np.full(cfg.replicates, -1, dtype=np.int8)

    def work(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            out = fn(cfg, z, stream_rng(cfg.seed, i))
            codes[i] = -1 if out is None else int(bool(out))

    if threads <= 1:
        work(0, cfg.replicates)
        return codes
    chunk = max(1, -(-cfg.replicates // threads))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futs = [
            pool.submit(work, lo, min(lo + chunk, cfg.replicates))
            for lo in range(0, cfg.replicates, chunk)
        ]
        for fut in futs:
            fut.result()
    return codes


CSV_HEADER = "estimator,alpha,z,point,ci_lo,ci_hi,n,undetermined,seed"


def estimate_finiteness_probability(cfg: ExperimentConfig, threads: int = 1) -> Estimate:
    return _single(cfg, "finiteness_prob", threads)


def estimate_hitting_probability(cfg: ExperimentConfig, threads: int = 1) -> Estimate:
    return _single(cfg, "hitting_prob", threads)


def estimate_smalltime_finiteness(cfg: ExperimentConfig, threads: int = 1) -> Estimate:
    return _single(cfg, "smalltime_finiteness", threads)


def _single(cfg: ExperimentConfig, name: str, threads: int) -> Estimate:
    if cfg.estimator != name:
        raise ValueError(f"config estimator is {cfg.estimator!r}, expected {name!r}")
    if len(cfg.z) != 1:
        raise ValueError("single-estimate entry points take exactly one z")
    codes = _run_replicates(cfg, cfg.z[0], threads)
    return _estimate_from_codes(codes, cfg.seed)


def run_experiment(cfg: ExperimentConfig, sink, threads: int = 1) -> list[Estimate]:
    """Run the configured estimator for every z and write one CSV row per z;
    byte-identical output for a given config and seed, any worker count."""
    rows = []
    sink.write(CSV_HEADER + "\n")
    for z in cfg.z:
        est = _estimate_from_codes(_run_replicates(cfg, z, threads), cfg.seed)
        rows.append(est)
        sink.write(
            f"{cfg.estimator},{cfg.alpha!r},{z!r},{est.point!r},"
            f"{est.ci95[0]!r},{est.ci95[1]!r},{est.n},"
            f"{est.undetermined_fraction!r},{est.seed}\n"
        )
    return rows
