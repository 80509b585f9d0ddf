"""Weak solutions of dZ = sigma(Z-) dX by time change (Z = X_phi), the
four-way existence/uniqueness classification, and status summaries across
replicates.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .funcspec import FunctionSpec
from .functionals import Thresholds, effective_contributions
from .integrals import PointedSet, irregular_set, tail_kernel_finiteness, zero_set
from .stable import PathSample, StableParams, sample_path, stream_rng

INF = math.inf


@dataclass(frozen=True)
class SolutionPath:
    """Time-changed solution skeleton: Z at s equals the driver at phi_s.

    s_grid holds the accumulated clock I at the retained driver nodes,
    time_change the corresponding driver times phi, values the solution
    Z = X(phi).  value_at is the right-continuous step lookup.
    """

    driver: PathSample
    s_grid: np.ndarray
    time_change: np.ndarray
    values: np.ndarray
    status: str  # running | frozen | exploded | horizon_reached
    z: float
    frozen_at: float | None = None
    exploded_at: float | None = None

    def __post_init__(self):
        if not (len(self.s_grid) == len(self.time_change) == len(self.values) >= 1):
            raise ValueError("grids must be nonempty and aligned")
        if self.values[0] != self.z:
            raise ValueError("solution must issue from z")
        if self.status == "frozen" and self.frozen_at is None:
            raise ValueError("frozen status requires frozen_at")
        if self.status == "exploded" and self.exploded_at is None:
            raise ValueError("exploded status requires exploded_at")
        if self.frozen_at is not None and self.exploded_at is not None:
            raise ValueError("freezing and explosion preclude one another")

    def value_at(self, s: float) -> float:
        """Z_s: right-continuous step interpolation; constant after the grid
        ends (frozen paths stay at their terminal value)."""
        if s < 0.0:
            raise ValueError("s must be nonnegative")
        idx = int(np.searchsorted(self.s_grid, s, side="right")) - 1
        return float(self.values[max(idx, 0)])

    @property
    def nonconstant(self) -> bool:
        return bool(np.any(self.values != self.values[0]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# status={self.status}\n")
        if self.frozen_at is not None:
            buf.write(f"# frozen_at={self.frozen_at!r}\n")
        if self.exploded_at is not None:
            buf.write(f"# exploded_at={self.exploded_at!r}\n")
        buf.write("s,phi,z_value\n")
        for s, phi, v in zip(self.s_grid, self.time_change, self.values):
            buf.write(f"{float(s)!r},{float(phi)!r},{float(v)!r}\n")
        return buf.getvalue()


def solve_time_change(
    alpha: float,
    sigma: FunctionSpec,
    z: float,
    horizon: float,
    step: float,
    rng_state,
    thresholds: Thresholds = Thresholds(),
) -> SolutionPath:
    """Simulate a driver from z, accumulate I_t = int sigma(X)^-alpha, and
    read the solution off the inverse clock.

    Frozen when I reaches +inf or M at a finite driver time (the driver
    entered the irregular set); exploded when I at the driver horizon is
    finite and the path escaped beyond R (the clock ran out, lifetime
    estimate exploded_at); horizon_reached otherwise.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    rng = stream_rng(rng_state, 0) if isinstance(rng_state, int) else rng_state
    driver = sample_path(StableParams(alpha), z, horizon, step, rng)
    f = sigma.inverse_power(alpha)
    contrib = effective_contributions(driver, f, alpha)
    cum = np.concatenate(([0.0], np.cumsum(contrib)))
    m = thresholds.m
    r = thresholds.escape_radius(alpha, horizon)

    over = np.flatnonzero(~(cum[1:] < m))
    if over.size:
        k = int(over[0])
        return SolutionPath(
            driver=driver,
            s_grid=cum[: k + 1],
            time_change=driver.times[: k + 1],
            values=driver.values[: k + 1],
            status="frozen",
            z=z,
            frozen_at=float(cum[k]),
        )

    n = len(driver.times)
    escaped = abs(float(driver.values[-1])) > r
    exploded = escaped and tail_kernel_finiteness(alpha, f) == "finite"
    return SolutionPath(
        driver=driver,
        s_grid=cum[:n],
        time_change=driver.times,
        values=driver.values,
        status="exploded" if exploded else "horizon_reached",
        z=z,
        exploded_at=float(cum[-1]) if exploded else None,
    )


@dataclass(frozen=True)
class ClassificationReport:
    """Existence/uniqueness classification from the irregular set O and the
    zero set N: local nontrivial solutions exist from z iff z is not in O;
    solutions exist from every z iff O is contained in N; nontrivial global
    solutions iff O is empty; uniqueness in law everywhere iff O = N."""

    irregular: PointedSet
    zeros: PointedSet
    global_all_z: bool
    nontrivial_global_all_z: bool
    unique_global_all_z: bool
    notes: str = ""

    def __post_init__(self):
        if self.unique_global_all_z and not self.global_all_z:
            raise ValueError("uniqueness everywhere implies existence everywhere")
        if self.nontrivial_global_all_z and not self.global_all_z:
            raise ValueError("nontrivial existence everywhere implies existence")

    def local_nontrivial_at(self, z: float) -> bool:
        return not self.irregular.contains(z)

    def to_json(self, at: tuple[float, ...] = ()) -> str:
        return json.dumps(
            {
                "O": json.loads(self.irregular.to_json()),
                "N": json.loads(self.zeros.to_json()),
                "local_at": {str(z): self.local_nontrivial_at(z) for z in at},
                "global_all": self.global_all_z,
                "nontrivial_global_all": self.nontrivial_global_all_z,
                "unique_all": self.unique_global_all_z,
                "notes": self.notes,
            }
        )


def classify_sde(alpha: float, sigma: FunctionSpec, tol: float = 1e-9) -> ClassificationReport:
    """Compute O and N and fill the four-way classification by set
    comparison."""
    o = irregular_set(alpha, sigma, tol)
    n = zero_set(sigma)
    return ClassificationReport(
        irregular=o,
        zeros=n,
        global_all_z=o.issubset(n),
        nontrivial_global_all_z=o.is_empty(),
        unique_global_all_z=o == n,
    )


@dataclass(frozen=True)
class StatusSummary:
    n: int
    frozen_fraction: float
    exploded_fraction: float
    neither_fraction: float
    frozen_ci95: tuple[float, float]
    exploded_ci95: tuple[float, float]

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "frozen": self.frozen_fraction,
                "exploded": self.exploded_fraction,
                "neither": self.neither_fraction,
                "frozen_ci95": list(self.frozen_ci95),
                "exploded_ci95": list(self.exploded_ci95),
            }
        )


def solution_status_summary(paths: list[SolutionPath]) -> StatusSummary:
    """Fractions frozen/exploded/neither with Wilson intervals; asserts
    per-path exclusivity."""
    from .experiments import wilson_ci

    if not paths:
        raise ValueError("summary of an empty list")
    n = len(paths)
    frozen = sum(1 for p in paths if p.status == "frozen")
    exploded = sum(1 for p in paths if p.status == "exploded")
    for p in paths:
        if p.frozen_at is not None and p.exploded_at is not None:
            raise AssertionError("path both frozen and exploded")
    return StatusSummary(
        n=n,
        frozen_fraction=frozen / n,
        exploded_fraction=exploded / n,
        neither_fraction=(n - frozen - exploded) / n,
        frozen_ci95=wilson_ci(frozen, n),
        exploded_ci95=wilson_ci(exploded, n),
    )
