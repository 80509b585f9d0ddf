import json
import math

import numpy as np
import pytest
from scipy import stats

from stablesde.funcspec import FunctionSpec, Piece, PowerForm
from stablesde.functionals import Thresholds
from stablesde.intervals import IntervalSet
from stablesde.sde import (
    ClassificationReport,
    classify_sde,
    solution_status_summary,
    solve_time_change,
)
from stablesde.integrals import PointedSet, UnflaggedZeroError
from stablesde.stable import StableParams, sample_increment, stream_rng

INF = math.inf


class TestSolveTimeChange:
    def test_driver_recovery_sigma_one(self):
        sol = solve_time_change(0.5, FunctionSpec.constant(1.0), 0.0, 1.0, 0.01, 42)
        assert np.array_equal(sol.values, sol.driver.values)
        assert np.array_equal(sol.time_change, sol.driver.times)
        assert sol.status == "horizon_reached"

    def test_constant_sigma_linear_clock(self):
        c, alpha = 2.0, 0.5
        sol = solve_time_change(alpha, FunctionSpec.constant(c), 0.0, 2.0, 0.01, 7)
        # I_t = c^-alpha t: the s-grid is the driver grid contracted by c^-alpha
        assert np.allclose(sol.s_grid, c ** -alpha * sol.time_change)

    def test_scaling_marginal_ks(self):
        # Z_1 for sigma = c should match X(c^alpha) in law
        c, alpha, n = 2.0, 0.5, 2000
        sigma = FunctionSpec.constant(c)
        zs = np.array(
            [
                solve_time_change(alpha, sigma, 0.0, 2.0, 0.005, stream_rng(11, i)).value_at(1.0)
                for i in range(n)
            ]
        )
        xs = np.array(
            [
                sample_increment(StableParams(alpha), c ** alpha, stream_rng(12, i))
                for i in range(n)
            ]
        )
        assert stats.ks_2samp(zs, xs).pvalue > 0.05

    def test_supercritical_power_freezes_at_origin(self):
        sol = solve_time_change(0.5, FunctionSpec.power(1.5), 0.0, 1.0, 0.01, 3)
        assert sol.status == "frozen"
        assert sol.frozen_at == 0.0
        assert np.all(sol.values == 0.0)
        assert sol.value_at(0.0) == 0.0
        assert sol.value_at(123.0) == 0.0  # frozen forever after

    def test_subcritical_power_nonconstant(self):
        nonconstant = sum(
            solve_time_change(0.5, FunctionSpec.power(0.5), 0.0, 1.0, 0.01, i).nonconstant
            for i in range(200)
        )
        assert nonconstant / 200 >= 0.99

    def test_zero_interval_freezes_on_entry(self):
        sigma = FunctionSpec.indicator_complement(IntervalSet.of((1, 2)))
        frozen = 0
        for i in range(100):
            sol = solve_time_change(0.5, sigma, 0.0, 10.0, 0.1, i)
            if sol.status == "frozen":
                frozen += 1
                assert not IntervalSet.of((1, 2)).contains(sol.values[:-1]).any()
        assert 0 < frozen < 100

    def test_alpha_validation(self):
        with pytest.raises(ValueError):
            solve_time_change(1.5, FunctionSpec.constant(1.0), 0.0, 1.0, 0.1, 0)

    def test_csv_format(self):
        sol = solve_time_change(0.5, FunctionSpec.constant(1.0), 0.0, 0.5, 0.1, 5)
        lines = sol.to_csv().splitlines()
        assert lines[0] == "# status=horizon_reached"
        assert lines[1] == "s,phi,z_value"
        assert len(lines) == 2 + len(sol.s_grid)


class TestClassifySde:
    def test_constant_sigma_all_four(self):
        rep = classify_sde(0.5, FunctionSpec.constant(1.0))
        assert rep.irregular.is_empty() and rep.zeros.is_empty()
        assert rep.global_all_z and rep.nontrivial_global_all_z and rep.unique_global_all_z
        assert rep.local_nontrivial_at(0.0)

    def test_supercritical_unique_not_nontrivial(self):
        rep = classify_sde(0.5, FunctionSpec.power(1.5))
        assert rep.irregular == rep.zeros == PointedSet(points=(0.0,))
        assert rep.unique_global_all_z and rep.global_all_z
        assert not rep.nontrivial_global_all_z
        assert not rep.local_nontrivial_at(0.0)
        assert rep.local_nontrivial_at(1.0)

    def test_subcritical_nontrivial_not_unique(self):
        rep = classify_sde(0.5, FunctionSpec.power(0.5))
        assert rep.irregular.is_empty()
        assert rep.zeros.points == (0.0,)
        assert rep.nontrivial_global_all_z
        assert not rep.unique_global_all_z

    def test_uniqueness_threshold_in_beta(self):
        for beta in (0.25, 0.5, 0.75):
            assert not classify_sde(0.5, FunctionSpec.power(beta)).unique_global_all_z
        for beta in (1.0, 1.25, 1.5, 2.0):
            assert classify_sde(0.5, FunctionSpec.power(beta)).unique_global_all_z

    def test_coherence_invariant_enforced(self):
        with pytest.raises(ValueError):
            ClassificationReport(
                irregular=PointedSet(points=(1.0,)),
                zeros=PointedSet(),
                global_all_z=False,
                nontrivial_global_all_z=False,
                unique_global_all_z=True,
            )

    def test_unflagged_zero_propagates(self):
        from stablesde.funcspec import ZeroMark

        sigma = FunctionSpec(
            (Piece(-INF, INF, PowerForm(1.0, 2.0, 0.0)),),
            zeros=(ZeroMark(at=0.0, isolated_monotone=False),),
        )
        with pytest.raises(UnflaggedZeroError):
            classify_sde(0.5, sigma)

    def test_json_keys(self):
        doc = json.loads(classify_sde(0.5, FunctionSpec.power(1.5)).to_json(at=(0.0,)))
        assert set(doc) == {
            "O", "N", "local_at", "global_all", "nontrivial_global_all",
            "unique_all", "notes",
        }
        assert doc["unique_all"] is True
        assert doc["local_at"]["0.0"] is False


class TestStatusSummary:
    def test_constant_sigma_all_neither(self):
        paths = [
            solve_time_change(0.5, FunctionSpec.constant(1.0), 0.0, 1.0, 0.05, i)
            for i in range(50)
        ]
        summary = solution_status_summary(paths)
        assert summary.frozen_fraction == 0.0
        assert summary.exploded_fraction == 0.0
        assert summary.frozen_ci95 == (0.0, 0.0)

    def test_indicator_sigma_frozen_fraction_interior(self):
        sigma = FunctionSpec.indicator_complement(IntervalSet.of((1, 2)))
        paths = [
            solve_time_change(0.5, sigma, 0.0, 10.0, 0.1, i) for i in range(200)
        ]
        summary = solution_status_summary(paths)
        assert 0.0 < summary.frozen_fraction < 1.0

    def test_explosion_trend_with_horizon(self):
        sigma = FunctionSpec(
            (
                Piece(-INF, -1.0, PowerForm(1.0, 2.0, 0.0)),
                Piece(-1.0, 1.0, PowerForm(1.0)),
                Piece(1.0, INF, PowerForm(1.0, 2.0, 0.0)),
            )
        )
        fractions = []
        for horizon in (0.2, 50.0):
            paths = [
                solve_time_change(
                    0.5, sigma, 0.0, horizon, horizon / 500, i, Thresholds(r=100.0)
                )
                for i in range(100)
            ]
            fractions.append(solution_status_summary(paths).exploded_fraction)
        assert fractions[1] > fractions[0]
        assert fractions[1] >= 0.9

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            solution_status_summary([])
