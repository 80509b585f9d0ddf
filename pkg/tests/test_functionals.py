import json
import math

import numpy as np
import pytest

from stablesde.funcspec import FunctionSpec, Piece, PowerForm, TableForm
from stablesde.functionals import (
    PathVerdict,
    Thresholds,
    classify_path,
    cumulative_integral,
    discretization_bias,
    effective_contributions,
    first_hitting_time,
    inverse_time_change,
    last_exit_time,
    path_integral,
)
from stablesde.intervals import IntervalSet
from stablesde.stable import PathSample, StableParams, sample_path, stream_rng

INF = math.inf


def make_path(seed: int, alpha=0.5, z=0.0, horizon=1.0, step=0.01, **kw) -> PathSample:
    return sample_path(StableParams(alpha), z, horizon, step, stream_rng(seed, 0), **kw)


class TestPathIntegral:
    def test_unit_integrand_gives_time(self):
        path = make_path(1)
        assert path_integral(path, FunctionSpec.constant(1.0), 0.7) == pytest.approx(0.7)

    def test_zero_integrand(self):
        path = make_path(2)
        assert path_integral(path, FunctionSpec.constant(0.0), 1.0) == 0.0

    def test_infinite_on_occupied_set(self):
        f = FunctionSpec.infinite_indicator(IntervalSet.of((1, 2)))
        for seed in range(50):
            path = make_path(seed, horizon=10.0, step=0.1)
            hit = math.isfinite(first_hitting_time(path, IntervalSet.of((1, 2))))
            total = path_integral(path, f, path.horizon)
            assert math.isinf(total) == hit

    def test_monotone_in_t(self):
        path = make_path(3)
        f = FunctionSpec.constant(2.0)
        vals = [path_integral(path, f, t) for t in np.linspace(0, 1, 11)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_t_validation(self):
        path = make_path(4)
        with pytest.raises(ValueError):
            path_integral(path, FunctionSpec.constant(1.0), 2.0)


class TestInverseTimeChange:
    def test_identity_for_unit_integrand(self):
        path = make_path(5)
        assert inverse_time_change(path, FunctionSpec.constant(1.0), 0.3) == pytest.approx(0.3)

    def test_constant_closed_form(self):
        # f = c^-alpha constant: I_t = c^-alpha t so phi_s = c^alpha s
        c, alpha = 2.0, 0.5
        f = FunctionSpec.constant(c ** -alpha)
        path = make_path(6, horizon=4.0)
        s = 1.1
        assert inverse_time_change(path, f, s) == pytest.approx(c ** alpha * s)

    def test_collapse_for_infinite_integrand(self):
        path = make_path(7)
        f = FunctionSpec.infinite_indicator(IntervalSet.of((-INF, INF)))
        assert inverse_time_change(path, f, 5.0) == 0.0

    def test_infinite_when_never_exceeded(self):
        path = make_path(8)
        assert inverse_time_change(path, FunctionSpec.constant(1.0), 100.0) == INF

    def test_galois_inequalities(self):
        # I(phi_s) >= s and phi(I_t) <= t at grid points, on 1000 paths
        f = FunctionSpec.constant(0.5)
        rng = np.random.default_rng(77)
        for seed in range(1000):
            path = make_path(seed, horizon=1.0, step=0.05)
            s = float(rng.uniform(0.0, 0.4))
            phi = inverse_time_change(path, f, s)
            if math.isfinite(phi) and phi <= path.horizon:
                assert path_integral(path, f, phi) >= s - 1e-12
            t = float(rng.uniform(0.0, 1.0))
            it = path_integral(path, f, t)
            if math.isfinite(it):
                assert inverse_time_change(path, f, it) <= t + 1e-12

    def test_right_continuous_nondecreasing_in_s(self):
        path = make_path(9)
        f = FunctionSpec.constant(1.0)
        grid = np.linspace(0.0, 1.2, 25)
        phis = [inverse_time_change(path, f, s) for s in grid]
        assert all(b >= a for a, b in zip(phis, phis[1:]))


class TestHittingAndExit:
    def test_empty_target_conventions(self):
        path = make_path(10)
        assert first_hitting_time(path, IntervalSet.empty()) == INF
        assert last_exit_time(path, IntervalSet.empty()) == 0.0

    def test_start_inside_interior(self):
        path = make_path(11, z=1.5)
        assert first_hitting_time(path, IntervalSet.of((1, 2))) == 0.0

    def test_never_hit(self):
        path = make_path(12, horizon=0.1, step=0.01)
        far = IntervalSet.of((1e12, 2e12))
        assert first_hitting_time(path, far) == INF
        assert last_exit_time(path, far) == 0.0

    def test_exit_after_hit(self):
        target = IntervalSet.of((-0.5, 0.5))
        path = make_path(13, z=0.0)
        t_hit = first_hitting_time(path, target)
        t_exit = last_exit_time(path, target)
        assert t_hit == 0.0
        assert t_exit >= t_hit

    def test_transience_trend(self):
        # fraction of paths already done with [-1,1] grows with the horizon
        target = IntervalSet.of((-1.0, 1.0))
        fracs = []
        for horizon in (1.0, 100.0):
            done = 0
            for seed in range(300):
                path = make_path(seed, horizon=horizon, step=horizon / 200)
                if last_exit_time(path, target) < horizon:
                    done += 1
            fracs.append(done / 300)
        assert fracs[1] > fracs[0]


class TestEffectiveContributions:
    def test_matches_plain_sum_without_poles(self):
        path = make_path(14)
        f = FunctionSpec.constant(2.0)
        contrib = effective_contributions(path, f, 0.5)
        assert float(contrib.sum()) == pytest.approx(
            path_integral(path, f, path.horizon)
        )

    def test_pole_cell_finite_below_threshold(self):
        # z = 0 sits on the pole of |y|^-0.25; the kernel convention gives
        # 2c/(e+alpha) * dwell^((e+alpha)/alpha)
        path = make_path(15, z=0.0)
        f = FunctionSpec.power(0.5).inverse_power(0.5)
        contrib = effective_contributions(path, f, 0.5)
        dwell = path.times[1] - path.times[0]
        assert contrib[0] == pytest.approx(8.0 * dwell ** 0.5)
        assert np.isfinite(contrib[1:]).all()

    def test_pole_cell_infinite_at_or_above_threshold(self):
        path = make_path(16, z=0.0)
        f = FunctionSpec.power(1.5).inverse_power(0.5)
        contrib = effective_contributions(path, f, 0.5)
        assert math.isinf(contrib[0])


class TestClassifyPath:
    def test_constant_sigma_neither(self):
        path = make_path(17)
        v = classify_path(path, FunctionSpec.constant(1.0), 0.5)
        assert v.explodes == "no"
        assert v.freezes == "no"
        assert v.integral_at_horizon == pytest.approx(path.horizon)

    def test_indicator_sigma_freezes_at_hit(self):
        target = IntervalSet.of((1, 2))
        sigma = FunctionSpec.indicator_complement(target)
        hit_seen = False
        for seed in range(60):
            path = make_path(seed, horizon=10.0, step=0.1)
            t_hit = first_hitting_time(path, target)
            v = classify_path(path, sigma, 0.5)
            if math.isfinite(t_hit):
                hit_seen = True
                assert v.freezes == "yes"
                assert v.freeze_time == pytest.approx(t_hit)
            assert not (v.explodes == "yes" and v.freezes == "yes")
        assert hit_seen

    def test_fast_growth_explodes_when_escaped(self):
        sigma = FunctionSpec(
            (
                Piece(-INF, -1.0, PowerForm(1.0, 2.0, 0.0)),
                Piece(-1.0, 1.0, PowerForm(1.0)),
                Piece(1.0, INF, PowerForm(1.0, 2.0, 0.0)),
            )
        )
        exploded = 0
        for seed in range(50):
            path = make_path(seed, horizon=50.0, step=0.05)
            v = classify_path(path, sigma, 0.5, Thresholds(r=100.0))
            assert v.freezes in ("no", "undetermined")
            if v.explodes == "yes":
                exploded += 1
        assert exploded >= 45

    def test_slow_decay_never_explodes(self):
        for seed in range(20):
            path = make_path(seed, horizon=5.0, step=0.05)
            v = classify_path(path, FunctionSpec.power(0.5), 0.5, Thresholds(r=1.0))
            assert v.explodes == "no"

    def test_exclusivity_invariant(self):
        with pytest.raises(ValueError):
            PathVerdict(1.0, "yes", "yes")

    def test_json_keys(self):
        path = make_path(18)
        doc = json.loads(classify_path(path, FunctionSpec.constant(1.0), 0.5).to_json())
        assert set(doc) == {
            "integral", "explodes", "freezes", "freeze_time", "step",
            "horizon", "M", "R",
        }


class TestThresholds:
    def test_default_escape_radius(self):
        th = Thresholds()
        assert th.escape_radius(0.5, 4.0) == pytest.approx(1e3 * 16.0)
        assert Thresholds(r=7.0).escape_radius(0.5, 4.0) == 7.0

    def test_validation(self):
        with pytest.raises(ValueError):
            Thresholds(m=0.0)


class TestDiscretization:
    def test_bias_bound_on_coupled_refinement(self):
        # coarse grid = every other node of the fine grid; the reported bias
        # on the coarse path bounds the actual refinement change on >= 95%
        # of paths for a bounded integrand
        f = FunctionSpec(
            (
                Piece(-INF, -5.0, PowerForm(0.2)),
                Piece(-5.0, 5.0, TableForm((-5.0, 0.0, 5.0), (0.2, 1.0, 0.2))),
                Piece(5.0, INF, PowerForm(0.2)),
            )
        )
        ok = 0
        n_paths = 200
        for seed in range(n_paths):
            fine = make_path(seed, horizon=1.0, step=0.005, jump_adapted=False)
            coarse = PathSample(
                fine.times[::2], fine.values[::2], horizon=fine.horizon
            )
            i_fine = path_integral(fine, f, 1.0)
            i_coarse = path_integral(coarse, f, 1.0)
            if abs(i_fine - i_coarse) <= discretization_bias(coarse, f):
                ok += 1
        assert ok / n_paths >= 0.95

    def test_cumulative_matches_pointwise(self):
        path = make_path(19)
        f = FunctionSpec.constant(3.0)
        edges, cum = cumulative_integral(path, f)
        for i in (0, len(edges) // 2, len(edges) - 1):
            assert cum[i] == pytest.approx(path_integral(path, f, float(edges[i])))
