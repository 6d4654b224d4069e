import numpy as np
import pytest

from sta_coupler.coupler import simulate
from sta_coupler.schedules import ModelParams
from sta_coupler.sweep import (
    AxisSpec,
    SweepSpec,
    TargetNotReached,
    metric_value,
    robust_region_fraction,
    run_sweep,
    threshold_length,
)


def small_spec(metric="final_i2", sta=True, **kw):
    return SweepSpec(
        axis_x=AxisSpec("omega0", 0.5, 3.0, 4),
        axis_y=AxisSpec("delta0", 0.0, 0.5, 3),
        fixed={"total_length": 10.0},
        metric=metric,
        sta=sta,
        tol=1e-8,
        **kw,
    )


class TestValidation:
    def test_axis_name(self):
        with pytest.raises(ValueError):
            AxisSpec("bogus", 0.0, 1.0, 5)

    def test_axis_count(self):
        with pytest.raises(ValueError):
            AxisSpec("omega0", 0.0, 1.0, 1)

    def test_axis_ordering(self):
        with pytest.raises(ValueError):
            AxisSpec("omega0", 1.0, 1.0, 5)

    def test_axis_nonnegative(self):
        with pytest.raises(ValueError):
            AxisSpec("omega0", -1.0, 1.0, 5)

    def test_duplicate_axes(self):
        with pytest.raises(ValueError):
            SweepSpec(axis_x=AxisSpec("omega0", 0, 1, 2),
                      axis_y=AxisSpec("omega0", 0, 1, 2),
                      fixed={"delta0": 0.1, "total_length": 1.0})

    def test_fixed_must_cover_remaining(self):
        with pytest.raises(ValueError):
            SweepSpec(axis_x=AxisSpec("omega0", 0, 1, 2),
                      axis_y=AxisSpec("delta0", 0, 1, 2),
                      fixed={})

    def test_metric_name(self):
        with pytest.raises(ValueError):
            small_spec(metric="bogus")

    def test_metric_value_rejects_unknown(self):
        with pytest.raises(ValueError):
            metric_value("bogus", True, 1.0, 0.1, 1.0)


class TestMetricValue:
    def test_matches_direct_simulation(self):
        p = ModelParams(omega0=1.5, delta0=0.1, half_length=12.5, sta=True)
        direct = simulate(p, tol=1e-8).final_i2
        assert metric_value("final_i2", True, 1.5, 0.1, 25.0) == direct

    def test_degenerate_zero_coupling(self):
        assert metric_value("final_i2", True, 0.0, 0.1, 10.0) == 0.0
        assert metric_value("splitting_infidelity", True, 0.0, 0.1, 10.0) == 0.5

    def test_degenerate_zero_length(self):
        assert metric_value("final_i2", False, 1.0, 0.1, 0.0) == 0.0


class TestRunSweep:
    def test_shape_and_orientation(self):
        res = run_sweep(small_spec())
        assert res.grid.shape == (3, 4)
        assert len(res.x_values) == 4
        assert len(res.y_values) == 3
        # corner check: grid[i, j] corresponds to (y_i, x_j)
        expected = metric_value("final_i2", True, float(res.x_values[-1]),
                                float(res.y_values[0]), 10.0)
        assert res.grid[0, -1] == expected

    def test_metric_range(self):
        res = run_sweep(small_spec())
        assert np.all(res.grid >= 0.0)
        assert np.all(res.grid <= 1.0 + 1e-9)

    def test_parallel_determinism(self):
        spec = small_spec()
        serial = run_sweep(spec, workers=1)
        parallel = run_sweep(spec, workers=4)
        assert np.array_equal(serial.grid, parallel.grid)

    def test_provenance(self):
        res = run_sweep(small_spec())
        assert res.provenance["metric"] == "final_i2"
        assert res.provenance["fixed"] == {"total_length": 10.0}
        assert res.provenance["axis_x"]["name"] == "omega0"

    def test_splitting_metric(self):
        spec = SweepSpec(axis_x=AxisSpec("omega0", 1.0, 2.0, 2),
                         axis_y=AxisSpec("total_length", 5.0, 25.0, 2),
                         fixed={"delta0": 0.1}, metric="splitting_infidelity",
                         sta=True, tol=1e-8)
        res = run_sweep(spec)
        assert np.all(res.grid >= 0.0)
        assert np.all(res.grid <= 0.5 + 1e-12)


class TestThreshold:
    def test_raw_reference_threshold(self):
        # without the counterdiabatic correction the reference coupler
        # needs roughly 1.3 mm to hit 99% transfer
        res = threshold_length(5.0, 1.0, sta=False, target=0.99,
                               length_range=(0.0, 2.0), tol=1e-8)
        assert 1.1 <= res.total_length <= 1.4
        assert res.achieved_metric >= 0.99

    def test_bisection_resolution(self):
        res = threshold_length(5.0, 1.0, sta=False, target=0.99)
        probe = metric_value("final_i2", False, 5.0, 1.0,
                             res.total_length - 0.02, tol=1e-8)
        # 0.02 mm below the reported threshold the target is already missed
        # somewhere, consistent with 0.01 mm resolution on a first crossing
        assert res.achieved_metric >= 0.99
        assert probe < 0.99 or res.total_length <= 0.02

    def test_unreachable_raises(self):
        with pytest.raises(TargetNotReached) as exc:
            threshold_length(0.5, 5.0, sta=False, target=0.99,
                             length_range=(0.0, 1.0), tol=1e-8)
        assert exc.value.best_metric < 0.99

    def test_target_validation(self):
        with pytest.raises(ValueError):
            threshold_length(1.0, 0.1, True, target=1.5)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            threshold_length(1.0, 0.1, True, target=0.9, length_range=(2.0, 1.0))


class TestRobustRegion:
    def test_fraction_bounds_and_value(self):
        res = run_sweep(small_spec())
        frac = robust_region_fraction(res, 0.9)
        assert 0.0 <= frac <= 1.0
        assert frac == np.mean(res.grid >= 0.9)

    def test_trivial_targets(self):
        res = run_sweep(small_spec())
        assert robust_region_fraction(res, -1.0) == 1.0
        assert robust_region_fraction(res, 2.0) == 0.0
