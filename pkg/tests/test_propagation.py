import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sta_coupler.coupler import build_h2
from sta_coupler.propagation import (
    HamiltonianSpec,
    StiffnessError,
    propagate_adaptive,
    propagate_pwc,
)
from sta_coupler.schedules import ModelParams

UP = np.array([1.0, 0.0], dtype=complex)


def constant_h2(delta: float, omega: float) -> HamiltonianSpec:
    def evaluate(z, side=0):
        return np.array([[delta, omega], [omega, -delta]], dtype=complex)

    return HamiltonianSpec(dim=2, evaluate=evaluate)


class TestValidation:
    def test_dim_rejected(self):
        with pytest.raises(ValueError):
            HamiltonianSpec(dim=4, evaluate=lambda z, s: np.eye(4))

    def test_non_hermitian_rejected(self):
        h = HamiltonianSpec(dim=2, evaluate=lambda z, s: np.array([[0, 1], [2, 0]]))
        with pytest.raises(ValueError):
            h.matrix(0.0)

    def test_unnormalized_state_rejected(self):
        with pytest.raises(ValueError):
            propagate_adaptive(constant_h2(0, 1), np.array([1.0, 1.0]), 0, 1)

    def test_tol_range(self):
        for tol in (1e-13, 1e-3):
            with pytest.raises(ValueError):
                propagate_adaptive(constant_h2(0, 1), UP, 0, 1, tol=tol)

    def test_reversed_interval_rejected(self):
        with pytest.raises(ValueError):
            propagate_adaptive(constant_h2(0, 1), UP, 1, 0)

    def test_unalignable_grid_rejected(self):
        h = HamiltonianSpec(dim=2, evaluate=lambda z, s: np.eye(2, dtype=complex),
                            discontinuities=(0.3, 0.6))
        with pytest.raises(ValueError, match="not alignable"):
            propagate_pwc(h, UP, 0.0, 1.0, steps=2)


class TestAnalyticOracles:
    """Constant generators have closed-form propagators."""

    def test_rabi_flop(self):
        # resonant coupling: I2(z) = sin^2(omega z)
        omega = 1.3
        traj = propagate_adaptive(constant_h2(0.0, omega), UP, 0.0, 2.0, 1e-12)
        expected = np.sin(omega * traj.z) ** 2
        assert np.max(np.abs(traj.intensities[:, 1] - expected)) < 1e-10

    def test_detuned_rabi(self):
        # generalized flop: I2 = (omega/W)^2 sin^2(W z), W = sqrt(omega^2+delta^2)
        omega, delta = 0.8, 0.6
        weff = math.hypot(omega, delta)
        traj = propagate_pwc(constant_h2(delta, omega), UP, 0.0, 5.0, steps=4000)
        expected = (omega / weff) ** 2 * np.sin(weff * traj.z) ** 2
        assert np.max(np.abs(traj.intensities[:, 1] - expected)) < 1e-6

    def test_pure_phase(self):
        traj = propagate_adaptive(constant_h2(2.0, 0.0), UP, 0.0, 1.0, 1e-12)
        assert abs(traj.final_state[0] - np.exp(-2.0j)) < 1e-10
        assert abs(traj.final_state[1]) == 0.0

    def test_pwc_exact_for_constant_h(self):
        # a single midpoint-frozen cell is the exact propagator here
        omega = 0.9
        traj = propagate_pwc(constant_h2(0.0, omega), UP, 0.0, 1.0, steps=1)
        assert abs(traj.final_state[0] - math.cos(omega)) < 1e-14
        assert abs(traj.final_state[1] + 1j * math.sin(omega)) < 1e-14

    def test_three_level_oracle(self):
        # symmetric 3-guide resonant coupling: exact solution via the
        # bright/dark reduction with coupling sqrt(2)*w
        w = 0.7

        def evaluate(z, side=0):
            return np.array([[0, w, 0], [w, 0, w], [0, w, 0]], dtype=complex)

        h = HamiltonianSpec(dim=3, evaluate=evaluate)
        c0 = np.array([0, 1, 0], dtype=complex)
        traj = propagate_adaptive(h, c0, 0.0, 3.0, 1e-12)
        wb = math.sqrt(2) * w
        i2 = np.cos(wb * traj.z) ** 2
        assert np.max(np.abs(traj.intensities[:, 1] - i2)) < 1e-10


FIG3 = ModelParams(omega0=1.5, delta0=0.1, half_length=12.5, sta=True)


class TestBackendCrossValidation:
    def test_agreement_on_sta_model(self):
        h = build_h2(FIG3)
        a = propagate_adaptive(h, UP, -12.5, 12.5, 1e-12)
        b = propagate_pwc(h, UP, -12.5, 12.5, steps=20000)
        assert np.max(np.abs(a.final_state - b.final_state)) < 1e-6

    def test_richardson_order(self):
        # second-order method: halving the step shrinks the error by ~4
        h = build_h2(FIG3)
        ref = propagate_adaptive(h, UP, -12.5, 12.5, 1e-12).final_state
        e1 = np.max(np.abs(propagate_pwc(h, UP, -12.5, 12.5, 2000).final_state - ref))
        e2 = np.max(np.abs(propagate_pwc(h, UP, -12.5, 12.5, 4000).final_state - ref))
        assert e1 / e2 == pytest.approx(4.0, rel=0.05)

    @settings(max_examples=8, deadline=None)
    @given(st.floats(0.3, 4.0), st.floats(0.05, 1.5), st.floats(2.0, 20.0),
           st.booleans())
    def test_agreement_random_models(self, omega0, delta0, total, sta):
        p = ModelParams(omega0=omega0, delta0=delta0, half_length=total / 2, sta=sta)
        h = build_h2(p)
        a = propagate_adaptive(h, UP, -p.half_length, p.half_length, 1e-10)
        b = propagate_pwc(h, UP, -p.half_length, p.half_length, steps=12000)
        assert np.max(np.abs(a.final_state - b.final_state)) < 1e-5


class TestInvariants:
    def test_pwc_unitary_norm(self):
        h = build_h2(FIG3)
        traj = propagate_pwc(h, UP, -12.5, 12.5, steps=5000)
        assert traj.norm_drift < 1e-12

    def test_adaptive_norm_drift_small(self):
        h = build_h2(FIG3)
        traj = propagate_adaptive(h, UP, -12.5, 12.5, 1e-10)
        assert traj.norm_drift < 1e-8

    def test_z_grid_monotone_and_covers_interval(self):
        h = build_h2(FIG3)
        for traj in (propagate_adaptive(h, UP, -12.5, 12.5, 1e-8),
                     propagate_pwc(h, UP, -12.5, 12.5, 999)):
            assert traj.z[0] == -12.5
            assert traj.z[-1] == 12.5
            assert np.all(np.diff(traj.z) > 0)

    def test_pwc_places_boundary_at_discontinuity(self):
        h = build_h2(FIG3)
        traj = propagate_pwc(h, UP, -12.5, 12.5, steps=501)
        assert 0.0 in traj.z

    def test_composition(self):
        # propagating [a, c] equals propagating [a, b] then [b, c]
        h = constant_h2(0.4, 1.1)
        whole = propagate_adaptive(h, UP, 0.0, 2.0, 1e-12).final_state
        mid = propagate_adaptive(h, UP, 0.0, 0.7, 1e-12).final_state
        mid = mid / np.linalg.norm(mid)
        part = propagate_adaptive(h, mid, 0.7, 2.0, 1e-12).final_state
        assert np.max(np.abs(whole - part)) < 1e-9

    def test_breakpoint_refinement_invariance(self):
        # adding a spurious (continuous) breakpoint must not change physics
        base = build_h2(FIG3)
        refined = HamiltonianSpec(dim=2, evaluate=base.evaluate,
                                  discontinuities=(0.0, 5.0))
        a = propagate_adaptive(base, UP, -12.5, 12.5, 1e-11).final_state
        b = propagate_adaptive(refined, UP, -12.5, 12.5, 1e-11).final_state
        assert np.max(np.abs(a - b)) < 1e-8

    def test_stats_recorded(self):
        h = build_h2(FIG3)
        assert propagate_adaptive(h, UP, -12.5, 12.5, 1e-8).stats["nfev"] > 0
        assert propagate_pwc(h, UP, -12.5, 12.5, 100).stats["steps"] == 100
