import math

import numpy as np
import pytest

from msgatesim import msgate
from msgatesim.msgate import FrequencyOffset, calibrate_gate

TWO_PI = 2.0 * np.pi


def simpson(values, dx):
    # composite Simpson on an odd number of samples
    n = len(values) - 1
    assert n % 2 == 0
    return dx / 3.0 * (values[0] + values[-1]
                       + 4.0 * sum(values[1:-1:2]) + 2.0 * sum(values[2:-2:2]))


class TestCalibration:
    def test_reference_gate(self, params):
        assert params.delta0 / TWO_PI == pytest.approx(-33333.3333333, rel=1e-9)
        assert params.eta_omega / TWO_PI == pytest.approx(11785.113019775792, rel=1e-12)

    def test_one_loop_gate(self):
        p = calibrate_gate(1, 100e-6, TWO_PI * 3e6)
        assert p.delta0 / TWO_PI == pytest.approx(-10e3)
        assert p.eta_omega / TWO_PI == pytest.approx(5e3)

    @pytest.mark.parametrize("loops", [1, 2, 3])
    def test_loop_closure(self, loops):
        p = calibrate_gate(loops, 80e-6, TWO_PI * 3e6)
        assert abs(msgate.trajectory(p, FrequencyOffset(0.0), p.tau)) < 1e-12

    def test_invalid_params_rejected(self):
        with pytest.raises(ValueError):
            msgate.GateParams(eta_omega=1.0, delta0=-1.0, tau=1.0, loops=1, nu0=1.0)


class TestTrajectory:
    def test_starts_at_origin(self, params):
        assert msgate.trajectory(params, FrequencyOffset(TWO_PI * 123.0), 0.0) == 0.0

    def test_closes_at_tau(self, params):
        assert abs(msgate.trajectory(params, FrequencyOffset(0.0), params.tau)) < 1e-12

    def test_residual_matches_velocity_quadrature(self, params):
        # d(alpha)/dt = i eta_omega e^{-i delta t}; integrate by Simpson
        off = FrequencyOffset(-TWO_PI * 600.0)
        delta = params.delta0 - off.delta_nu
        ts = np.linspace(0.0, params.tau, 20001)
        vel = 1j * params.eta_omega * np.exp(-1j * delta * ts)
        ref = simpson(vel, ts[1] - ts[0])
        val = msgate.trajectory(params, off, params.tau)
        assert abs(val - ref) < 1e-10

    def test_small_detuning_series(self, params):
        # delta -> 0 when the offset cancels the nominal detuning
        off = FrequencyOffset(params.delta0)
        t = 10e-6
        assert msgate.trajectory(params, off, t) == pytest.approx(
            1j * params.eta_omega * t, rel=1e-9
        )

    def test_outside_gate_window_rejected(self, params):
        with pytest.raises(ValueError):
            msgate.trajectory(params, FrequencyOffset(0.0), 2 * params.tau)

    def test_offset_sanity_bound(self, params):
        with pytest.raises(ValueError):
            msgate.trajectory(params, FrequencyOffset(6.0 * params.delta0), 1e-6)


class TestGeometricPhase:
    def test_zero_at_start(self, params):
        assert msgate.geometric_phase(params, FrequencyOffset(TWO_PI * 77.0), 0.0) == 0.0

    def test_quarter_turn_at_tau(self, params):
        b = msgate.geometric_phase(params, FrequencyOffset(0.0), params.tau)
        assert b == pytest.approx(-math.pi / 2.0, rel=1e-12)

    def test_matches_loop_area_quadrature(self, params):
        # B(t) = integral of Im(a) dRe(a) - Re(a) dIm(a)
        off = FrequencyOffset(-TWO_PI * 600.0)
        delta = params.delta0 - off.delta_nu
        ts = np.linspace(0.0, params.tau, 40001)
        alpha = params.eta_omega / delta * (1.0 - np.exp(-1j * delta * ts))
        vel = 1j * params.eta_omega * np.exp(-1j * delta * ts)
        integrand = alpha.imag * vel.real - alpha.real * vel.imag
        ref = simpson(integrand, ts[1] - ts[0])
        val = msgate.geometric_phase(params, off, params.tau)
        assert abs(val - ref) < 1e-9 * abs(ref)

    def test_small_detuning_series(self, params):
        off = FrequencyOffset(params.delta0)
        t = 10e-6
        assert msgate.geometric_phase(params, off, t) == pytest.approx(0.0, abs=1e-15)


class TestPropagator:
    def test_perfect_gate_disentangles(self, params):
        N = 16
        U = msgate.propagator(params, FrequencyOffset(0.0), N)
        V = msgate.JY_EIGENBASIS
        spin = (V * np.exp(1j * np.pi / 2 * msgate.JY_EIGENVALUES**2)) @ V.conj().T
        np.testing.assert_allclose(U, np.kron(spin, np.eye(N)), atol=1e-12)

    def test_unitary_below_buffer(self, params):
        N = 32
        U = msgate.propagator(params, FrequencyOffset(-TWO_PI * 600.0), N)
        gram = U.conj().T @ U
        safe = msgate.propagator_safe_block(params, N)
        idx = np.concatenate([a * N + np.arange(safe) for a in range(4)])
        np.testing.assert_allclose(gram[np.ix_(idx, idx)], np.eye(4 * safe), atol=1e-8)

    def test_commutes_with_jy(self, params):
        N = 12
        U = msgate.propagator(params, FrequencyOffset(TWO_PI * 1500.0), N)
        Jy = np.kron(msgate.JY_MATRIX, np.eye(N))
        assert np.max(np.abs(U @ Jy - Jy @ U)) < 1e-10


class TestBruteForce:
    def test_blocked_equals_dense(self, params):
        off = FrequencyOffset(-TWO_PI * 600.0)
        Ub = msgate.brute_force_propagator(params, off, 8, 128, method="blocked")
        Ud = msgate.brute_force_propagator(params, off, 8, 128, method="dense")
        np.testing.assert_allclose(Ub, Ud, atol=1e-12)

    def test_product_unitary(self, params):
        U = msgate.brute_force_propagator(params, FrequencyOffset(TWO_PI * 900.0), 12, 64)
        np.testing.assert_allclose(U.conj().T @ U, np.eye(48), atol=1e-10)

    def test_second_order_convergence(self, params):
        # error vs the closed form drops ~4x per step doubling
        off = FrequencyOffset(0.0)
        N, inner = 24, 10
        U_exact = msgate.propagator(params, off, N)
        mask = np.ix_(
            np.concatenate([a * N + np.arange(inner) for a in range(4)]),
            np.concatenate([a * N + np.arange(inner) for a in range(4)]),
        )
        errs = []
        for steps in (512, 1024, 2048):
            Ub = msgate.brute_force_propagator(params, off, N, steps)
            errs.append(np.max(np.abs((U_exact - Ub)[mask])))
        r1 = errs[0] / errs[1]
        r2 = errs[1] / errs[2]
        assert 3.5 < r1 < 4.5
        assert 3.5 < r2 < 4.5

    def test_oracle_equivalence_at_zero_offset(self, params):
        N, inner = 32, 16
        U_exact = msgate.propagator(params, FrequencyOffset(0.0), N)
        Ub = msgate.brute_force_propagator(params, FrequencyOffset(0.0), N, 16384)
        mask = np.ix_(
            np.concatenate([a * N + np.arange(inner) for a in range(4)]),
            np.concatenate([a * N + np.arange(inner) for a in range(4)]),
        )
        assert np.max(np.abs((U_exact - Ub)[mask])) < 1e-6

    def test_bad_method_rejected(self, params):
        with pytest.raises(ValueError):
            msgate.brute_force_propagator(params, FrequencyOffset(0.0), 8, 16, method="euler")
