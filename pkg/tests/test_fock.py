import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from msgatesim import fock


def laguerre_series(n, k, x):
    # independent oracle: direct series in exact rational arithmetic
    from fractions import Fraction

    xf = Fraction(x)
    total = Fraction(0)
    for i in range(n + 1):
        total += (-1) ** i * math.comb(n + k, n - i) * xf**i / math.factorial(i)
    return float(total)


def displacement_generator(alpha, N):
    a = np.diag(np.sqrt(np.arange(1, N)), 1)
    return alpha * a.conj().T - np.conj(alpha) * a


class TestLaguerre:
    def test_order_zero_is_one(self):
        assert fock.laguerre(0, 3, 1.7) == 1.0

    def test_order_one(self):
        assert fock.laguerre(1, 2, 0.5) == pytest.approx(2.5)

    def test_order_two_direct(self):
        # L_2(x) = (x^2 - 4x + 2)/2 at x = 2
        assert fock.laguerre(2, 0, 2.0) == pytest.approx(-1.0)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            fock.laguerre(-1, 0, 1.0)

    @given(
        n=st.integers(0, 25),
        k=st.integers(0, 15),
        x=st.floats(0.0, 30.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_matches_series_oracle(self, n, k, x):
        ref = laguerre_series(n, k, x)
        tol = 1e-9 * max(1.0, abs(ref))
        assert abs(fock.laguerre(n, k, x) - ref) <= tol


class TestDisplacedFockCoefficients:
    def test_zero_displacement_is_basis_vector(self):
        c = fock.displaced_fock_coefficients(0.0, 3, 8)
        expected = np.zeros(8)
        expected[3] = 1.0
        np.testing.assert_allclose(c, expected)

    def test_coherent_state_poisson_amplitudes(self):
        alpha = 0.9 - 0.4j
        c = fock.displaced_fock_coefficients(alpha, 0, 25)
        m = np.arange(25)
        expected = np.exp(-abs(alpha) ** 2 / 2) * alpha**m / np.sqrt(
            np.array([math.factorial(i) for i in m], dtype=float)
        )
        np.testing.assert_allclose(c, expected, atol=1e-12)

    def test_matches_matrix_exponential_oracle(self):
        # column 1 of expm on a doubled (40-level) space, truncated to 20
        ref = expm(displacement_generator(1.0, 40))[:20, 1]
        c = fock.displaced_fock_coefficients(1.0, 1, 20)
        np.testing.assert_allclose(c, ref, atol=1e-9)

    def test_truncation_error_raised(self):
        with pytest.raises(fock.TruncationError):
            fock.displaced_fock_coefficients(2.5, 3, 6)

    @given(
        mag=st.floats(0.05, 1.5),
        phase=st.floats(0.0, 2 * math.pi),
        n=st.integers(0, 6),
    )
    @settings(max_examples=60, deadline=None)
    def test_columns_orthonormal(self, mag, phase, n):
        alpha = mag * np.exp(1j * phase)
        N = 40
        ci = fock.displaced_fock_coefficients(alpha, n, N)
        cj = fock.displaced_fock_coefficients(alpha, n + 3, N)
        assert abs(np.vdot(ci, ci) - 1.0) < 1e-7
        assert abs(np.vdot(ci, cj)) < 1e-7


class TestDisplacementMatrix:
    def test_zero_is_identity(self):
        np.testing.assert_array_equal(fock.displacement_matrix(0.0, 4), np.eye(4))

    def test_inverse_displacement(self):
        alpha = 0.8 + 0.3j
        N = 30
        D = fock.displacement_matrix(alpha, N)
        Dinv = fock.displacement_matrix(-alpha, N)
        # column deficits bound the product error, so the norm-complete block
        # must recover the identity
        safe = min(fock.complete_columns(D), fock.complete_columns(Dinv))
        assert safe >= 10
        prod = (D @ Dinv)[:safe, :safe]
        np.testing.assert_allclose(prod, np.eye(safe), atol=1e-7)

    def test_matches_matrix_exponential_block(self):
        alpha = 0.7 + 0.2j
        ref = expm(displacement_generator(alpha, 60))[:15, :15]
        D = fock.displacement_matrix(alpha, 30)[:15, :15]
        np.testing.assert_allclose(D, ref, atol=1e-9)

    def test_ladder_recurrence_route_agrees(self):
        alpha = -0.6 + 1.1j
        D = fock.displacement_matrix(alpha, 45, validate=False)
        C = fock.displacement_columns(alpha, 45, 45)
        np.testing.assert_allclose(D, C, atol=1e-11)

    def test_insufficient_truncation_raises(self):
        with pytest.raises(fock.TruncationError):
            fock.displacement_matrix(2.0, 5)


class TestThermalWeights:
    def test_ground_state(self):
        np.testing.assert_array_equal(fock.thermal_weights(0.0, 5), [1, 0, 0, 0, 0])

    def test_unit_occupation_geometric(self):
        np.testing.assert_allclose(fock.thermal_weights(1.0, 3), [0.5, 0.25, 0.125])

    def test_partial_sum_closed_form(self):
        w = fock.thermal_weights(0.49, 64)
        r = 0.49 / 1.49
        assert abs(w.sum() - (1.0 - r**64)) < 1e-14
        assert abs(w.sum() - 1.0) < 1e-10

    @given(nbar=st.floats(0.0, 5.0), n=st.integers(1, 200))
    @settings(max_examples=100, deadline=None)
    def test_sum_formula(self, nbar, n):
        w = fock.thermal_weights(nbar, n)
        assert np.all(w >= 0.0)
        r = nbar / (1.0 + nbar) if nbar > 0 else 0.0
        assert abs(w.sum() - (1.0 - r**n)) < 1e-12


class TestMotionalDensityMatrix:
    def test_ground_state(self):
        spec = fock.MotionalSpec(0.0, 0.0, 0.0, 6)
        rho = fock.motional_density_matrix(spec)
        expected = np.zeros((6, 6))
        expected[0, 0] = 1.0
        np.testing.assert_allclose(rho.entries, expected)

    def test_pure_thermal_is_diagonal_and_phase_free(self):
        r1 = fock.motional_density_matrix(fock.MotionalSpec(0.0, 0.3, 1.0, 40))
        r2 = fock.motional_density_matrix(fock.MotionalSpec(0.0, 2.1, 1.0, 40))
        np.testing.assert_array_equal(r1.entries, r2.entries)
        np.testing.assert_allclose(r1.entries, np.diag(fock.thermal_weights(1.0, 40)))

    def test_mean_occupation_section5_values(self):
        spec = fock.MotionalSpec(math.sqrt(0.47), 0.0, 0.12, 32)
        rho = fock.motional_density_matrix(spec)
        assert abs(rho.mean_occupation() - 0.59) < 1e-6

    def test_phase_covariance(self):
        phi = 1.234
        N = 30
        base = fock.motional_density_matrix(fock.MotionalSpec(0.8, 0.0, 0.4, N))
        rot = fock.motional_density_matrix(fock.MotionalSpec(0.8, phi, 0.4, N))
        R = np.diag(np.exp(1j * np.arange(N) * phi))
        np.testing.assert_allclose(rot.entries, R @ base.entries @ R.conj().T, atol=1e-10)

    @given(
        alpha_sq=st.floats(0.0, 4.0),
        nbar=st.floats(0.0, 2.0),
        phi=st.floats(0.0, 2 * math.pi),
    )
    @settings(max_examples=40, deadline=None)
    def test_trace_psd_and_occupation(self, alpha_sq, nbar, phi):
        n = fock.choose_truncation(math.sqrt(alpha_sq), nbar, 1e-8)
        spec = fock.MotionalSpec(math.sqrt(alpha_sq), phi, nbar, n)
        rho = fock.motional_density_matrix(spec)
        assert 1.0 - 1e-8 <= rho.trace <= 1.0 + 1e-12
        assert np.linalg.eigvalsh(rho.entries)[0] > -1e-10
        assert abs(rho.mean_occupation() - (alpha_sq + nbar)) < 10 * 1e-8 * n + 1e-9

    def test_validation_rejects_undersized_ladder(self):
        with pytest.raises(fock.TruncationError):
            fock.motional_density_matrix(fock.MotionalSpec(2.0, 0.0, 1.0, 6))


class TestDisplacedThermalPopulations:
    @given(
        alpha_sq=st.floats(0.0, 3.0),
        nbar=st.floats(0.0, 3.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_matches_density_matrix_diagonal(self, alpha_sq, nbar):
        N = fock.choose_truncation(math.sqrt(alpha_sq), nbar, 1e-8)
        p = fock.displaced_thermal_populations(alpha_sq, nbar, N)
        spec = fock.MotionalSpec(math.sqrt(alpha_sq), 0.0, nbar, N)
        diag = np.real(np.diag(fock.motional_density_matrix(spec).entries))
        # the matrix route drops a thermal tail of order 1e-10 by design
        np.testing.assert_allclose(p, diag, atol=1e-9)


class TestThermalOccupation:
    def test_low_temperature_limit(self):
        assert fock.thermal_occupation(1e-9, 2 * np.pi * 3e6) < 1e-30

    def test_ln2_point_is_one(self):
        from scipy.constants import hbar, k

        nu = 2 * np.pi * 3e6
        T = hbar * nu / (k * math.log(2.0))
        assert fock.thermal_occupation(T, nu) == pytest.approx(1.0, rel=1e-12)

    def test_one_millikelvin(self):
        from scipy.constants import hbar, k

        nu = 2 * np.pi * 3e6
        expected = 1.0 / math.expm1(hbar * nu / (k * 1e-3))
        assert fock.thermal_occupation(1e-3, nu) == pytest.approx(expected, rel=1e-12)

    def test_monotone_in_temperature(self):
        nu = 2 * np.pi * 3e6
        temps = np.linspace(1e-5, 1e-2, 20)
        vals = [fock.thermal_occupation(t, nu) for t in temps]
        assert np.all(np.diff(vals) > 0)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            fock.thermal_occupation(0.0, 1.0)
        with pytest.raises(ValueError):
            fock.thermal_occupation(1.0, -1.0)


class TestChooseTruncation:
    def test_ground_state_floor(self):
        assert fock.choose_truncation(0.0, 0.0, 1e-8) == 8

    def test_tail_oracle_alpha_sq_two(self):
        n = fock.choose_truncation(math.sqrt(2.0), 0.0, 1e-8)
        # oracle: tail of the exact populations computed on a huge ladder
        p = fock.displaced_thermal_populations(2.0, 0.0, 512)
        assert p[n:].sum() < 1e-8
        # and the chosen N is not wastefully large: a third of it fails
        small = max(n // 3, 1)
        assert p[small:].sum() > 1e-8

    def test_doubled_truncation_oracle(self):
        n = fock.choose_truncation(math.sqrt(0.47), 0.12, 1e-8)
        spec = fock.MotionalSpec(math.sqrt(0.47), 0.0, 0.12, n)
        spec2 = fock.MotionalSpec(math.sqrt(0.47), 0.0, 0.12, 2 * n)
        t1 = fock.motional_density_matrix(spec).trace
        t2 = fock.motional_density_matrix(spec2).trace
        assert abs(t1 - t2) < 1e-8

    def test_gate_padding(self):
        bare = fock.choose_truncation(math.sqrt(2.0), 0.0, 1e-8)
        padded = fock.choose_truncation(
            math.sqrt(2.0), 0.0, 1e-8, drive_displacement=0.7071
        )
        assert padded == bare + math.ceil(4 * (math.sqrt(2.0) + 0.7071) ** 2 + 10)

    def test_cap_exceeded_raises(self):
        with pytest.raises(fock.TruncationError):
            fock.choose_truncation(15.0, 0.0, 1e-8, cap=128)
