import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from udw.fieldmodes import (
    GAMMA0,
    GAMMA1,
    GAMMA2,
    GAMMA3,
    DetectorSpec,
    WavepacketSpec,
    dispersion,
    gaussian_spectrum,
    polarization_basis,
    spinor_mode_u,
    spinor_mode_v,
)

RNG = np.random.default_rng(20240811)


class TestDispersion:
    def test_rest_mass(self):
        assert dispersion(0.0, 2.0) == 2.0

    def test_pythagorean(self):
        assert dispersion(3.0, 4.0) == pytest.approx(5.0, rel=1e-15)

    def test_resonance_point(self):
        # gap at which the massive-field response peaks for k0 = 1, m = sqrt(3)
        assert dispersion(1.0, math.sqrt(3.0)) == pytest.approx(2.0, rel=1e-15)

    def test_massless_is_identity(self):
        for k in (0.0, 0.37, 12.0):
            assert dispersion(k, 0.0) == k

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(min_value=0, max_value=1e3),
        st.floats(min_value=0, max_value=1e3),
        st.floats(min_value=1e-6, max_value=10.0),
    )
    def test_monotone_in_both_arguments(self, k, m, dk):
        # nondecreasing at double resolution; the derivative vanishes at the
        # origin of either argument, so strictness needs a coarse increment
        assert dispersion(k + dk, m) >= dispersion(k, m)
        assert dispersion(k, m + dk) >= dispersion(k, m)
        assert dispersion(k + 1.0, m + 1.0) > dispersion(k, m)


class TestWavepacketSpec:
    def test_rejects_denormalized_amplitudes(self):
        with pytest.raises(ValueError):
            WavepacketSpec.vector(1.0, 0.2, 1.0, 0.5)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            WavepacketSpec.real_scalar(0, 0.0, 1.0, 0.2)
        with pytest.raises(ValueError):
            WavepacketSpec.real_scalar(3, -1.0, 1.0, 0.2)
        with pytest.raises(ValueError):
            WavepacketSpec.real_scalar(3, 0.0, 0.0, 0.2)
        with pytest.raises(ValueError):
            WavepacketSpec.real_scalar(3, 0.0, 1.0, -0.2)

    def test_accepts_complex_amplitudes(self):
        wp = WavepacketSpec.fermion(0.0, 1.0, 0.2, 0.5j, 0.5, 0.5, -0.5j)
        assert sum(abs(a) ** 2 for a in wp.amplitudes) == pytest.approx(1.0, abs=1e-14)

    def test_detector_spinor_normalization(self):
        with pytest.raises(ValueError):
            DetectorSpec(omega=1.0, spinor=(1.0, 1.0, 0.0, 0.0))
        DetectorSpec(omega=1.0, spinor=(0.5, 0.5, 0.5, 0.5))


class TestGaussianSpectrum:
    def test_peak_weight(self):
        wp = WavepacketSpec.real_scalar(3, 0.0, 1.0, 0.2)
        # at k = k0 the angular factor contributes exp(k0^2/sigma^2)
        peak = gaussian_spectrum(wp.k0, wp) * math.exp(wp.k0**2 / wp.sigma**2)
        assert peak == pytest.approx((math.pi * wp.sigma**2) ** (-3 / 4), rel=1e-12)

    @pytest.mark.parametrize("n,sigma", [(3, 0.2), (2, 1.0), (1, 0.5), (4, 0.7)])
    def test_unit_l2_norm(self, n, sigma):
        # radial-polar quadrature oracle for the full n-dimensional norm
        wp = WavepacketSpec.real_scalar(n, 0.0, 1.0, sigma)

        def radial(k):
            base = gaussian_spectrum(k, wp) ** 2 * k ** (n - 1)
            a = 2.0 * k * wp.k0 / wp.sigma**2  # |f|^2 doubles the angular exponent
            if n == 1:
                ang = 2.0 * math.cosh(a)
            else:
                surf = 2 * math.pi ** (0.5 * (n - 1)) / math.gamma(0.5 * (n - 1))
                ang, _ = integrate.quad(
                    lambda t: math.exp(a * math.cos(t)) * math.sin(t) ** (n - 2),
                    0.0,
                    math.pi,
                )
                ang *= surf
            return base * ang

        norm2, _ = integrate.quad(radial, 0.0, wp.k0 + 12 * sigma, limit=200)
        assert norm2 == pytest.approx(1.0, rel=1e-8)


def _random_momenta(count):
    return RNG.normal(0.0, 2.0, size=(count, 3))


class TestSpinorModes:
    def test_rest_frame_spinor(self):
        u = spinor_mode_u(np.zeros(3), 1, 1.0)
        expected = (2 * math.pi) ** -1.5 * np.array([1.0, 0, 0, 0])
        np.testing.assert_allclose(u, expected, atol=1e-15)

    def test_normalization(self):
        # (omega+m)/(2 omega) * (1 + p^2/(omega+m)^2) == 1 for any p
        for p in _random_momenta(50):
            for s in (1, 2):
                u = spinor_mode_u(p, s, 0.7)
                v = spinor_mode_v(p, s, 0.7)
                assert np.vdot(u, u).real == pytest.approx((2 * math.pi) ** -3, rel=1e-12)
                assert np.vdot(v, v).real == pytest.approx((2 * math.pi) ** -3, rel=1e-12)

    def test_spin_orthogonality_along_z(self):
        p = np.array([0.0, 0.0, 1.3])
        u1, u2 = spinor_mode_u(p, 1, 0.5), spinor_mode_u(p, 2, 0.5)
        assert abs(np.vdot(u1, u2)) < 1e-16

    def test_invalid_spin_index(self):
        with pytest.raises(ValueError):
            spinor_mode_u(np.ones(3), 3, 1.0)
        with pytest.raises(ValueError):
            spinor_mode_v(np.ones(3), 0, 1.0)

    def test_u_completeness_is_projector(self):
        # sum_s u ubar = (pslash + m) / (2 omega (2pi)^3)
        m = 0.8
        for p in _random_momenta(20):
            omega = math.sqrt(float(p @ p) + m * m)
            outer = sum(
                np.outer(spinor_mode_u(p, s, m), np.conj(spinor_mode_u(p, s, m)) @ GAMMA0)
                for s in (1, 2)
            )
            pslash = omega * GAMMA0 - p[0] * GAMMA1 - p[1] * GAMMA2 - p[2] * GAMMA3
            expected = (pslash + m * np.eye(4)) / (2 * omega * (2 * math.pi) ** 3)
            np.testing.assert_allclose(outer, expected, atol=1e-12)

    def test_v_completeness_is_projector(self):
        # sum_s v vbar = (pslash - m) / (2 omega (2pi)^3)
        m = 0.8
        for p in _random_momenta(20):
            omega = math.sqrt(float(p @ p) + m * m)
            outer = sum(
                np.outer(spinor_mode_v(p, s, m), np.conj(spinor_mode_v(p, s, m)) @ GAMMA0)
                for s in (1, 2)
            )
            pslash = omega * GAMMA0 - p[0] * GAMMA1 - p[1] * GAMMA2 - p[2] * GAMMA3
            expected = (pslash - m * np.eye(4)) / (2 * omega * (2 * math.pi) ** 3)
            np.testing.assert_allclose(outer, expected, atol=1e-12)


class TestPolarizationBasis:
    def test_pole_aligned_with_z(self):
        pair = polarization_basis([0.0, 0.0, 2.0])
        np.testing.assert_allclose(pair.eps1, [1.0, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(pair.eps2, [0.0, 1.0, 0.0], atol=1e-15)

    def test_rejects_zero_vector(self):
        with pytest.raises(ValueError):
            polarization_basis([0.0, 0.0, 0.0])

    def test_transversality_and_orthonormality(self):
        for k in _random_momenta(1000):
            if np.linalg.norm(k) < 1e-12:
                continue
            e1, e2 = polarization_basis(k)
            assert abs(e1 @ k) < 1e-12 * np.linalg.norm(k)
            assert abs(e2 @ k) < 1e-12 * np.linalg.norm(k)
            assert e1 @ e1 == pytest.approx(1.0, abs=1e-12)
            assert e2 @ e2 == pytest.approx(1.0, abs=1e-12)
            assert abs(e1 @ e2) < 1e-12

    def test_completeness(self):
        # sum_s eps_i eps_j == delta_ij - k_i k_j / |k|^2
        for k in _random_momenta(200):
            norm = np.linalg.norm(k)
            if norm < 1e-12:
                continue
            e1, e2 = polarization_basis(k)
            lhs = np.outer(e1, e1) + np.outer(e2, e2)
            rhs = np.eye(3) - np.outer(k, k) / norm**2
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)
