import math

import numpy as np
import pytest

from udw.detectors import (
    prob_complex,
    prob_fermion,
    prob_real_scalar,
    prob_real_scalar_3d,
    prob_vector_parallel,
    prob_vector_perp,
)
from udw.fieldmodes import (
    GAMMA0,
    GAMMA1,
    GAMMA2,
    GAMMA3,
    DetectorSpec,
    Statistics,
    WavepacketSpec,
    spinor_mode_u,
)
from udw.oracle import (
    ConvergenceError,
    ProbabilityBreakdown,
    QuadratureConfig,
    SwitchingSpec,
    adiabatic_limit,
    angular_integral_numeric,
    default_start_T,
    finite_t_complex,
    finite_t_fermion,
    finite_t_real_scalar,
    finite_t_vector,
    vacuum_probability_fermion,
    vacuum_probability_scalar,
)

RNG = np.random.default_rng(60901)
TIER2 = QuadratureConfig(tier=2)


def converge(evaluator, wp, tol=1e-4):
    value, diag = adiabatic_limit(evaluator, default_start_T(wp), tol)
    assert diag.converged
    return value, diag


class TestRealScalarOracle:
    def test_recovers_closed_form(self):
        wp = WavepacketSpec.real_scalar(3, 0.0, 1.0, 0.5)
        det = DetectorSpec(omega=1.0)
        closed = prob_real_scalar_3d(det, wp).value
        value, _ = converge(lambda T: finite_t_real_scalar(3, det, wp, SwitchingSpec(T)), wp)
        assert value == pytest.approx(closed, rel=1e-3)
        assert value == pytest.approx(0.2819055589991327, rel=1e-3)  # frozen pin

    def test_transients_vanish_adiabatically(self):
        wp = WavepacketSpec.real_scalar(3, 0.0, 1.0, 0.5)
        det = DetectorSpec(omega=1.0)
        _, diag = converge(lambda T: finite_t_real_scalar(3, det, wp, SwitchingSpec(T)), wp)
        assert diag.vacuums[-1] <= 1e-6 * diag.co_rotatings[-1]
        assert diag.counter_rotatings[-1] <= 1e-6 * diag.co_rotatings[-1]

    def test_counter_rotating_below_vacuum_at_finite_T(self):
        # Cauchy-Schwarz: |<f, U>|^2 <= ||U||^2 at every T
        wp = WavepacketSpec.real_scalar(3, 0.4, 1.0, 0.35)
        det = DetectorSpec(omega=1.2)
        for T in (0.5, 1.0, 2.0, 5.0, 10.0):
            br = finite_t_real_scalar(3, det, wp, SwitchingSpec(T))
            assert br.counter_rotating <= br.vacuum * (1 + 1e-9)

    @pytest.mark.parametrize(
        "n,m,sigma,omega",
        [(1, 0.5, 0.4, 1.2), (2, 0.0, 0.4, 1.0), (4, 0.3, 0.45, 1.1), (5, 0.0, 0.5, 1.0)],
    )
    def test_general_dimension_closed_forms(self, n, m, sigma, omega):
        wp = WavepacketSpec.real_scalar(n, m, 1.0, sigma)
        det = DetectorSpec(omega=omega)
        closed = prob_real_scalar(n, det, wp).value
        value, _ = converge(lambda T: finite_t_real_scalar(n, det, wp, SwitchingSpec(T)), wp)
        assert value == pytest.approx(closed, rel=1e-3)

    def test_sub_gap_converges_to_zero(self):
        wp = WavepacketSpec.real_scalar(3, 1.0, 1.0, 0.3)
        det = DetectorSpec(omega=0.5)
        value, diag = converge(lambda T: finite_t_real_scalar(3, det, wp, SwitchingSpec(T)), wp)
        assert value == 0.0 and diag.converged

    def test_tier2_matches_tier1(self):
        wp = WavepacketSpec.real_scalar(3, 0.2, 1.0, 0.5)
        det = DetectorSpec(omega=1.1)
        sw = SwitchingSpec(40.0)
        t1 = finite_t_real_scalar(3, det, wp, sw)
        t2 = finite_t_real_scalar(3, det, wp, sw, TIER2)
        assert t2.co_rotating == pytest.approx(t1.co_rotating, rel=1e-7)
        assert t2.total == pytest.approx(t1.total, rel=1e-7)

    def test_breakdown_total_is_sum(self):
        wp = WavepacketSpec.real_scalar(3, 0.0, 1.0, 0.5)
        det = DetectorSpec(omega=1.0)
        br = finite_t_real_scalar(3, det, wp, SwitchingSpec(2.0))
        assert br.total == pytest.approx(
            br.vacuum + br.co_rotating + br.counter_rotating, rel=1e-14
        )
        assert br.statistics_sign is None


class TestVectorOracle:
    def test_parallel_recovers_closed_form(self):
        wp = WavepacketSpec.vector(1.0, 0.2, 1.0, 0.0)
        det = DetectorSpec(omega=1.0, theta=0.0)
        closed = prob_vector_parallel(det, wp).value
        value, _ = converge(lambda T: finite_t_vector(det, wp, SwitchingSpec(T)), wp)
        assert value == pytest.approx(closed, rel=1e-3)

    def test_perp_recovers_closed_form(self):
        wp = WavepacketSpec.vector(1.0, 0.2, 1.0, 0.0)
        det = DetectorSpec(omega=1.05, theta=0.5 * math.pi)
        closed = prob_vector_perp(det, wp).value
        value, _ = converge(lambda T: finite_t_vector(det, wp, SwitchingSpec(T)), wp)
        assert value == pytest.approx(closed, rel=1e-3)

    def test_zero_alpha1_no_co_rotating(self):
        wp = WavepacketSpec.vector(1.0, 0.2, 0.0, 1.0)
        det = DetectorSpec(omega=1.0, theta=0.0)
        for T in (1.0, 10.0, 100.0):
            br = finite_t_vector(det, wp, SwitchingSpec(T))
            assert br.co_rotating == 0.0

    def test_rejects_general_angle_at_tier1(self):
        wp = WavepacketSpec.vector(1.0, 0.2, 1.0, 0.0)
        det = DetectorSpec(omega=1.0, theta=0.3)
        with pytest.raises(ValueError):
            finite_t_vector(det, wp, SwitchingSpec(10.0))

    def test_tier2_matches_tier1_at_anchors(self):
        wp = WavepacketSpec.vector(1.0, 0.3, 1.0, 0.0)
        sw = SwitchingSpec(30.0)
        for theta in (0.0, 0.5 * math.pi):
            det = DetectorSpec(omega=1.0, theta=theta)
            t1 = finite_t_vector(det, wp, sw)
            t2 = finite_t_vector(det, wp, sw, TIER2)
            assert t2.co_rotating == pytest.approx(t1.co_rotating, rel=1e-6)

    def test_counter_below_vacuum(self):
        wp = WavepacketSpec.vector(1.0, 0.25, 0.8, 0.6)
        det = DetectorSpec(omega=0.9, theta=0.0)
        for T in (0.5, 2.0, 8.0):
            br = finite_t_vector(det, wp, SwitchingSpec(T))
            assert br.counter_rotating <= br.vacuum * (1 + 1e-9)


class TestFermionOracle:
    def test_recovers_closed_form(self):
        wp = WavepacketSpec.fermion(0.0, 1.0, 0.2, 0, 0, 1.0, 0)
        det = DetectorSpec(omega=1.0, spinor=(0, 0, 1.0, 0))
        closed = prob_fermion(det, wp).value
        value, _ = converge(lambda T: finite_t_fermion(det, wp, SwitchingSpec(T)), wp)
        assert value == pytest.approx(closed, rel=1e-3)
        assert value == pytest.approx(0.1128379167095513, rel=1e-3)  # frozen pin

    def test_recovers_closed_form_mixed_state(self):
        wp = WavepacketSpec.fermion(
            0.4, 1.0, 0.3, 0.3, 0.4, 0.5j, math.sqrt(1 - 0.25 - 0.09 - 0.16)
        )
        det = DetectorSpec(omega=1.3, spinor=(0.5, 0.1j, 0.6, math.sqrt(0.38)))
        closed = prob_fermion(det, wp).value
        value, _ = converge(lambda T: finite_t_fermion(det, wp, SwitchingSpec(T)), wp)
        assert value == pytest.approx(closed, rel=1e-3)

    def test_particle_only_state(self):
        # no co-rotating support; total = vacuum - counter >= 0 at every T
        wp = WavepacketSpec.fermion(0.0, 1.0, 0.25, 0.6, 0.8, 0, 0)
        det = DetectorSpec(omega=1.0, spinor=(0.5, 0.5, 0.5, 0.5))
        for T in (0.5, 1.0, 3.0, 10.0):
            br = finite_t_fermion(det, wp, SwitchingSpec(T))
            assert br.co_rotating == 0.0
            assert br.statistics_sign == -1
            assert br.total == pytest.approx(br.vacuum - br.counter_rotating, rel=1e-14)
            assert br.total >= 0.0

    def test_pauli_blocking_bound(self):
        # particle-sector counter-rotating term never exceeds the vacuum term
        for _ in range(20):
            amps = RNG.normal(size=4) + 1j * RNG.normal(size=4)
            amps /= np.linalg.norm(amps)
            spin = RNG.normal(size=4) + 1j * RNG.normal(size=4)
            spin /= np.linalg.norm(spin)
            m = RNG.uniform(0.0, 1.0)
            wp = WavepacketSpec.fermion(m, 1.0, RNG.uniform(0.2, 0.6), *amps)
            det = DetectorSpec(omega=m + RNG.uniform(0.2, 1.5), spinor=tuple(spin))
            T = RNG.uniform(0.5, 6.0)
            br = finite_t_fermion(det, wp, SwitchingSpec(T))
            assert br.counter_rotating <= br.vacuum * (1 + 1e-9)
            assert br.total >= 0.0

    def test_vacuum_contraction_matches_spinor_sum(self):
        # the closed (pslash + m)-contraction against a numeric sum over
        # spinor outer products, once, at a fixed momentum
        m, omega_gap = 0.7, 1.1
        spinor = np.array([0.4, 0.3j, 0.5, math.sqrt(1 - 0.16 - 0.09 - 0.25)], dtype=complex)
        det = DetectorSpec(omega=omega_gap, spinor=tuple(spinor))
        p = np.array([0.0, 0.0, 1.3])
        omega_p = math.sqrt(1.3**2 + m * m)
        # closed kernel: omega_p + m (|A|^2 - |B|^2), divided by 2 omega (2pi)^3
        delta_ab = abs(spinor[0]) ** 2 + abs(spinor[1]) ** 2 - abs(spinor[2]) ** 2 - abs(spinor[3]) ** 2
        closed = (omega_p + m * delta_ab) / (2 * omega_p * (2 * math.pi) ** 3)
        # the direction-odd gamma.p term cancels exactly between antipodal
        # momenta, so each {p, -p} pair reproduces the closed kernel
        for _ in range(200):
            direction = RNG.normal(size=3)
            direction /= np.linalg.norm(direction)
            pv = 1.3 * direction
            pair = 0.5 * sum(
                abs(np.vdot(spinor, spinor_mode_u(sgn * pv, s, m))) ** 2
                for s in (1, 2)
                for sgn in (+1.0, -1.0)
            )
            assert pair == pytest.approx(closed, rel=1e-12)

    def test_excitation_deexcitation_asymmetry(self):
        # documented point: m = 0.6, Omega = 1.2, A-dominant spinor, T = 3
        det = DetectorSpec(omega=1.2, spinor=(1.0, 0, 0, 0))
        det_neg = DetectorSpec(omega=-1.2, spinor=(1.0, 0, 0, 0))
        sw = SwitchingSpec(3.0)
        exc = vacuum_probability_fermion(0.6, det, sw)
        deex_at_minus = vacuum_probability_fermion(0.6, det_neg, sw, transition="deexcitation")
        assert exc > 0 and deex_at_minus > 0
        assert abs(exc - deex_at_minus) / exc > 0.5  # strongly asymmetric

    def test_scalar_symmetry_for_comparison(self):
        sw = SwitchingSpec(3.0)
        exc = vacuum_probability_scalar(3, 0.6, DetectorSpec(omega=1.2), sw)
        deex_at_minus = vacuum_probability_scalar(
            3, 0.6, DetectorSpec(omega=-1.2), sw, transition="deexcitation"
        )
        assert exc == pytest.approx(deex_at_minus, rel=1e-6)

    def test_massless_equal_sector_spinor_is_symmetric(self):
        # with m = 0 the vacuum kernels coincide, so the asymmetry disappears
        det = DetectorSpec(omega=1.2, spinor=(0.5, 0.5, 0.5, 0.5))
        det_neg = DetectorSpec(omega=-1.2, spinor=(0.5, 0.5, 0.5, 0.5))
        sw = SwitchingSpec(3.0)
        exc = vacuum_probability_fermion(0.0, det, sw)
        deex = vacuum_probability_fermion(0.0, det_neg, sw, transition="deexcitation")
        assert exc == pytest.approx(deex, rel=1e-9)


class TestComplexOracle:
    def setup_method(self):
        self.wp = WavepacketSpec.complex_scalar(3, 0.5, 1.0, 0.4, 0.6, 0.8)
        self.det = DetectorSpec(omega=1.4)

    def test_recovers_scaled_closed_form(self):
        for stats in (Statistics.BOSE, Statistics.FERMI):
            closed = prob_complex(3, stats, self.det, self.wp).value
            value, _ = converge(
                lambda T: finite_t_complex(3, stats, self.det, self.wp, SwitchingSpec(T)),
                self.wp,
            )
            assert value == pytest.approx(closed, rel=1e-3)

    def test_fermi_below_bose_at_finite_T(self):
        for T in (0.5, 1.0, 2.0):
            pb = finite_t_complex(3, Statistics.BOSE, self.det, self.wp, SwitchingSpec(T))
            pf = finite_t_complex(3, Statistics.FERMI, self.det, self.wp, SwitchingSpec(T))
            assert pf.total < pb.total
            assert pf.total >= 0.0
            assert pb.total - pf.total == pytest.approx(2 * pb.counter_rotating, rel=1e-12)

    def test_unit_beta_matches_real_scalar_breakdown(self):
        wp = WavepacketSpec.complex_scalar(3, 0.5, 1.0, 0.4, 0.0, 1.0)
        bare = WavepacketSpec.real_scalar(3, 0.5, 1.0, 0.4)
        sw = SwitchingSpec(2.5)
        cx = finite_t_complex(3, Statistics.BOSE, self.det, wp, sw)
        rs = finite_t_real_scalar(3, self.det, bare, sw)
        assert cx.vacuum == pytest.approx(rs.vacuum, rel=1e-12)
        assert cx.co_rotating == pytest.approx(rs.co_rotating, rel=1e-12)
        assert cx.counter_rotating == 0.0  # alpha = 0 empties the particle sector

    def test_grassmann_vacuum_minus_counter_nonnegative(self):
        wp = WavepacketSpec.complex_scalar(3, 0.0, 1.0, 0.35, 1.0, 0.0)
        for T in (0.5, 1.5, 4.0):
            br = finite_t_complex(3, Statistics.FERMI, self.det, wp, SwitchingSpec(T))
            assert br.total == pytest.approx(br.vacuum - br.counter_rotating, rel=1e-12)
            assert br.total >= 0.0


class TestAdiabaticLimit:
    def test_non_convergence_raises(self):
        wp = WavepacketSpec.real_scalar(3, 0.0, 1.0, 0.5)
        det = DetectorSpec(omega=1.0)
        with pytest.raises(ConvergenceError) as err:
            adiabatic_limit(
                lambda T: finite_t_real_scalar(3, det, wp, SwitchingSpec(T)),
                default_start_T(wp),
                1e-12,
                doubling_budget=3,
            )
        assert err.value.diagnostics is not None
        assert not err.value.diagnostics.converged

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError):
            adiabatic_limit(lambda T: None, 1.0, 2.0)

    def test_monotone_gap_shrinks(self):
        # convergence gap to the closed form shrinks with each doubling
        wp = WavepacketSpec.real_scalar(3, 0.0, 1.0, 0.5)
        det = DetectorSpec(omega=1.0)
        closed = prob_real_scalar_3d(det, wp).value
        gaps = [
            abs(finite_t_real_scalar(3, det, wp, SwitchingSpec(T)).total - closed)
            for T in (80.0, 160.0, 320.0, 640.0)
        ]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))


class TestAngularNumeric:
    def test_unit_sphere(self):
        assert angular_integral_numeric(3, 0.0) == pytest.approx(4 * math.pi, abs=1e-10)

    def test_n3_elementary(self):
        assert angular_integral_numeric(3, 2.0) == pytest.approx(
            4 * math.pi * math.sinh(2.0) / 2.0, rel=1e-8
        )

    def test_n5_cross_validation(self):
        from udw.specfun import angular_exp_integral

        assert angular_integral_numeric(5, 10.0) == pytest.approx(
            angular_exp_integral(5, 10.0).to_float(), rel=1e-8
        )

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            angular_integral_numeric(7, 1.0)
        with pytest.raises(ValueError):
            angular_integral_numeric(1, 1.0)


class TestBreakdownInvariants:
    def test_total_nonnegative_random_states(self):
        # all four models at random finite T
        for _ in range(25):
            T = RNG.uniform(0.3, 8.0)
            sw = SwitchingSpec(T)
            m = RNG.uniform(0.0, 1.0)
            sigma = RNG.uniform(0.2, 0.8)
            omega = RNG.uniform(0.1, 2.5)
            wp = WavepacketSpec.real_scalar(3, m, 1.0, sigma)
            assert finite_t_real_scalar(3, DetectorSpec(omega=omega), wp, sw).total >= 0.0
            z = RNG.normal(size=2) + 1j * RNG.normal(size=2)
            z /= np.linalg.norm(z)
            wpc = WavepacketSpec.complex_scalar(3, m, 1.0, sigma, *z)
            for stats in (Statistics.BOSE, Statistics.FERMI):
                assert finite_t_complex(3, stats, DetectorSpec(omega=omega), wpc, sw).total >= 0.0
