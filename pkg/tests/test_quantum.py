import cmath
import math

import numpy as np
import pytest
import scipy.integrate

from becdrive import BogoCoefficients
from becdrive.quantum import (
    DensityCorrelator,
    ModeState,
    anomalous,
    anomalous_sq,
    density_correlator,
    depletion,
    depletion_validity,
    g22,
    gamma_lambda_at_tm,
    gamma_lambda_product,
    gamma_sq_closed,
    half_temperature_occupation,
    mode_state,
    nonseparability,
    number_variance,
    occupation,
    optimal_time,
    time_averaged_occupation,
    total_coefficients,
    two_mode_variance,
    two_mode_variance_alt,
)

from conftest import random_gaussian_states


def random_coefficients(rng, beta_scale=1.0):
    beta = beta_scale * (rng.normal() + 1j * rng.normal())
    alpha = cmath.exp(1j * rng.uniform(0, 2 * math.pi)) * math.sqrt(1.0 + abs(beta) ** 2)
    return BogoCoefficients(alpha=alpha, beta=beta)


def random_uv(rng):
    v = -(10.0 ** rng.uniform(-3, 0.5))
    return math.sqrt(1.0 + v * v), v


class TestTotalCoefficients:
    def test_trivial_history_free_gas(self):
        c = BogoCoefficients(1.0, 0.0)
        lam, gam = total_coefficients(c, 1.0, 0.0, 1.3, 2.0)
        assert complex(lam) == pytest.approx(cmath.exp(1j * 1.3 * 2.0))
        assert complex(gam) == 0.0
        # occupation reduces to the initial thermal one
        assert occupation(0.7, abs(complex(gam)) ** 2) == pytest.approx(0.7)

    def test_pure_quantum_depletion(self, rng):
        c = BogoCoefficients(1.0, 0.0)
        u, v = random_uv(rng)
        for t in (0.0, 0.3, 2.7):
            _, gam = total_coefficients(c, u, v, 0.9, t)
            assert abs(complex(gam)) ** 2 == pytest.approx(v * v, abs=1e-12)

    def test_group_normalization(self, rng):
        """|lambda|^2 - |gamma|^2 = 1 for random histories and times."""
        for _ in range(300):
            c = random_coefficients(rng, beta_scale=10.0 ** rng.uniform(-2, 1))
            u, v = random_uv(rng)
            lam, gam = total_coefficients(c, u, v, 1.1, rng.uniform(0, 10))
            norm = abs(complex(lam)) ** 2 - abs(complex(gam)) ** 2
            scale = max(1.0, abs(complex(lam)) ** 2)
            assert abs(norm - 1.0) / scale < 1e-9

    def test_matches_closed_form(self, rng):
        """Direct |gamma(t)|^2 equals the cosine closed form to 1e-10."""
        for _ in range(200):
            c = random_coefficients(rng)
            u, v = random_uv(rng)
            omega = 10.0 ** rng.uniform(-1, 1)
            t = rng.uniform(0, 20)
            _, gam = total_coefficients(c, u, v, omega, t)
            closed = gamma_sq_closed(v, abs(c.beta), c.delta_k, omega, t)
            assert abs(abs(complex(gam)) ** 2 - closed) < 1e-10 * max(1.0, closed)


class TestGammaSqClosed:
    def test_no_interaction_limit(self):
        assert gamma_sq_closed(0.0, 0.8, 0.3, 1.0, 5.0) == pytest.approx(0.64)

    def test_no_drive_limit(self):
        assert gamma_sq_closed(-0.5, 0.0, 0.0, 1.0, 5.0) == pytest.approx(0.25)

    def test_time_average_drops_cosine(self):
        """Averaging over one out-period leaves v^2 + |b|^2 + 2 v^2 |b|^2."""
        v, b, omega, delta = -0.6, 1.2, 0.9, 0.77
        period = math.pi / omega
        avg, _ = scipy.integrate.quad(
            lambda t: gamma_sq_closed(v, b, delta, omega, t), 0.0, period,
            epsabs=1e-13, epsrel=1e-13, limit=200,
        )
        avg /= period
        expected = v * v + b * b + 2.0 * v * v * b * b
        assert avg == pytest.approx(expected, abs=1e-10)


class TestOccupationAndAnomalous:
    def test_occupation_values(self):
        assert occupation(0.0, 0.0) == 0.0
        assert occupation(1.0, 1.0) == 4.0
        assert occupation(0.7, 0.0) == pytest.approx(0.7)

    def test_anomalous_zero_without_gamma(self):
        assert anomalous(1.0, 1.0 + 0j, 0.0 + 0j) == 0.0

    def test_pure_state_saturation(self):
        # n_th = 0, |gamma|^2 = 1: |m|^2 = 2 = n (n + 1) with n = 1
        assert anomalous_sq(0.0, 1.0) == pytest.approx(2.0)
        n = occupation(0.0, 1.0)
        assert anomalous_sq(0.0, 1.0) == pytest.approx(n * (n + 1.0))

    def test_modulus_matches_closed_form(self, rng):
        for _ in range(200):
            c = random_coefficients(rng)
            u, v = random_uv(rng)
            n_th = 10.0 ** rng.uniform(-2, 1.5)
            lam, gam = total_coefficients(c, u, v, 1.0, rng.uniform(0, 5))
            m = complex(anomalous(n_th, lam, gam))
            closed = anomalous_sq(n_th, abs(complex(gam)) ** 2)
            assert abs(abs(m) ** 2 - closed) < 1e-10 * max(1.0, closed)


class TestG22:
    def test_same_mode(self):
        assert g22(1.0, 0.0, "same_mode") == 2.0

    def test_opposite_momentum(self):
        assert g22(1.0, cmath.sqrt(2.0), "opposite_momentum") == pytest.approx(3.0)

    def test_independent(self):
        assert g22(2.0, 5.0, "independent") == 4.0

    def test_unknown_relation(self):
        with pytest.raises(ValueError):
            g22(1.0, 0.0, "adjacent")

    def test_intensity_csi_iff_anomalous_dominates(self, rng):
        """Cross beating auto correlations is exactly |m|^2 > n^2."""
        n_th, g = random_gaussian_states(rng, 2000)
        n = occupation(n_th, g)
        m_sq = anomalous_sq(n_th, g)
        mask = n > 0
        csi = g22(n[mask], np.sqrt(m_sq[mask]), "opposite_momentum") > g22(
            n[mask], 0.0, "same_mode"
        )
        assert np.array_equal(csi, m_sq[mask] > n[mask] ** 2)


class TestTwoModeVariance:
    def test_thermal_pair(self):
        assert two_mode_variance(1.0, 0.0) == 2.0

    def test_maximal_squeezing(self):
        assert two_mode_variance(1.0, cmath.sqrt(2.0)) == pytest.approx(0.0)

    def test_vacuum_undefined(self):
        with pytest.raises(ValueError):
            two_mode_variance(0.0, 0.0)
        with pytest.raises(ValueError):
            two_mode_variance_alt(0.0, 0.0)

    def test_super_poissonian_without_gamma(self):
        # V = 1 + n_th for the undriven noninteracting thermal state
        assert two_mode_variance_alt(1.0, 0.0) == pytest.approx(2.0)
        assert two_mode_variance_alt(0.25, 0.0) == pytest.approx(1.25)

    def test_direct_value(self):
        assert two_mode_variance_alt(1.0, 1.0) == pytest.approx(0.5)

    def test_forms_agree_on_gaussian_family(self, rng):
        """V from (n, m) equals V from (n_th, |gamma|^2) to 1e-10."""
        n_th, g = random_gaussian_states(rng, 5000)
        keep = (n_th > 0) | (g > 0)
        n = occupation(n_th[keep], g[keep])
        m_sq = anomalous_sq(n_th[keep], g[keep])
        v1 = 1.0 + (n * n - m_sq) / n
        v2 = two_mode_variance_alt(n_th[keep], g[keep])
        assert np.all(np.abs(v1 - v2) < 1e-10 * np.maximum(1.0, v2))

    def test_subpoissonian_iff_half_temperature_threshold(self, rng):
        """V < 1 exactly when |gamma|^2 > n_th(T/2)."""
        n_th, g = random_gaussian_states(rng, 5000)
        keep = (n_th > 0) | (g > 0)
        v = two_mode_variance_alt(n_th[keep], g[keep])
        threshold = half_temperature_occupation(n_th[keep])
        assert np.array_equal(v < 1.0, g[keep] > threshold)

    def test_nonnegative(self, rng):
        n_th, g = random_gaussian_states(rng, 5000)
        keep = (n_th > 0) | (g > 0)
        assert np.all(two_mode_variance_alt(n_th[keep], g[keep]) >= 0.0)


class TestNonseparability:
    def test_separable_thermal_pair(self):
        flag, d5 = nonseparability(1.0, 0.0)
        assert not flag and d5 == pytest.approx(4.0)

    def test_entangled_squeezed_pair(self):
        flag, d5 = nonseparability(1.0, cmath.sqrt(2.0))
        assert flag and d5 == pytest.approx(-2.0)

    def test_unphysical_rejected(self):
        with pytest.raises(ValueError):
            nonseparability(1.0, 2.0)

    def test_agrees_with_variance_criterion(self, rng):
        n_th, g = random_gaussian_states(rng, 3000)
        keep = (n_th > 0) | (g > 0)
        for nt, gg in zip(n_th[keep][:500], g[keep][:500]):
            n = float(occupation(nt, gg))
            m = math.sqrt(float(anomalous_sq(nt, gg)))
            flag, _ = nonseparability(n, m)
            assert flag == (float(two_mode_variance(n, m)) < 1.0)


class TestDepletion:
    @staticmethod
    def _state(n_k):
        return ModeState(lam=1.0, gam=0.0, n_k=n_k, m_k=0.0, n_th=0.0, t=0.0,
                         delta_k=0.0, kappa_k=math.nan)

    def test_vacuum_total(self):
        assert depletion([self._state(0.0)] * 4) == 0.0

    def test_weighted_sum(self):
        states = [self._state(1.0), self._state(2.0)]
        assert depletion(states, weights=[6.0, 12.0]) == pytest.approx(30.0)
        with pytest.raises(ValueError):
            depletion(states, weights=[1.0])

    def test_time_average_identity(self):
        """Numerical out-period average of n_k(t) matches the seven-term
        closed form to 1e-10."""
        n_th, v, b, omega, delta = 0.8, -0.45, 1.1, 1.3, 0.4
        period = math.pi / omega
        avg, _ = scipy.integrate.quad(
            lambda t: float(occupation(n_th, gamma_sq_closed(v, b, delta, omega, t))),
            0.0, period, epsabs=1e-13, epsrel=1e-13, limit=200,
        )
        avg /= period
        assert avg == pytest.approx(
            float(time_averaged_occupation(n_th, v, b * b)), abs=1e-10
        )

    def test_validity_monitor_thresholds(self):
        flags = depletion_validity(9.9, 100.0, max_n_k=1.0)
        assert not flags.beyond_bogoliubov and not flags.beyond_density_corr
        flags = depletion_validity(10.0, 100.0, max_n_k=1.0)
        assert flags.beyond_bogoliubov and flags.beyond_density_corr
        # the density-correlator bound is tighter by a factor max n_k
        flags = depletion_validity(5.0, 100.0, max_n_k=4.0)
        assert not flags.beyond_bogoliubov and flags.beyond_density_corr


class TestGammaLambdaProduct:
    def test_undriven_reduces_to_uv(self, rng):
        c = BogoCoefficients(cmath.exp(0.4j), 0.0)
        u, v = random_uv(rng)
        for t in (0.0, 1.0, 4.2):
            val = complex(gamma_lambda_product(c, u, v, 1.1, t))
            assert val == pytest.approx(u * v, abs=1e-12)

    def test_matches_direct_product(self, rng):
        for _ in range(300):
            c = random_coefficients(rng)
            u, v = random_uv(rng)
            omega = 10.0 ** rng.uniform(-1, 1)
            t = rng.uniform(0, 10)
            lam, gam = total_coefficients(c, u, v, omega, t)
            direct = complex(gam) * complex(lam).conjugate()
            closed = complex(gamma_lambda_product(c, u, v, omega, t))
            assert abs(direct - closed) < 1e-10 * max(1.0, abs(direct))

    def test_optimal_time_value_is_real_negative(self, rng):
        c = random_coefficients(rng)
        u, v = random_uv(rng)
        omega = 1.3
        t_m = optimal_time(c.delta_k, omega)
        val = complex(gamma_lambda_product(c, u, v, omega, t_m))
        b_sq = abs(c.beta) ** 2
        expected = gamma_lambda_at_tm(u, v, b_sq)
        assert val.imag == pytest.approx(0.0, abs=1e-9)
        assert val.real == pytest.approx(expected, abs=1e-9)
        assert expected < 0.0


class TestOptimalTime:
    def test_quarter_period(self):
        assert optimal_time(0.0, math.pi / 2.0) == pytest.approx(1.0)

    def test_already_optimal(self):
        assert optimal_time(math.pi, 1.0) == 0.0

    def test_positive_frequency_required(self):
        with pytest.raises(ValueError):
            optimal_time(0.0, 0.0)

    def test_maximizes_product_magnitude(self, rng):
        """Grid search over one oscillation confirms the maximum of
        |gamma lambda*| at t_m."""
        c = random_coefficients(rng)
        u, v = random_uv(rng)
        omega = 0.8
        t_m = optimal_time(c.delta_k, omega)
        ts = np.linspace(0.0, math.pi / omega, 4001)
        vals = np.abs(gamma_lambda_product(c, u, v, omega, ts))
        peak = abs(complex(gamma_lambda_product(c, u, v, omega, t_m)))
        assert peak >= vals.max() - 1e-9 * vals.max()


class TestDensityCorrelator:
    def test_quantum_noise_floor(self):
        """Cold, undriven, noninteracting: the correlator equals N."""
        res = density_correlator(1000.0, 0.0, 0.0)
        assert res.general == 1000.0
        assert res.at_tm == 1000.0
        assert not res.mode_csi_violated

    def test_forms_coincide_at_tm(self, rng):
        for _ in range(100):
            c = random_coefficients(rng)
            u, v = random_uv(rng)
            omega = 1.7
            n_th = 10.0 ** rng.uniform(-2, 1)
            t_m = optimal_time(c.delta_k, omega)
            lam, gam = total_coefficients(c, u, v, omega, t_m)
            n = float(occupation(n_th, abs(complex(gam)) ** 2))
            m = complex(anomalous(n_th, lam, gam))
            res = density_correlator(10**6, n, m)
            assert res.general == pytest.approx(res.at_tm, rel=1e-10, abs=1e-4)

    def test_violation_iff_nonseparable(self, rng):
        n_th, g = random_gaussian_states(rng, 2000)
        keep = (n_th > 0) | (g > 0)
        for nt, gg in zip(n_th[keep][:400], g[keep][:400]):
            n = float(occupation(nt, gg))
            m = math.sqrt(float(anomalous_sq(nt, gg)))
            res = density_correlator(100.0, n, m)
            assert res.mode_csi_violated == (res.at_tm < 100.0)
            assert res.mode_csi_violated == nonseparability(n, m).flag

    def test_variance_diagnostic(self):
        assert number_variance(3.0) == 12.0


class TestModeState:
    def test_builder_and_invariants(self, rng):
        c = random_coefficients(rng)
        u, v = random_uv(rng)
        st = mode_state(c, u, v, 1.2, 0.5, 0.9)
        assert st.n_k >= 0.0
        assert abs(st.m_k) ** 2 <= st.n_k * (st.n_k + 1.0) * (1.0 + 1e-9) + 1e-9
        assert abs(abs(st.lam) ** 2 - abs(st.gam) ** 2 - 1.0) < 1e-9 * max(
            1.0, abs(st.lam) ** 2
        )
        assert st.gamma_sq == pytest.approx(abs(st.gam) ** 2)
        assert st.kappa_k > 1.0  # kappa = sqrt((1+v^-2)(1+|b|^-2)) > 1

    def test_kappa_degenerate(self):
        st = mode_state(BogoCoefficients(1.0, 0.0), 1.0, 0.0, 1.0, 0.3, 0.0)
        assert math.isnan(st.kappa_k)
