import math

import numpy as np
import pytest
from scipy.integrate import quad

from wingtail import kou
from wingtail.errors import DomainError, MomentExplosionError, RegimeGuardError
from wingtail.kou import KouJumpParams
from wingtail.numerics import RngStream


def variant(**kwargs):
    base = dict(lam=1.0, eta1=2.0, eta2=1.0, p=0.5, q=0.5, t=1.0)
    base.update(kwargs)
    return KouJumpParams(**base)


class TestParams:
    @pytest.mark.parametrize("kwargs", [
        dict(eta1=1.0), dict(eta1=0.8), dict(eta2=0.0), dict(lam=0.0),
        dict(p=0.0, q=1.0), dict(p=0.6, q=0.5), dict(t=0.0),
    ])
    def test_invariants(self, kwargs):
        with pytest.raises(DomainError):
            variant(**kwargs)


class TestWeights:
    def test_all_up(self, ref_kou):
        assert kou.pnk(1, 1, ref_kou) == pytest.approx(0.5, rel=1e-14)
        assert kou.pnk(4, 4, ref_kou) == pytest.approx(0.5**4, rel=1e-13)
        assert kou.qnk(3, 3, ref_kou) == pytest.approx(0.5**3, rel=1e-13)

    def test_two_jump_closed_form(self, ref_kou):
        # coefficient of e^(-eta1 y) in the two-fold convolution of the
        # two-sided exponential law: 2 p q eta2 / (eta1 + eta2)
        expected = 2.0 * 0.5 * 0.5 * ref_kou.eta2 / (ref_kou.eta1 + ref_kou.eta2)
        assert kou.pnk(2, 1, ref_kou) == pytest.approx(expected, rel=1e-13)

    def test_domain(self, ref_kou):
        with pytest.raises(DomainError):
            kou.pnk(2, 3, ref_kou)
        with pytest.raises(DomainError):
            kou.pnk(2, 0, ref_kou)


class TestCoefficients:
    def test_hat_zero_closed_form(self, ref_kou):
        tab = kou.coefficients(ref_kou, 4)
        expected = math.exp(
            ref_kou.eta2 * ref_kou.lam * ref_kou.t * ref_kou.q / (ref_kou.eta1 + ref_kou.eta2)
            - ref_kou.lam * ref_kou.t
        ) * ref_kou.eta1 * ref_kou.lam * ref_kou.t * ref_kou.p
        assert tab.a_hat[0] == pytest.approx(expected, rel=1e-14)

    def test_golden_a0(self, ref_kou):
        # frozen after cross-checking against direct summation and the
        # FFT-convolution oracle of the jump-sum density
        tab = kou.coefficients(ref_kou, 2)
        assert tab.a[0] == pytest.approx(0.44826445353229355, rel=1e-12)

    def test_down_side_vanishes_with_q(self):
        params = variant(p=1.0 - 1e-9, q=1e-9)
        tab = kou.coefficients(params, 6)
        assert np.all(tab.b[1:] < 1e-8 * tab.a[1:])
        assert tab.b[0] == pytest.approx(params.eta2 * params.lam * params.t * params.q
                                         * math.exp(params._down_exp_shift()), rel=1e-6)

    def test_positivity_and_gap(self, ref_kou):
        tab = kou.coefficients(ref_kou, 60)
        assert np.all(tab.a > 0) and np.all(tab.b > 0)
        assert np.all(tab.a - tab.a_hat > 0)
        assert np.all(tab.b - tab.b_hat > 0)

    def test_ratio_decay(self, ref_kou):
        # k * a_k / a_{k-1} decays like 1/(k+1)
        tab = kou.coefficients(ref_kou, 60)
        ks = np.arange(2, 61)
        vals = ks * tab.a[2:] / tab.a[1:-1] * (ks + 1)
        assert np.max(vals) < 5.0

    def test_fft_convolution_oracle(self, ref_kou):
        # independent construction of the jump-sum density: Poisson mixture of
        # n-fold convolutions on a grid via FFT, against the series form
        L, N = 60.0, 1 << 17
        dx = 2 * L / N
        grid = (np.arange(N) - N // 2) * dx
        g = np.where(grid >= 0, 0.5 * 2.0 * np.exp(-2.0 * grid), 0.5 * 1.0 * np.exp(grid))
        ghat = np.fft.rfft(np.fft.ifftshift(g)) * dx
        dens_hat = np.zeros_like(ghat)
        conv_hat = np.ones_like(ghat)
        for n in range(1, 50):
            conv_hat = conv_hat * ghat
            dens_hat = dens_hat + math.exp(-1.0 + n * 0.0 - math.lgamma(n + 1)) * conv_hat
        dens = np.fft.fftshift(np.fft.irfft(dens_hat)) / dx
        for u in (0.3, 0.7, 1.5, 3.0, -0.5, -2.0):
            idx = int(round(u / dx)) + N // 2
            series = (kou.g1(ref_kou, u) * math.exp(-2.0 * u) if u > 0
                      else kou.g2(ref_kou, -u) * math.exp(u))
            assert dens[idx] == pytest.approx(series, rel=2e-3)

    def test_table_constants(self, ref_kou):
        assert ref_kou.b1_jump == pytest.approx(1.0)
        assert ref_kou.b2_jump == pytest.approx(0.5)
        assert ref_kou.c1_jump == pytest.approx(1.0 / (2 * math.pi) * math.exp(0.5 / 3.0 - 1.0))


class TestSeries:
    def test_value_at_zero_is_a0(self, ref_kou):
        tab = kou.coefficients(ref_kou, 2)
        assert kou.g1(ref_kou, 0.0) == pytest.approx(float(tab.a[0]), rel=1e-13)

    def test_strictly_increasing(self, ref_kou):
        us = np.linspace(0.0, 30.0, 16)
        vals = [kou.g1(ref_kou, float(u)) for u in us]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_matches_fractional_integral_envelope(self, ref_kou):
        s, r = kou.watson_params(ref_kou)
        u = 50.0
        g1v = kou.g1(ref_kou, u)
        f3 = kou.frac_integral(-1.5, s, r, u)
        f5 = kou.frac_integral(-2.5, s, r, u)
        assert abs(g1v - f3) <= 3.0 * f5

    def test_huge_argument_log_form(self, ref_kou):
        # series evaluation stays finite in log space at u = 1e4
        val = kou.g1_log(ref_kou, 1e4)
        assert math.isfinite(val) and val > 100.0


class TestHDensity:
    def test_right_limit_at_one(self, ref_kou):
        tab = kou.coefficients(ref_kou, 2)
        assert kou.h_density(ref_kou, 1.0) == pytest.approx(float(tab.a[0]), rel=1e-13)

    def test_normalization(self, ref_kou):
        up = quad(lambda u: kou.g1(ref_kou, u) * math.exp(-ref_kou.eta1 * u), 0, 200, limit=300)[0]
        dn = quad(lambda v: kou.g2(ref_kou, v) * math.exp(-ref_kou.eta2 * v), 0, 200, limit=300)[0]
        assert ref_kou.atom_mass + up + dn == pytest.approx(1.0, abs=1e-8)

    def test_decomposition_record(self, ref_kou):
        dec = kou.decomposition(ref_kou)
        assert dec.atom_mass == pytest.approx(math.exp(-1.0))
        assert dec.density(2.0) == pytest.approx(kou.h_density(ref_kou, 2.0))

    def test_power_factor_slowly_varying(self):
        # H(t,x) x^(eta1+1) moves slowly: doubling x changes it by o(1) factors
        params = variant(lam=2.0, t=1.0)
        x = math.exp(40.0)
        lhs = kou.h_log_density(params, 2 * x) + (params.eta1 + 1) * math.log(2 * x)
        rhs = kou.h_log_density(params, x) + (params.eta1 + 1) * math.log(x)
        assert abs(lhs - rhs) < 0.2

    def test_domain(self, ref_kou):
        with pytest.raises(DomainError):
            kou.h_density(ref_kou, 0.0)


class TestFracIntegral:
    def test_small_argument_limit(self, ref_kou):
        s, r = kou.watson_params(ref_kou)
        val = kou.frac_integral(-1.5, s, r, 1e-8)
        assert val == pytest.approx(s / math.gamma(1.5) * (2.0 / 3.0), rel=1e-4)

    def test_watson_large_argument(self, ref_kou):
        s, r = kou.watson_params(ref_kou)
        u = 400.0
        watson = (s / math.gamma(1.5) * math.exp(r * math.sqrt(u))
                  * math.sqrt(2.0) * math.gamma(1.5) * r**-1.5 * u**-0.75)
        assert kou.frac_integral(-1.5, s, r, u) == pytest.approx(watson, rel=0.06)

    def test_envelope_constant_finite(self, ref_kou):
        s, r = kou.watson_params(ref_kou)
        cs = []
        for u in np.geomspace(1.0, 400.0, 12):
            diff = abs(kou.g1(ref_kou, float(u)) - kou.frac_integral(-1.5, s, r, float(u)))
            cs.append(diff / kou.frac_integral(-2.5, s, r, float(u)))
        assert max(cs) < 5.0

    def test_supported_orders_only(self, ref_kou):
        s, r = kou.watson_params(ref_kou)
        with pytest.raises(DomainError):
            kou.frac_integral(-0.5, s, r, 1.0)


class TestWingAsymptotes:
    def test_ratio_scaled_bounded(self, ref_kou):
        vals = []
        for ell in (10.0, 100.0, 1e3, 1e4):
            ratio = math.exp(kou.g1_log(ref_kou, ell) - kou.h1_asymptote_log(ref_kou, math.exp(ell))
                             if ell < 700 else
                             kou.g1_log(ref_kou, ell) - _h1_log(ref_kou, ell))
            vals.append(abs(ratio - 1.0) * math.sqrt(ell))
        assert max(vals) < 1.0
        assert vals[-1] <= vals[0]

    def test_prefactor_in_pure_up_limit(self):
        # q -> 0: prefactor tends to (1/2 sqrt(pi)) (eta1 lam t)^(1/4) e^(-lam t)
        params = variant(p=1.0 - 1e-10, q=1e-10)
        rec = kou.h_tail_asymptote(params)
        expected = (0.5 / math.sqrt(math.pi)) * (params.eta1 * params.lam * params.t) ** 0.25 \
            * math.exp(-params.lam * params.t)
        assert rec.r1 == pytest.approx(expected, rel=1e-6)

    def test_up_down_symmetry(self):
        params = variant(p=0.3, q=0.7, eta1=3.0, eta2=2.0)
        mirrored = variant(p=0.7, q=0.3, eta1=2.0, eta2=3.0)
        up = kou.h1_asymptote(params, math.exp(9.0))
        down = kou.h2_asymptote(mirrored, math.exp(-9.0))
        assert up == pytest.approx(down, rel=1e-12)

    def test_regime_guard(self, ref_kou):
        with pytest.raises(RegimeGuardError):
            kou.h1_asymptote(ref_kou, math.exp(2.0))

    def test_records_expose_density_exponents(self, ref_kou):
        rec = kou.h_tail_asymptote(ref_kou)
        assert rec.r3 == ref_kou.eta1 + 1.0 and rec.r4 == -0.75
        zrec = kou.h_zero_asymptote(ref_kou)
        assert zrec.r3 == ref_kou.eta2 - 1.0


def _h1_log(params, ell):
    b1 = params.b1_jump
    return (math.log(0.5 / math.sqrt(math.pi)) + 0.25 * math.log(b1) + params._up_exp_shift()
            - 0.75 * math.log(ell) + 2.0 * math.sqrt(b1 * ell))


class TestJumpMgf:
    def test_unit_at_zero(self, ref_kou):
        assert kou.jump_mgf(ref_kou, 0.0) == 1.0

    def test_zero_intensity_limit(self):
        params = variant(lam=1e-14)
        for s in (-0.5, 0.5, 1.5):
            assert kou.jump_mgf(params, s) == pytest.approx(1.0, abs=1e-12)

    def test_martingale_identity(self, ref_kou):
        mu = kou.risk_neutral_drift(ref_kou)
        assert math.exp(mu * ref_kou.t) * kou.jump_mgf(ref_kou, 1.0) == pytest.approx(1.0, rel=1e-14)

    def test_atom_subtraction_matches_quadrature(self, ref_kou):
        for s in (0.5, -0.5, 1.5):
            closed = kou.h_moment(ref_kou, s)
            up = quad(lambda u: kou.g1(ref_kou, u) * math.exp((s - ref_kou.eta1) * u), 0, 300, limit=300)[0]
            dn = quad(lambda v: kou.g2(ref_kou, v) * math.exp(-(ref_kou.eta2 + s) * v), 0, 300, limit=300)[0]
            assert closed == pytest.approx(up + dn, abs=1e-10)

    def test_pole_rejection(self, ref_kou):
        with pytest.raises(MomentExplosionError):
            kou.jump_mgf(ref_kou, ref_kou.eta1)
        with pytest.raises(MomentExplosionError):
            kou.jump_mgf(ref_kou, -ref_kou.eta2)


class TestCoefficientIdentities:
    def test_cnalpha_normalized_limit(self):
        # Gamma(n+1)/Gamma(n+|alpha|+1) * (n+1)^|alpha| -> 1
        ns = np.arange(1, 200)
        for alpha in (-1.5, -2.5):
            c = np.exp([math.lgamma(n + 1) - math.lgamma(n - alpha + 1) for n in ns])
            scaled = c * (ns + 1.0) ** (-alpha)
            assert abs(scaled[-1] - 1.0) < 0.01
            gaps = np.abs((ns + 1.0) ** alpha - c)
            c_next = np.exp([math.lgamma(n + 1) - math.lgamma(n - alpha + 2) for n in ns])
            # fitted constant: ~0.61 for order -3/2, ~4.8 for order -5/2
            assert np.all(gaps <= 8.0 * c_next)

    def test_combined_cosh_coefficient_bound(self, ref_kou):
        # |a_k - c_{k,-3/2} d~_k| <= const * c_{k,-5/2} d~_k
        s, r = kou.watson_params(ref_kou)
        tab = kou.coefficients(ref_kou, 60)
        ks = np.arange(61)
        log_dt = math.log(s) + 2 * ks * math.log(r) - np.array(
            [math.lgamma(2 * k + 1) for k in ks])
        c32 = np.exp([math.lgamma(k + 1) - math.lgamma(k + 2.5) for k in ks])
        c52 = np.exp([math.lgamma(k + 1) - math.lgamma(k + 3.5) for k in ks])
        lhs = np.abs(tab.a - c32 * np.exp(log_dt))
        rhs = c52 * np.exp(log_dt)
        assert np.all(lhs <= 8.0 * rhs)


class TestSampling:
    def test_atom_probability(self):
        params = variant(lam=0.05)
        stream = RngStream(5)
        draws = kou.sample_jump_factors(params, stream, 400_000)
        p_one = np.mean(draws == 1.0)
        se = math.sqrt(p_one * (1 - p_one) / draws.size)
        assert abs(p_one - math.exp(-0.05)) <= 3.0 * se + 1e-12

    def test_mean_matches_mgf(self, ref_kou):
        draws = kou.sample_jump_factors(ref_kou, RngStream(6), 1_000_000)
        se = draws.std() / math.sqrt(draws.size)
        assert abs(draws.mean() - kou.jump_mgf(ref_kou, 1.0)) <= 3.0 * se

    def test_single_draw(self, ref_kou):
        val = kou.sample_jump_factor(ref_kou, RngStream(7))
        assert val > 0
