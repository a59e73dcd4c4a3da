import math

import numpy as np
import pytest
from scipy.integrate import quad

from wingtail import heston, oracles
from wingtail.errors import DomainError, OracleError
from wingtail.heston import HestonParams
from wingtail.kou import KouJumpParams
from wingtail.mixed import MixedModel
from wingtail.numerics import RngStream


class TestMixedCf:
    def test_unit_at_zero(self, kou_model):
        assert oracles.mixed_cf(kou_model, 0.0) == 1.0

    def test_zero_intensity_is_heston(self, pure_model, ref_heston):
        model = MixedModel(
            heston=ref_heston,
            jumps=KouJumpParams(lam=1e-14, eta1=2.0, eta2=1.0, p=0.5, q=0.5, t=1.0),
        )
        for u in (0.5, 2.0, 7.0):
            assert oracles.mixed_cf(model, u) == pytest.approx(oracles.mixed_cf(pure_model, u), rel=1e-10)

    def test_hermitian_symmetry(self, kou_model):
        for u in (0.3, 1.5, 4.0):
            assert oracles.mixed_cf(kou_model, -u) == pytest.approx(
                oracles.mixed_cf(kou_model, u).conjugate(), rel=1e-12)

    def test_modulus_bounded_by_one(self, kou_model):
        for u in (0.1, 1.0, 10.0):
            assert abs(oracles.mixed_cf(kou_model, u)) <= 1.0 + 1e-12


class TestDensityFourier:
    def test_normalization(self, kou_model):
        # the left wing decays like exp(-(eta2)|v|) in log-price with eta2 = 1,
        # so the range must reach far down for 1e-6 mass accuracy
        total = quad(lambda v: oracles.density_fourier(kou_model, math.exp(v)) * math.exp(v),
                     -28, 14, limit=300, epsabs=1e-9, epsrel=1e-9)[0]
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_pure_heston_positive_unimodal(self, pure_model):
        ells = np.linspace(-1.5, 1.0, 21)
        vals = [oracles.density_fourier(pure_model, math.exp(v)) * math.exp(v) for v in ells]
        assert all(v > 0 for v in vals)
        peak = int(np.argmax(vals))
        assert all(vals[i] <= vals[i + 1] for i in range(peak))
        assert all(vals[i] >= vals[i + 1] for i in range(peak, len(vals) - 1))

    def test_martingale_mean(self, kou_model):
        mean = quad(lambda v: oracles.density_fourier(kou_model, math.exp(v)) * math.exp(2 * v),
                    -28, 22, limit=400, epsabs=1e-9, epsrel=1e-9)[0]
        assert mean == pytest.approx(kou_model.x0, abs=1e-6)

    def test_domain(self, kou_model):
        with pytest.raises(DomainError):
            oracles.density_fourier(kou_model, 0.0)


class TestCallFourier:
    def test_small_strike_limit(self, kou_model):
        assert oracles.call_fourier(kou_model, 1e-4) == pytest.approx(kou_model.x0 - 1e-4, abs=1e-7)

    def test_put_call_parity(self, kou_model):
        # the damping regions below the payoff poles price the put and the
        # covered call; the corrected values must agree with the call
        for K in (0.7, 1.0, 1.4):
            call = oracles.call_fourier(kou_model, K, damping=0.4)
            from_covered = oracles.call_fourier(kou_model, K, damping=-0.5)
            from_put = oracles.call_fourier(kou_model, K, damping=-1.6)
            assert call == pytest.approx(from_covered, abs=1e-8)
            assert call == pytest.approx(from_put, abs=1e-8)

    def test_matches_monte_carlo(self, kou_model, kou_sample):
        for k_rel in (0.8, 1.0, 1.2):
            K = k_rel * kou_model.x0
            payoff = np.maximum(kou_sample - K, 0.0)
            se = payoff.std() / math.sqrt(payoff.size)
            assert abs(oracles.call_fourier(kou_model, K) - payoff.mean()) <= 3.0 * se

    def test_convex_decreasing_in_strike(self, kou_model):
        ks = np.linspace(0.5, 2.0, 16)
        prices = np.array([oracles.call_fourier(kou_model, float(k)) for k in ks])
        assert np.all(np.diff(prices) < 0)
        assert np.all(np.diff(prices, 2) > -1e-9)

    def test_infeasible_damping(self, kou_model):
        with pytest.raises(OracleError):
            oracles.call_fourier(kou_model, 1.0, damping=5.0)  # above eta1 - 1


class TestSimulatePaths:
    def test_deterministic_in_seed(self, kou_model):
        a = oracles.simulate_paths(kou_model, 40_000, 60, RngStream(9))
        b = oracles.simulate_paths(kou_model, 40_000, 60, RngStream(9))
        assert np.array_equal(a, b)
        res_a, res_b = oracles.summarize(a, 9), oracles.summarize(b, 9)
        assert res_a == res_b

    def test_seed_changes_sample(self, kou_model):
        a = oracles.simulate_paths(kou_model, 10_000, 60, RngStream(1))
        b = oracles.simulate_paths(kou_model, 10_000, 60, RngStream(2))
        assert not np.array_equal(a, b)

    def test_zero_intensity_mean(self, ref_heston):
        p = HestonParams(mu=0.05, a=1.0, b=2.0, c=0.5, rho=-0.3, x0=1.0, y0=0.04, t=1.0)
        model = MixedModel(heston=p, jumps=None)
        sample = oracles.simulate_paths(model, 200_000, 120, RngStream(3))
        se = sample.std() / math.sqrt(sample.size)
        assert abs(sample.mean() - p.forward) <= 3.0 * se

    def test_moment_matches_closed_form(self, kou_model, kou_sample):
        from wingtail import kou as kou_mod

        for s in (0.5, 1.5):
            pows = kou_sample**s
            se = pows.std() / math.sqrt(pows.size)
            closed = heston.mgf(kou_model.heston, s) * kou_mod.jump_mgf(kou_model.jumps, s)
            assert abs(pows.mean() - closed) <= 3.0 * se

    def test_step_floor_enforced(self, kou_model):
        with pytest.raises(DomainError):
            oracles.simulate_paths(kou_model, 1000, 10, RngStream(1))

    def test_mc_result_invariants(self):
        with pytest.raises(DomainError):
            oracles.MCResult(estimate=1.0, std_error=-0.1, n_paths=10, seed=0)


class TestRiccatiOracle:
    def test_no_explosion_cases(self, ref_heston):
        assert oracles.riccati_explosion_time(ref_heston, 0.5, t_cap=20.0) == math.inf
        assert oracles.riccati_explosion_time(ref_heston, 3.0, t_cap=20.0) == math.inf

    def test_matches_closed_form(self, ref_heston):
        for s in (7.0, 10.0, -4.0):
            assert oracles.riccati_explosion_time(ref_heston, s, t_cap=30.0) == pytest.approx(
                heston.explosion_time(ref_heston, s), rel=1e-9)

    def test_log_mgf_route(self, ref_heston):
        assert oracles.riccati_log_mgf(ref_heston, 2.0) == pytest.approx(
            math.log(heston.mgf(ref_heston, 2.0)), abs=1e-10)
