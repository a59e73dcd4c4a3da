import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import chi2

from wingtail import nig
from wingtail.errors import DomainError, MomentExplosionError, NoArbitrageError, RegimeGuardError
from wingtail.nig import NIGParams
from wingtail.numerics import RngStream

REF = NIGParams(alpha=2.0, delta=1.0, t=1.0)


class TestParams:
    @pytest.mark.parametrize("kwargs", [dict(alpha=0.0), dict(delta=0.0), dict(t=0.0)])
    def test_invariants(self, kwargs):
        base = dict(alpha=2.0, delta=1.0, t=1.0)
        base.update(kwargs)
        with pytest.raises(DomainError):
            NIGParams(**base)


class TestDensity:
    def test_symmetric(self):
        for y in (0.3, 1.7, 6.0):
            assert nig.nig_log_density(REF, y) == nig.nig_log_density(REF, -y)

    def test_normalized(self):
        total = quad(lambda y: nig.nig_log_density(REF, y), -80, 80, limit=400)[0]
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_unimodal_at_zero(self):
        ys = np.linspace(0.0, 5.0, 40)
        vals = [nig.nig_log_density(REF, float(y)) for y in ys]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_far_tail_underflows_to_zero_with_flag(self):
        with pytest.warns(RuntimeWarning):
            assert nig.nig_log_density(REF, 500.0) == 0.0

    def test_price_density_change_of_variables(self):
        for x in (0.5, 1.0, 3.0):
            assert nig.nig_price_density(REF, x) * x == pytest.approx(
                nig.nig_log_density(REF, math.log(x)), rel=1e-13)

    def test_price_density_normalized(self):
        total = quad(lambda v: nig.nig_price_density(REF, math.exp(v)) * math.exp(v),
                     -60, 60, limit=400)[0]
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_price_density_reflection_symmetry(self):
        # density of e^Y at x equals x^-2 times the density at 1/x (Y symmetric)
        for x in (0.4, 2.5):
            assert nig.nig_price_density(REF, x) == pytest.approx(
                nig.nig_price_density(REF, 1.0 / x) * x**-2.0, rel=1e-12)


class TestTailAsymptote:
    def test_record_fields(self):
        rec = nig.nig_tail_record(REF)
        assert rec.r2 == 0.0
        assert rec.r3 == REF.alpha + 1.0
        assert rec.r4 == -1.5
        assert rec.r1 == pytest.approx(REF.k_factor * math.sqrt(math.pi / (2 * REF.alpha)), rel=1e-14)

    def test_ratio_converges_with_log_rate(self):
        rec = nig.nig_tail_record(REF)
        vals = []
        for ell in (8.0, 16.0, 40.0):
            r = math.exp(nig.nig_price_log_density(REF, math.exp(ell)) - rec.log_value_logx(ell))
            vals.append(abs(r - 1.0) * ell)
        assert max(vals) < 2.0
        assert vals[-1] <= vals[0]

    def test_small_wing_by_symmetry(self):
        zrec = nig.nig_zero_record(REF)
        for ell in (8.0, 20.0):
            r = math.exp(nig.nig_price_log_density(REF, math.exp(-ell)) - zrec.log_value_logx(ell))
            assert r == pytest.approx(1.0, abs=0.2)

    def test_regime_guard(self):
        with pytest.raises(RegimeGuardError):
            nig.nig_tail_asymptote(REF, math.exp(2.0))
        assert nig.nig_tail_asymptote(REF, math.exp(5.0)) == nig.nig_tail_record(REF)


class TestNoArbDrift:
    def test_boundary_alpha(self):
        assert nig.nig_no_arb_drift(NIGParams(alpha=1.0, delta=0.7, t=1.0)) == pytest.approx(-0.7)

    def test_exact_rational_point(self):
        assert nig.nig_no_arb_drift(NIGParams(alpha=1.25, delta=1.0, t=1.0)) == pytest.approx(-0.5)

    def test_below_one_rejected(self):
        with pytest.raises(NoArbitrageError):
            nig.nig_no_arb_drift(NIGParams(alpha=0.9, delta=1.0, t=1.0))


class TestMgf:
    def test_at_zero(self):
        assert nig.nig_mgf(REF, 0.0) == 1.0

    def test_boundary_limit(self):
        val = nig.nig_mgf(REF, REF.alpha - 1e-9)
        assert val == pytest.approx(math.exp(REF.delta * REF.t * REF.alpha), rel=1e-4)

    def test_exact_value(self):
        p = NIGParams(alpha=1.25, delta=1.0, t=1.0)
        assert nig.nig_mgf(p, 1.0) == pytest.approx(math.exp(0.5), rel=1e-14)

    def test_even_and_log_convex(self):
        ss = np.linspace(-1.8, 1.8, 19)
        vals = np.array([math.log(nig.nig_mgf(REF, float(s))) for s in ss])
        assert np.allclose(vals, vals[::-1], rtol=1e-13)
        assert np.all(np.diff(vals, 2) >= -1e-10)

    def test_out_of_domain(self):
        with pytest.raises(MomentExplosionError):
            nig.nig_mgf(REF, REF.alpha)
        with pytest.raises(MomentExplosionError):
            nig.nig_mgf(REF, -2.5)


@pytest.fixture(scope="module")
def draws():
    return nig.sample_nigs(REF, RngStream(123), 400_000)


class TestSampling:

    def test_mean_zero(self, draws):
        se = draws.std() / math.sqrt(draws.size)
        assert abs(draws.mean()) <= 3.0 * se

    def test_exponential_moment(self, draws):
        vals = np.exp(draws)
        se = vals.std() / math.sqrt(vals.size)
        assert abs(vals.mean() - nig.nig_mgf(REF, 1.0)) <= 3.0 * se

    def test_histogram_chi2(self, draws):
        edges = np.linspace(-4.0, 4.0, 41)
        counts, _ = np.histogram(draws, edges)
        probs = np.array([quad(lambda y: nig.nig_log_density(REF, y), a, b)[0]
                          for a, b in zip(edges[:-1], edges[1:])])
        expected = probs * draws.size
        mask = expected > 10
        stat = float(((counts[mask] - expected[mask]) ** 2 / expected[mask]).sum())
        p_value = chi2.sf(stat, int(mask.sum() - 1))
        assert p_value > 0.001

    def test_single_draw(self):
        assert math.isfinite(nig.sample_nig(REF, RngStream(3)))
