import math

import numpy as np
import pytest
from scipy.integrate import quad

from wingtail.errors import BracketingError, ConvergenceError, DomainError
from wingtail.numerics import RngStream, Tolerance, bessel_k1, find_root, integrate, log_gamma


class TestTolerance:
    def test_defaults_valid(self):
        t = Tolerance()
        assert t.rel > 0 and t.abs >= 0 and t.max_iter >= 1

    @pytest.mark.parametrize("kwargs", [dict(rel=0.0), dict(rel=-1e-3), dict(abs=-1.0), dict(max_iter=0)])
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(DomainError):
            Tolerance(**kwargs)


class TestLogGamma:
    def test_at_one(self):
        assert log_gamma(1.0) == 0.0

    def test_factorial(self):
        assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)

    def test_half_integer(self):
        # Gamma(5/2) = 3 sqrt(pi) / 4
        assert log_gamma(2.5) == pytest.approx(math.log(3.0 * math.sqrt(math.pi) / 4.0), rel=1e-14)

    def test_recursion_on_grid(self):
        for x in np.linspace(0.5, 100.0, 200):
            assert log_gamma(x + 1.0) - log_gamma(x) == pytest.approx(math.log(x), abs=1e-12, rel=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            log_gamma(x)


class TestBesselK1:
    def test_large_argument_decay(self):
        z = 30.0
        assert bessel_k1(z) == pytest.approx(math.sqrt(math.pi / (2 * z)) * math.exp(-z), rel=0.05)

    def test_integral_definition(self):
        # K1(z) = 1/2 int_0^inf exp(-z/2 (u + 1/u)) du
        for z in [0.1, 1.0, 5.0, 50.0]:
            oracle = 0.5 * quad(lambda u: math.exp(-0.5 * z * (u + 1.0 / u)), 0, np.inf, limit=300)[0]
            assert bessel_k1(z) == pytest.approx(oracle, rel=1e-8)

    def test_small_argument_pole(self):
        z = 1e-4
        oracle = 0.5 * quad(lambda u: math.exp(-0.5 * z * (u + 1.0 / u)), 0, np.inf, limit=500)[0]
        assert bessel_k1(z) == pytest.approx(oracle, rel=1e-6)
        assert bessel_k1(z) == pytest.approx(1.0 / z, rel=1e-3)

    def test_underflow_flag(self):
        with pytest.warns(RuntimeWarning):
            assert bessel_k1(780.0) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            bessel_k1(0.0)


class TestIntegrate:
    def test_unit_interval(self):
        assert integrate(lambda y: 1.0, 0.0, 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_exponential_halfline(self):
        assert integrate(math.exp, -np.inf, 0.0) == pytest.approx(1.0, rel=1e-10)
        assert integrate(lambda t: math.exp(-t), 0.0, np.inf) == pytest.approx(1.0, rel=1e-10)

    def test_endpoint_singularity(self):
        assert integrate(lambda y: y**-0.5, 0.0, 1.0) == pytest.approx(2.0, rel=1e-9)

    def test_linearity(self):
        f = lambda t: math.exp(-t)
        g = lambda t: 1.0 / (1.0 + t * t)
        lhs = integrate(lambda t: 2.0 * f(t) + 3.0 * g(t), 0.0, np.inf)
        rhs = 2.0 * integrate(f, 0.0, np.inf) + 3.0 * integrate(g, 0.0, np.inf)
        assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_nonconvergence_carries_estimate(self):
        rough = lambda t: math.sin(1.0 / t) if t > 0 else 0.0
        with pytest.raises(ConvergenceError) as err:
            integrate(rough, 0.0, 1.0, Tolerance(rel=1e-14, abs=0.0, max_iter=50))
        assert err.value.best_estimate is not None


class TestFindRoot:
    def test_linear(self):
        assert find_root(lambda x: x - 2.0, 0.0, 5.0) == pytest.approx(2.0, abs=1e-12)

    def test_sqrt2(self):
        assert find_root(lambda x: x * x - 2.0, 1.0, 2.0) == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_no_bracket(self):
        with pytest.raises(BracketingError):
            find_root(lambda x: x * x + 1.0, -1.0, 1.0)


class TestRngStream:
    def test_reproducible(self):
        a = RngStream(987).uniform(size=32)
        b = RngStream(987).uniform(size=32)
        assert np.array_equal(a, b)

    def test_substreams_uncorrelated(self):
        n = 1_000_000
        root = RngStream(2024)
        u = root.substream(0).uniform(size=n)
        v = root.substream(1).uniform(size=n)
        r = np.corrcoef(u, v)[0, 1]
        assert abs(r) < 3.0 / math.sqrt(n)

    def test_uniform_mean(self):
        n = 1_000_000
        u = RngStream(7).uniform(size=n)
        assert abs(u.mean() - 0.5) < 3.0 * (1.0 / math.sqrt(12.0)) / math.sqrt(n)

    def test_substream_differs_from_parent(self):
        root = RngStream(55)
        child = RngStream(55).substream(3)
        assert not np.array_equal(root.uniform(size=8), child.uniform(size=8))
