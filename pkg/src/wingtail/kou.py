"""Double-exponential compound-Poisson jump factor.

The law of the jump factor at horizon t is an atom of mass e^(-lam*t) at 1
plus an absolutely continuous part
    H(t, x) = G1(t, log x) x^(-eta1-1)   for x > 1,
    H(t, x) = G2(t, -log x) x^(eta2-1)   for 0 < x < 1,
where G1 and G2 are entire power series whose coefficients a_k, b_k come from
mixing Poisson weights with combinatorial up/down jump decompositions. This
module computes the exact coefficients, their closed-form approximations, the
fractional-integral comparison functions, and the wing asymptotes of H.

All coefficient arithmetic runs in log space: the raw coefficients decay like
1/(k! (k+1)!) and the series are needed at arguments u = log x up to 1e4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import ConvergenceError, DomainError, MomentExplosionError, RegimeGuardError
from .mellin import AT_INFINITY, AT_ZERO, ERROR_INV_SQRT_LOG, TailAsymptote
from .numerics import DEFAULT_TOL, Tolerance, integrate, log_gamma

__all__ = [
    "KouJumpParams",
    "JumpLawDecomposition",
    "CoefficientTable",
    "pnk",
    "qnk",
    "coefficients",
    "g1",
    "g2",
    "g1_log",
    "g2_log",
    "h_density",
    "h_log_density",
    "decomposition",
    "frac_integral",
    "h1_asymptote",
    "h2_asymptote",
    "h_tail_asymptote",
    "h_zero_asymptote",
    "jump_mgf",
    "log_jump_mgf",
    "h_moment",
    "risk_neutral_drift",
    "sample_jump_factor",
    "sample_jump_factors",
]


@dataclass(frozen=True)
class KouJumpParams:
    """Jump intensity, two-sided log-jump rates, mixing weights, horizon.

    eta1 > 1 is required: it is exactly the condition for the jump factor to
    have finite expectation.
    """

    lam: float
    eta1: float
    eta2: float
    p: float
    q: float
    t: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"need lam > 0, got {self.lam}")
        if not self.eta1 > 1:
            raise DomainError(f"need eta1 > 1 (finite mean of the jump factor), got {self.eta1}")
        if not self.eta2 > 0:
            raise DomainError(f"need eta2 > 0, got {self.eta2}")
        if not (self.p > 0 and self.q > 0):
            raise DomainError(f"need p, q > 0, got p={self.p}, q={self.q}")
        if abs(self.p + self.q - 1.0) > 1e-12:
            raise DomainError(f"need p + q = 1, got {self.p + self.q}")
        if not self.t > 0:
            raise DomainError(f"need t > 0, got {self.t}")

    # grouped constants of the closed-form coefficient approximations;
    # named *_jump to keep them apart from the diffusion-side B1
    @property
    def b1_jump(self) -> float:
        return self.eta1 * self.lam * self.t * self.p

    @property
    def b2_jump(self) -> float:
        return self.eta2 * self.lam * self.t * self.q

    @property
    def c1_jump(self) -> float:
        return self.b1_jump / (2.0 * math.pi) * math.exp(self._up_exp_shift())

    @property
    def c2_jump(self) -> float:
        return self.b2_jump / (2.0 * math.pi) * math.exp(self._down_exp_shift())

    def _up_exp_shift(self) -> float:
        # exponential prefactor of the upward-side coefficients
        return self.eta2 * self.lam * self.t * self.q / (self.eta1 + self.eta2) - self.lam * self.t

    def _down_exp_shift(self) -> float:
        return self.eta1 * self.lam * self.t * self.p / (self.eta1 + self.eta2) - self.lam * self.t

    @property
    def atom_mass(self) -> float:
        return math.exp(-self.lam * self.t)


@dataclass(frozen=True)
class JumpLawDecomposition:
    """Atom-plus-density decomposition of the jump-factor law."""

    atom_mass: float
    density: object  # callable x -> H(t, x)


@dataclass(frozen=True)
class CoefficientTable:
    """Exact series coefficients with their closed-form approximations.

    Arrays are indexed by k. `log_a`/`log_b` duplicate a and b in log space for
    overflow-safe series evaluation at large arguments. `tail_bound` is a
    geometric bound on the truncated part of the slowest n-series encountered.
    """

    a: np.ndarray
    b: np.ndarray
    a_hat: np.ndarray
    b_hat: np.ndarray
    d: np.ndarray
    l: np.ndarray
    log_a: np.ndarray
    log_b: np.ndarray
    truncation_k: int
    tail_bound: float


_LGAMMA_CACHE = gammaln(np.arange(1024).astype(float) + 1.0)  # log(n!) at index n


def _log_factorial(n: int) -> np.ndarray:
    global _LGAMMA_CACHE
    if n >= len(_LGAMMA_CACHE):
        _LGAMMA_CACHE = gammaln(np.arange(2 * n + 2).astype(float) + 1.0)
    return _LGAMMA_CACHE


def _log_pnk(n: int, k: int, eta_num: float, eta_den: float, p: float, q: float) -> float:
    """log P_{n,k} with the (eta_num, eta_den, p, q) orientation of the sum.

    The mirrored Q_{n,k} is the same sum with (eta1, p) and (eta2, q) swapped.
    """
    if k < 1 or k > n:
        raise DomainError(f"P_{{n,k}} needs 1 <= k <= n, got n={n}, k={k}")
    if k == n:
        return n * math.log(p)
    lf = _log_factorial(n + 2)
    i = np.arange(k, n)
    log_c1 = lf[n - k - 1] - lf[i - k] - lf[n - 1 - i]
    log_c2 = lf[n] - lf[i] - lf[n - i]
    log_ratio_up = math.log(eta_num / (eta_num + eta_den))
    log_ratio_dn = math.log(eta_den / (eta_num + eta_den))
    terms = (
        log_c1
        + log_c2
        + (i - k) * log_ratio_up
        + (n - i) * log_ratio_dn
        + i * math.log(p)
        + (n - i) * math.log(q)
    )
    return float(logsumexp(terms))


def pnk(n: int, k: int, params: KouJumpParams) -> float:
    """Probability weight P_{n,k} of k surviving upward exponential phases."""
    return math.exp(_log_pnk(n, k, params.eta1, params.eta2, params.p, params.q))


def qnk(n: int, k: int, params: KouJumpParams) -> float:
    """Downward-side weight Q_{n,k}; mirror of P under (p, eta1) <-> (q, eta2)."""
    return math.exp(_log_pnk(n, k, params.eta2, params.eta1, params.q, params.p))


def _log_pnk_block(n_lo: int, n_hi: int, K: int, eta_num: float, eta_den: float, p: float, q: float) -> np.ndarray:
    """log P_{n,K} for all n in [n_lo, n_hi], vectorized over the inner i-sum."""
    lf = _log_factorial(n_hi + 2)
    ns = np.arange(n_lo, n_hi + 1)
    width = n_hi - K  # largest i-offset + 1
    offs = np.arange(max(width, 1))
    nn = ns[:, None]
    oo = offs[None, :]
    ii = K + oo
    valid = oo <= nn - 1 - K
    log_ratio_up = math.log(eta_num / (eta_num + eta_den))
    log_ratio_dn = math.log(eta_den / (eta_num + eta_den))
    with np.errstate(invalid="ignore"):
        terms = np.where(
            valid,
            (lf[np.maximum(nn - K - 1, 0)] - lf[oo] - lf[np.maximum(nn - 1 - K - oo, 0)])
            + (lf[nn] - lf[ii] - lf[np.maximum(nn - ii, 0)])
            + oo * log_ratio_up
            + (nn - ii) * log_ratio_dn
            + ii * math.log(p)
            + (nn - ii) * math.log(q),
            -np.inf,
        )
    return logsumexp(terms, axis=1)


def _log_coefficient(params: KouJumpParams, k: int, tol: Tolerance, up: bool) -> tuple[float, float]:
    """log a_k (up=True) or log b_k, plus a geometric bound on the cut n-tail.

    The Poisson-weighted n-series is summed in vectorized blocks until the
    last term is below tol.rel of the partial sum with the terms decreasing
    for at least three consecutive n (the weights decay factorially, so the
    rule is reached quickly).
    """
    lam_t = params.lam * params.t
    if up:
        eta_num, eta_den, p, q = params.eta1, params.eta2, params.p, params.q
    else:
        eta_num, eta_den, p, q = params.eta2, params.eta1, params.q, params.p
    K = k + 1
    log_front = K * math.log(eta_num) - _log_factorial(k + 2)[k]

    size = 24
    while size <= 768:
        n_hi = K + size
        lf = _log_factorial(n_hi + 2)
        ns = np.arange(K, n_hi + 1)
        log_pi = -lam_t + ns * math.log(lam_t) - lf[ns]
        log_p_terms = np.empty(ns.size)
        log_p_terms[0] = K * math.log(p)  # n = K: pure all-up weight p^n
        log_p_terms[1:] = _log_pnk_block(K + 1, n_hi, K, eta_num, eta_den, p, q)
        log_terms = log_pi + log_p_terms
        total = float(logsumexp(log_terms))
        decreasing = np.all(np.diff(log_terms[-4:]) < 0.0)
        if decreasing and log_terms[-1] < total + math.log(tol.rel):
            ratio = math.exp(log_terms[-1] - log_terms[-2])
            tail = math.exp(log_terms[-1] - total) * ratio / max(1.0 - ratio, 0.5)
            return float(log_front + total), tail
        size *= 2
    raise ConvergenceError(f"coefficient n-series did not settle for k={k}")


def coefficients(params: KouJumpParams, k_max: int, tol: Tolerance = DEFAULT_TOL) -> CoefficientTable:
    """Exact a_k, b_k for k <= k_max plus hat/d/l approximation sequences."""
    if k_max < 0:
        raise DomainError(f"k_max must be >= 0, got {k_max}")
    ks = np.arange(k_max + 1)
    lf = _log_factorial(k_max + 4)
    log_a = np.empty(k_max + 1)
    log_b = np.empty(k_max + 1)
    worst_tail = 0.0
    for k in ks:
        log_a[k], ta = _log_coefficient(params, int(k), tol, up=True)
        log_b[k], tb = _log_coefficient(params, int(k), tol, up=False)
        worst_tail = max(worst_tail, ta, tb)

    log_a_hat = params._up_exp_shift() + (ks + 1) * math.log(params.b1_jump) - lf[ks] - lf[ks + 1]
    log_b_hat = params._down_exp_shift() + (ks + 1) * math.log(params.b2_jump) - lf[ks] - lf[ks + 1]

    def closed_form_seq(c_const, b_const):
        out = np.empty(k_max + 1)
        out[0] = math.log(c_const)
        if k_max >= 1:
            kk = ks[1:].astype(float)
            out[1:] = math.log(c_const) + kk * math.log(b_const) + 2.0 * kk - (2.0 * kk + 2.0) * np.log(kk)
        return out

    log_d = closed_form_seq(params.c1_jump, params.b1_jump)
    log_l = closed_form_seq(params.c2_jump, params.b2_jump)

    return CoefficientTable(
        a=np.exp(log_a),
        b=np.exp(log_b),
        a_hat=np.exp(log_a_hat),
        b_hat=np.exp(log_b_hat),
        d=np.exp(log_d),
        l=np.exp(log_l),
        log_a=log_a,
        log_b=log_b,
        truncation_k=k_max,
        tail_bound=worst_tail,
    )


_TABLE_CACHE: dict[KouJumpParams, CoefficientTable] = {}


def _table(params: KouJumpParams, k_min: int, tol: Tolerance = DEFAULT_TOL) -> CoefficientTable:
    cached = _TABLE_CACHE.get(params)
    if cached is None or cached.truncation_k < k_min:
        cached = coefficients(params, max(k_min, 64), tol)
        _TABLE_CACHE[params] = cached
    return cached


def _series_k_budget(b_const: float, u: float) -> int:
    # the terms of sum_k c B^k e^{2k} k^{-2k-2} u^k peak near k ~ sqrt(B u)
    return int(2.5 * math.sqrt(max(b_const * u, 1.0))) + 48


def _log_series(log_coeffs: np.ndarray, u: float, tol: Tolerance) -> float:
    if u == 0.0:
        return float(log_coeffs[0])
    ks = np.arange(len(log_coeffs))
    log_terms = log_coeffs + ks * math.log(u)
    total = float(logsumexp(log_terms))
    if log_terms[-1] > total + math.log(tol.rel):
        raise ConvergenceError("series truncation too short", best_estimate=total)
    return total


def g1_log(params: KouJumpParams, u: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """log G1(t, u), overflow-safe for large u."""
    if u < 0:
        raise DomainError(f"g1 requires u >= 0, got {u}")
    table = _table(params, _series_k_budget(params.b1_jump, u), tol)
    for _ in range(6):
        try:
            return _log_series(table.log_a, u, tol)
        except ConvergenceError:
            table = _table(params, 2 * table.truncation_k, tol)
    raise ConvergenceError(f"G1 series did not truncate cleanly at u={u}")


def g2_log(params: KouJumpParams, u: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """log G2 series value at downward displacement u >= 0."""
    if u < 0:
        raise DomainError(f"g2 requires u >= 0, got {u}")
    table = _table(params, _series_k_budget(params.b2_jump, u), tol)
    for _ in range(6):
        try:
            return _log_series(table.log_b, u, tol)
        except ConvergenceError:
            table = _table(params, 2 * table.truncation_k, tol)
    raise ConvergenceError(f"G2 series did not truncate cleanly at u={u}")


def g1(params: KouJumpParams, u: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """G1(t, u) = sum_k a_k u^k (strictly increasing in u, positive)."""
    return math.exp(g1_log(params, u, tol))


def g2(params: KouJumpParams, u: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """G2 series value at downward displacement u >= 0."""
    return math.exp(g2_log(params, u, tol))


def h_log_density(params: KouJumpParams, x: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """log H(t, x); the x = 1 boundary returns the right-limit log a_0."""
    if not x > 0:
        raise DomainError(f"h_density requires x > 0, got {x}")
    if x == 1.0:
        return float(_table(params, 0, tol).log_a[0])
    u = math.log(x)
    if u > 0:
        return g1_log(params, u, tol) + (-params.eta1 - 1.0) * u
    return g2_log(params, -u, tol) + (params.eta2 - 1.0) * u


def h_density(params: KouJumpParams, x: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Density H(t, x) of the absolutely continuous part of the jump-factor law."""
    return math.exp(h_log_density(params, x, tol))


def decomposition(params: KouJumpParams) -> JumpLawDecomposition:
    """Atom mass e^(-lam t) at price 1 plus the density H(t, .)."""
    return JumpLawDecomposition(
        atom_mass=params.atom_mass,
        density=lambda x: h_density(params, x),
    )


def frac_integral(order: float, s: float, r: float, u: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """u^order * (fractional integral of order `order` of s*cosh(r*sqrt(.))) at u.

    Only the comparison orders -3/2 and -5/2 are supported. Computed by
    quadrature of the scaled kernel representation
        (s / Gamma(-order)) * int_0^1 cosh(r sqrt(u w)) (1-w)^(-order-1) dw.
    """
    if order not in (-1.5, -2.5):
        raise DomainError(f"order must be -3/2 or -5/2, got {order}")
    if not (s > 0 and r > 0):
        raise DomainError(f"need s > 0 and r > 0, got s={s}, r={r}")
    if not u > 0:
        raise DomainError(f"need u > 0, got {u}")
    power = -order - 1.0
    front = s / math.exp(log_gamma(-order))

    def integrand(w):
        return math.cosh(r * math.sqrt(u * w)) * (1.0 - w) ** power

    quad_tol = Tolerance(rel=min(tol.rel, 1e-11), abs=0.0, max_iter=max(tol.max_iter, 200))
    return front * integrate(integrand, 0.0, 1.0, quad_tol)


def watson_params(params: KouJumpParams) -> tuple[float, float]:
    """(s, r) tying the cosh comparison function to the jump parameters."""
    return 2.0 * math.sqrt(math.pi) * params.c1_jump, 2.0 * math.sqrt(params.b1_jump)


def _asymptote_guard(ell: float, guard: float):
    if ell < guard:
        raise RegimeGuardError(f"asymptote requires |log x| >= {guard}, got {ell:.6g}")


def h1_asymptote_log(params: KouJumpParams, x: float, guard: float = 4.0) -> float:
    ell = math.log(x)
    _asymptote_guard(ell, guard)
    b1 = params.b1_jump
    return (
        math.log(0.5 / math.sqrt(math.pi))
        + 0.25 * math.log(b1)
        + params._up_exp_shift()
        - 0.75 * math.log(ell)
        + 2.0 * math.sqrt(b1 * ell)
    )


def h1_asymptote(params: KouJumpParams, x: float, guard: float = 4.0) -> float:
    """Leading term of G1(t, log x) as x -> inf; relative error O((log x)^-1/2)."""
    return math.exp(h1_asymptote_log(params, x, guard))


def h2_asymptote_log(params: KouJumpParams, x: float, guard: float = 4.0) -> float:
    ell = -math.log(x)
    _asymptote_guard(ell, guard)
    b2 = params.b2_jump
    return (
        math.log(0.5 / math.sqrt(math.pi))
        + 0.25 * math.log(b2)
        + params._down_exp_shift()
        - 0.75 * math.log(ell)
        + 2.0 * math.sqrt(b2 * ell)
    )


def h2_asymptote(params: KouJumpParams, x: float, guard: float = 4.0) -> float:
    """Leading term of the downward series factor as x -> 0; mirror of h1."""
    return math.exp(h2_asymptote_log(params, x, guard))


def h_tail_asymptote(params: KouJumpParams) -> TailAsymptote:
    """Large-x asymptote of the full density H (series factor times power)."""
    return TailAsymptote(
        r1=0.5 / math.sqrt(math.pi) * params.b1_jump**0.25 * math.exp(params._up_exp_shift()),
        r2=2.0 * math.sqrt(params.b1_jump),
        r3=params.eta1 + 1.0,
        r4=-0.75,
        side=AT_INFINITY,
        error_order=ERROR_INV_SQRT_LOG,
    )


def h_zero_asymptote(params: KouJumpParams) -> TailAsymptote:
    """Small-x asymptote of H: prefactor * x^(eta2-1) * slowly varying part."""
    return TailAsymptote(
        r1=0.5 / math.sqrt(math.pi) * params.b2_jump**0.25 * math.exp(params._down_exp_shift()),
        r2=2.0 * math.sqrt(params.b2_jump),
        r3=params.eta2 - 1.0,
        r4=-0.75,
        side=AT_ZERO,
        error_order=ERROR_INV_SQRT_LOG,
    )


def log_jump_mgf(params: KouJumpParams, z: complex) -> complex:
    """log E[exp(z * T_t)] for complex z with -eta2 < Re(z) < eta1."""
    z = complex(z)
    if not (-params.eta2 < z.real < params.eta1):
        raise MomentExplosionError(
            f"jump moment of order {z} undefined: admissible open interval is "
            f"({-params.eta2}, {params.eta1})"
        )
    e1, e2 = params.eta1, params.eta2
    return params.lam * params.t * (params.p * e1 / (e1 - z) + params.q * e2 / (e2 + z) - 1.0)


def jump_mgf(params: KouJumpParams, s: float) -> float:
    """E[e^{s T_t}], the moment of order s of the jump factor."""
    return math.exp(log_jump_mgf(params, complex(s)).real)


def h_moment(params: KouJumpParams, s: float) -> float:
    """Moment of order s of the density part H alone (atom subtracted)."""
    return jump_mgf(params, s) - params.atom_mass


def risk_neutral_drift(params: KouJumpParams) -> float:
    """Diffusion drift making the jump-diffusion price a martingale at zero rates."""
    return params.lam * (params.q / (params.eta2 + 1.0) - params.p / (params.eta1 - 1.0))


def sample_jump_factors(params: KouJumpParams, stream, size: int) -> np.ndarray:
    """Vector of independent draws of the jump factor exp(T_t)."""
    gen = stream.generator
    n_jumps = gen.poisson(params.lam * params.t, size=size)
    n_up = gen.binomial(n_jumps, params.p)
    n_down = n_jumps - n_up
    up = gen.standard_gamma(n_up) / params.eta1
    down = gen.standard_gamma(n_down) / params.eta2
    return np.exp(up - down)


def sample_jump_factor(params: KouJumpParams, stream) -> float:
    """One draw of the jump factor exp(T_t)."""
    return float(sample_jump_factors(params, stream, 1)[0])
