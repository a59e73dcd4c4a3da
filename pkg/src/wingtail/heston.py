"""Heston diffusion component: moment explosion times, critical moments and
their slopes/curvatures, the closed-form moment function, and the explicit
tail constants that drive both wings of the stock-price density.

Conventions. The variance process is dY = (a - b*Y) dt + c*sqrt(Y) dZ and the
price is dX = mu*X dt + sqrt(Y)*X dW with corr(W, Z) = rho. Only rho <= 0 is
accepted: the tail formulas implemented here are established for the
non-positively correlated model, and positive rho is rejected loudly rather
than extrapolated.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError, MomentExplosionError, RegimeGuardError, SearchError
from .mellin import AT_INFINITY, AT_ZERO, ERROR_INV_SQRT_LOG, MellinStrip, TailAsymptote
from .numerics import find_root, Tolerance

__all__ = [
    "HestonParams",
    "CriticalMoments",
    "HestonTailConstants",
    "explosion_time",
    "explosion_time_slope",
    "critical_moments",
    "tail_constants",
    "mgf",
    "log_mgf",
    "density_tail",
    "density_zero",
    "tail_record",
    "zero_record",
    "mellin_strip",
]


@dataclass(frozen=True)
class HestonParams:
    """Diffusion parameters plus initial state and horizon (rates are zero)."""

    mu: float
    a: float
    b: float
    c: float
    rho: float
    x0: float
    y0: float
    t: float

    def __post_init__(self):
        if self.a < 0:
            raise DomainError(f"need a >= 0, got {self.a}")
        if self.b < 0:
            raise DomainError(f"need b >= 0, got {self.b}")
        if not self.c > 0:
            raise DomainError(f"need c > 0, got {self.c}")
        if not (-1.0 < self.rho <= 0.0):
            raise DomainError(
                f"rho={self.rho} rejected: tail formulas are only established for "
                "-1 < rho <= 0, positive correlation is out of scope"
            )
        if not self.x0 > 0:
            raise DomainError(f"need x0 > 0, got {self.x0}")
        if not self.y0 > 0:
            raise DomainError(f"need y0 > 0, got {self.y0}")
        if not self.t > 0:
            raise DomainError(f"need t > 0, got {self.t}")

    @property
    def forward(self) -> float:
        """x0 * exp(mu*t), the mean of the price at the horizon."""
        return self.x0 * math.exp(self.mu * self.t)


@dataclass(frozen=True)
class CriticalMoments:
    """Critical moment orders at a fixed horizon, with slopes and curvatures."""

    s_plus: float
    s_minus: float
    sigma_plus: float
    sigma_minus: float
    kappa_plus: float
    kappa_minus: float
    t: float

    def __post_init__(self):
        if not self.s_plus >= 1:
            raise DomainError(f"s_plus must be >= 1, got {self.s_plus}")
        if not self.s_minus <= 0:
            raise DomainError(f"s_minus must be <= 0, got {self.s_minus}")
        if not (self.sigma_plus > 0 and self.sigma_minus > 0):
            raise DomainError("critical slopes must be positive")


@dataclass(frozen=True)
class HestonTailConstants:
    """The eight explicit constants of the two density wings."""

    A1: float
    A2: float
    A3: float
    A1t: float
    A2t: float
    A3t: float
    B1: float
    B1t: float

    def __post_init__(self):
        for name in ("A1", "A2", "A3", "A1t", "A2t", "A3t", "B1", "B1t"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")


def _beta(p: HestonParams, s: float) -> float:
    return p.c * p.rho * s - p.b


def _discriminant(p: HestonParams, s: float) -> float:
    # discriminant of (c^2/2) V^2 + beta V + (s^2-s)/2, up to the factor 4
    beta = _beta(p, s)
    return beta * beta - p.c * p.c * (s * s - s)


def explosion_time(params: HestonParams, s: float) -> float:
    """First horizon at which E[X_t^s] becomes infinite; +inf if it never does.

    Branches of the closed form: no explosion for s in [0, 1]; no explosion
    when the discriminant is >= 0 with beta < 0; logarithmic formula for
    discriminant >= 0 with beta > 0; arctangent formula for negative
    discriminant.
    """
    if 0.0 <= s <= 1.0:
        return math.inf
    beta = _beta(params, s)
    delta = _discriminant(params, s)
    if delta >= 0.0:
        if beta <= 0.0:
            return math.inf
        root = math.sqrt(delta)
        # beta > sqrt(delta) is automatic here since s^2 - s > 0
        return math.log((beta + root) / (beta - root)) / root
    m = math.sqrt(-delta)
    return 2.0 / m * (0.5 * math.pi - math.atan(beta / m))


def explosion_time_slope(params: HestonParams, s: float) -> float:
    """d/ds of the explosion time, analytic on the arctangent branch."""
    delta = _discriminant(params, s)
    if delta >= 0.0:
        raise DomainError(
            f"analytic slope needs the oscillatory branch (discriminant < 0), "
            f"got {delta} at s={s}"
        )
    c2 = params.c * params.c
    beta = _beta(params, s)
    beta_p = params.c * params.rho
    delta_p = 2.0 * beta * beta_p - c2 * (2.0 * s - 1.0)
    m = math.sqrt(-delta)
    m_p = -delta_p / (2.0 * m)
    theta = 0.5 * math.pi - math.atan(beta / m)
    # m^2 + beta^2 simplifies to c^2 s (s - 1)
    theta_p = -(beta_p * m - beta * m_p) / (c2 * s * (s - 1.0))
    return 2.0 * theta_p / m - 2.0 * theta * m_p / (m * m)


def _explosion_curvature(params: HestonParams, s: float, rel_step: float = 1e-5) -> float:
    h = rel_step * max(1.0, abs(s))
    return (explosion_time_slope(params, s + h) - explosion_time_slope(params, s - h)) / (2.0 * h)


def _bracket_critical(params: HestonParams, upper: bool) -> tuple[float, float]:
    """Bracket [lo, hi] with T*(lo) > t >= T*(hi) on the requested side."""
    t = params.t
    edge = 1.0 + 1e-9 if upper else -1e-9
    step = 1.0
    probe = edge
    for _ in range(200):
        probe = probe + step if upper else probe - step
        if explosion_time(params, probe) < t:
            lo, hi = (edge, probe) if upper else (probe, edge)
            return lo, hi
        step *= 2.0
    raise SearchError(
        f"could not bracket the {'upper' if upper else 'lower'} critical moment: "
        f"explosion time stayed above t={t} out to s={probe}"
    )


@lru_cache(maxsize=256)
def critical_moments(params: HestonParams) -> CriticalMoments:
    """Critical moment orders s+/s- solving T*(s) = t, with slopes and curvatures.

    s+ is found on (1, inf) and s- on (-inf, 0) by bracketed root finding on
    1/T*(s) (continuous across the non-explosive region where T* = +inf).
    Slopes use the analytic derivative of the closed form; curvatures use a
    central difference of that derivative (relative step 1e-5).
    """
    t = params.t
    results = {}
    for upper in (True, False):
        lo, hi = _bracket_critical(params, upper)

        def gap(s):
            ts = explosion_time(params, s)
            return (0.0 if math.isinf(ts) else 1.0 / ts) - 1.0 / t

        tol = Tolerance(rel=4e-16, abs=1e-13, max_iter=300)
        s_crit = find_root(gap, lo, hi, tol)
        slope = explosion_time_slope(params, s_crit)
        curv = _explosion_curvature(params, s_crit)
        results[upper] = (s_crit, abs(slope), curv)

    s_plus, sig_plus, kap_plus = results[True]
    s_minus, sig_minus, kap_minus = results[False]
    return CriticalMoments(
        s_plus=s_plus,
        s_minus=s_minus,
        sigma_plus=sig_plus,
        sigma_minus=sig_minus,
        kappa_plus=kap_plus,
        kappa_minus=kap_minus,
        t=t,
    )


def log_mgf(params: HestonParams, z: complex) -> complex:
    """log E[X_t^z] for complex z with Re(z) inside the finite-moment strip.

    Stable branch handling: d is the principal square root with Re(d) >= 0 and
    the complex logarithm never crosses its cut for admissible z (the usual
    trap-free formulation of the Heston characteristic exponent).
    """
    z = complex(z)
    a, b, c, rho, t = params.a, params.b, params.c, params.rho, params.t
    if z == 0:
        return 0.0 + 0.0j
    bb = b - rho * c * z  # = -beta(z)
    d = cmath.sqrt(bb * bb + c * c * (z - z * z))
    if d.real < 0:
        d = -d
    c2 = c * c
    if abs(d) < 1e-300:
        # double root of the Riccati quadratic: V(t) = k*t / (1 - c^2*k*t/(2*bb))-type
        # degenerate point; fall back to a tiny perturbation of z
        return log_mgf(params, z * (1.0 + 1e-12) + 1e-14)
    g = (bb - d) / (bb + d)
    edt = cmath.exp(-d * t)
    denom = 1.0 - g * edt
    if denom == 0:
        raise MomentExplosionError(f"moment of order {z} explodes exactly at t={t}")
    V = (bb - d) / c2 * (1.0 - edt) / denom
    C = a / c2 * ((bb - d) * t - 2.0 * cmath.log(denom / (1.0 - g)))
    return z * (math.log(params.x0) + params.mu * t) + C + V * params.y0


def mgf(params: HestonParams, s: float) -> float:
    """E[X_t^s] for real s strictly inside the critical interval (s-, s+)."""
    if explosion_time(params, s) <= params.t:
        cm = critical_moments(params)
        raise MomentExplosionError(
            f"moment of order s={s} is infinite at t={params.t}: "
            f"admissible open interval is ({cm.s_minus:.6g}, {cm.s_plus:.6g})"
        )
    val = log_mgf(params, complex(s))
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise SearchError(f"moment evaluation lost reality at s={s}: {val}")
    return math.exp(val.real)


def mellin_strip(params: HestonParams) -> MellinStrip:
    """Open strip on which the Mellin transform of the price density converges.

    The transform at eta equals the moment of order -eta-1, so the strip is
    (-A3, A3t) = (-s_plus - 1, -s_minus - 1).
    """
    cm = critical_moments(params)
    return MellinStrip(sigma=-(cm.s_plus + 1.0), tau=-(cm.s_minus + 1.0))


def _sinh_bracket(params: HestonParams, s: float) -> float:
    """sqrt(q)/sinh(t/2 sqrt(q)) for q the quadratic discriminant at s.

    For q < 0 (the generic case at a critical moment) this continues to
    sqrt(-q)/sin(t/2 sqrt(-q)), which is the same analytic function of q.
    """
    q = _discriminant(params, s)
    t = params.t
    if q > 0:
        r = math.sqrt(q)
        return r / math.sinh(0.5 * t * r)
    if q == 0:
        return 2.0 / t
    r = math.sqrt(-q)
    sn = math.sin(0.5 * t * r)
    if sn <= 0:
        raise SearchError(
            f"sin continuation of the sinh bracket is non-positive at s={s}; "
            "inconsistent critical moment"
        )
    return r / sn


@lru_cache(maxsize=256)
def tail_constants(params: HestonParams) -> HestonTailConstants:
    """The eight wing constants A1-A3, their tilded twins, and B1/B1t.

    B1 and B1t fold the initial price and drift into the prefactors via the
    scaling X_t = (x0 e^{mu t}) * X_t^0: with M = x0 e^{mu t} the density obeys
    D(x) = D^0(x/M)/M, which gives B1 = A1 * M^(A3-1) and B1t = A1t * M^(-A3t-1)
    (the exponents are the critical moments s+ and s-). For M = 1 they reduce
    to A1 and A1t exactly.
    """
    cm = critical_moments(params)
    a, c, t, y0 = params.a, params.c, params.t, params.y0
    c2 = c * c
    ac2 = a / c2

    def one_side(s, sigma, kappa):
        beta = _beta(params, s)
        pref = (
            (1.0 / math.sqrt(math.pi))
            * 2.0 ** (-0.75 - ac2)
            * y0 ** (0.25 - ac2)
            * c ** (2.0 * ac2 - 0.5)
            * sigma ** (-ac2 - 0.25)
        )
        expo = math.exp(-y0 * (beta / c2 + kappa / (c2 * sigma * sigma)) - a * t / c2 * beta)
        bracket = 2.0 * _sinh_bracket(params, s) / (c2 * s * (s - 1.0))
        return pref * expo * bracket ** (2.0 * ac2)

    A1 = one_side(cm.s_plus, cm.sigma_plus, cm.kappa_plus)
    A1t = one_side(cm.s_minus, cm.sigma_minus, cm.kappa_minus)
    A2 = 2.0 * math.sqrt(2.0 * y0) / c / math.sqrt(cm.sigma_plus)
    A2t = 2.0 * math.sqrt(2.0 * y0) / c / math.sqrt(cm.sigma_minus)
    A3 = cm.s_plus + 1.0
    A3t = -(cm.s_minus + 1.0)
    M = params.forward
    B1 = A1 * M ** (A3 - 1.0)
    B1t = A1t * M ** (-A3t - 1.0)
    return HestonTailConstants(A1=A1, A2=A2, A3=A3, A1t=A1t, A2t=A2t, A3t=A3t, B1=B1, B1t=B1t)


def tail_record(params: HestonParams) -> TailAsymptote:
    """Large-x density asymptote as a TailAsymptote record."""
    k = tail_constants(params)
    return TailAsymptote(
        r1=k.B1,
        r2=k.A2,
        r3=k.A3,
        r4=-0.75 + params.a / params.c**2,
        side=AT_INFINITY,
        error_order=ERROR_INV_SQRT_LOG,
    )


def zero_record(params: HestonParams) -> TailAsymptote:
    """Small-x density asymptote as a TailAsymptote record."""
    k = tail_constants(params)
    return TailAsymptote(
        r1=k.B1t,
        r2=k.A2t,
        r3=k.A3t,
        r4=-0.75 + params.a / params.c**2,
        side=AT_ZERO,
        error_order=ERROR_INV_SQRT_LOG,
    )


def density_tail(params: HestonParams, x: float) -> float:
    """Leading-term density value on the large-x wing.

    Valid for x > max(forward, e); the relative error of the leading term is
    of order (log x)^(-1/2).
    """
    guard = max(params.forward, math.e)
    if not x > guard:
        raise RegimeGuardError(f"density_tail needs x > {guard:.6g}, got {x}")
    return tail_record(params).value(x)


def density_zero(params: HestonParams, x: float) -> float:
    """Leading-term density value on the small-x wing (x < min(forward, 1/e))."""
    guard = min(params.forward, 1.0 / math.e)
    if not 0 < x < guard:
        raise RegimeGuardError(f"density_zero needs 0 < x < {guard:.6g}, got {x}")
    return zero_record(params).value(x)
