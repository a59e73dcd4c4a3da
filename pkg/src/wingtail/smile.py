"""Black-Scholes pricing/inversion, call-price tail asymptotics, and the
five-term implied-volatility wing expansions.

Wing expansions are driven entirely by a density tail record (prefactor,
exp-sqrt-log coefficient, power, log-power): the call tail follows by double
integration, and matching Black-Scholes wings term by term yields explicit
coefficients for sqrt(L), 1, log L/sqrt(L), 1/sqrt(L) and log L/L, with a
1/L error, where L is the log-moneyness of the wing. Deep wings underflow
double precision as prices, so the pricing and inversion internals work on
log prices throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import log_ndtr
from scipy.stats import norm

from . import nig as _nig
from .errors import DomainError, InfinitePriceError, InversionError, RegimeGuardError
from .kou import risk_neutral_drift
from .mellin import AT_INFINITY, AT_ZERO, TailAsymptote
from .mixed import (
    WING_LARGE,
    WING_SMALL,
    MixedModel,
    classify_wing,
    mixed_tail_asymptote,
    mixed_zero_asymptote,
)
from .numerics import Tolerance, find_root

__all__ = [
    "SmileExpansion",
    "risk_neutral_drift",
    "bs_call",
    "bs_log_call",
    "bs_implied_vol",
    "bs_implied_vol_from_log",
    "call_asymptote",
    "call_asymptote_log",
    "expansion_from_tail",
    "expansion_from_zero_tail",
    "smile_expansion",
    "implied_vol_approx",
]


# --------------------------------------------------------------------------- #
# Black-Scholes (zero rates)
# --------------------------------------------------------------------------- #

def bs_call(x0: float, K: float, T: float, sigma: float) -> float:
    """Black-Scholes call with zero rates; sigma = 0 returns intrinsic value."""
    if not (x0 > 0 and K > 0 and T > 0):
        raise DomainError(f"need x0, K, T > 0, got {x0}, {K}, {T}")
    if sigma < 0:
        raise DomainError(f"need sigma >= 0, got {sigma}")
    if sigma == 0.0:
        return max(x0 - K, 0.0)
    srt = sigma * math.sqrt(T)
    d1 = (math.log(x0 / K) + 0.5 * srt * srt) / srt
    d2 = d1 - srt
    return x0 * norm.cdf(d1) - K * norm.cdf(d2)


def _mills_difference(z1: float, delta: float) -> float:
    """Mills(z1) - Mills(z1 + delta) for z1 >= 20, delta > 0, by term-wise
    differencing of the asymptotic series Mills(z) = sum (-1)^k (2k-1)!! z^(-2k-1).

    Each term's difference is evaluated multiplicatively through expm1, so the
    result stays accurate even when delta is many orders below z1.
    """
    lr = math.log1p(delta / z1)  # log(z2/z1)
    total = 0.0
    sign = 1.0
    double_fact = 1.0
    z1_pow = 1.0 / z1
    for k in range(0, 60):
        n = 2 * k + 1
        contrib = sign * double_fact * z1_pow * (-math.expm1(-n * lr))
        total += contrib
        if abs(contrib) < 1e-18 * abs(total):
            break
        sign = -sign
        double_fact *= n
        z1_pow /= z1 * z1
    return total


def _bs_log_call_core(log_x0: float, log_k: float, T: float, sigma: float) -> float:
    if not sigma > 0:
        raise DomainError(f"bs_log_call needs sigma > 0, got {sigma}")
    srt = sigma * math.sqrt(T)
    d1 = (log_x0 - log_k + 0.5 * srt * srt) / srt
    d2 = d1 - srt
    if d1 <= -20.0 and d2 <= -25.0:
        # deep out of the money: x0 phi(d1) = K phi(d2) exactly, so
        # C = K phi(d2) (Mills(|d1|) - Mills(|d2|)) with no cancellation
        log_kphi = log_k - 0.5 * d2 * d2 - 0.5 * math.log(2.0 * math.pi)
        return log_kphi + math.log(_mills_difference(-d1, srt))
    la = log_x0 + float(log_ndtr(d1))
    lb = log_k + float(log_ndtr(d2))
    if lb >= la:  # can only happen through rounding at machine level
        raise InversionError(f"degenerate Black-Scholes evaluation at log K={log_k}, sigma={sigma}")
    return la + math.log1p(-math.exp(lb - la))


def bs_log_call(x0: float, K: float, T: float, sigma: float) -> float:
    """log of the Black-Scholes call price, stable for far out-of-the-money wings."""
    if not (x0 > 0 and K > 0 and T > 0):
        raise DomainError(f"need x0, K, T > 0, got {x0}, {K}, {T}")
    return _bs_log_call_core(math.log(x0), math.log(K), T, sigma)


def bs_implied_vol_from_log(log_price: float, x0: float, K: float, T: float) -> float:
    """Implied volatility from a log price; bracketed, bisection-safe inversion."""
    if not (x0 > 0 and K > 0 and T > 0):
        raise DomainError(f"need x0, K, T > 0, got {x0}, {K}, {T}")
    if log_price >= math.log(x0):
        raise InversionError(f"price {math.exp(log_price):.6g} at or above the spot bound {x0}")
    intrinsic = max(x0 - K, 0.0)
    if intrinsic > 0.0 and log_price <= math.log(intrinsic):
        raise InversionError(
            f"price {math.exp(log_price):.6g} at or below intrinsic value {intrinsic:.6g}"
        )

    def gap(sigma):
        return bs_log_call(x0, K, T, sigma) - log_price

    lo, hi = 1e-8, 1.0
    glo = gap(lo)
    if glo >= 0.0:
        # price below the tiny-vol value only through rounding; return the floor
        return lo
    for _ in range(60):
        if gap(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise InversionError(f"no volatility below {hi} reproduces the price")
    return find_root(gap, lo, hi, Tolerance(rel=1e-15, abs=1e-14, max_iter=200))


def bs_implied_vol(price: float, x0: float, K: float, T: float) -> float:
    """Implied volatility of a call price inside the no-arbitrage band."""
    intrinsic = max(x0 - K, 0.0)
    if not (intrinsic < price < x0):
        raise InversionError(
            f"price {price:.6g} outside the open no-arbitrage band ({intrinsic:.6g}, {x0:.6g})"
        )
    return bs_implied_vol_from_log(math.log(price), x0, K, T)


# --------------------------------------------------------------------------- #
# Call-price tail from a density tail record
# --------------------------------------------------------------------------- #

def call_asymptote_log(tail: TailAsymptote, K: float, x0: float, T: float, guard: float = 4.0) -> float:
    """log of the leading-term call price implied by a large-x density tail.

    Integrating the tail twice gives
        C(K) = r1 / ((r3-1)(r3-2)) * L^r4 * exp(r2 sqrt(L)) * K^(2-r3),
    with L = log(K/x0); the relative error is of order L^(-1/2).
    """
    if tail.side != AT_INFINITY:
        raise DomainError("call_asymptote requires a tail record at infinity")
    if not tail.r3 > 2.0:
        raise InfinitePriceError(
            f"call price diverges: tail power exponent {tail.r3} is not above 2"
        )
    if not (K > 0 and x0 > 0 and T > 0):
        raise DomainError(f"need K, x0, T > 0, got {K}, {x0}, {T}")
    L = math.log(K / x0)
    if L < guard:
        raise RegimeGuardError(f"call_asymptote requires log(K/x0) >= {guard}, got {L:.6g}")
    return (
        math.log(tail.r1)
        - math.log((tail.r3 - 1.0) * (tail.r3 - 2.0))
        + tail.r4 * math.log(L)
        + tail.r2 * math.sqrt(L)
        + (2.0 - tail.r3) * math.log(K)
    )


def call_asymptote(tail: TailAsymptote, K: float, x0: float, T: float, guard: float = 4.0) -> float:
    """Leading-term call price for strikes deep in the large wing."""
    return math.exp(call_asymptote_log(tail, K, x0, T, guard))


# --------------------------------------------------------------------------- #
# Five-term wing expansions
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class SmileExpansion:
    """Implied-vol wing expansion: c_lead*sqrt(L) + c_const + c_llog*log(L)/sqrt(L)
    + c_inv/sqrt(L) + c_llog2*log(L)/L, error O(1/L).

    L is log(K/x0) on the large wing and log(x0/K) on the small wing.
    """

    wing: str
    c_lead: float
    c_const: float
    c_llog: float
    c_inv: float
    c_llog2: float
    T: float
    x0: float
    error_order: str = "1/L"

    def __post_init__(self):
        if self.wing not in (WING_LARGE, WING_SMALL):
            raise DomainError(f"unknown wing {self.wing!r}")
        if not self.c_lead > 0:
            raise DomainError(f"c_lead must be positive, got {self.c_lead}")
        for name in ("c_lead", "c_const", "c_llog", "c_inv", "c_llog2"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} is not finite")

    def evaluate(self, L: float) -> float:
        if not L > 1.0:
            raise RegimeGuardError(f"expansion needs L > 1, got {L}")
        sq = math.sqrt(L)
        lg = math.log(L)
        return self.c_lead * sq + self.c_const + self.c_llog * lg / sq + self.c_inv / sq + self.c_llog2 * lg / L


def _wing_coefficients(r1n: float, r2: float, e_lo: float, e_hi: float, r4: float, T: float):
    """Shared coefficient algebra: e_hi/e_lo are the two exponent offsets
    (r3-1, r3-2 on the large wing; s3+1, s3 on the small wing); r1n is the
    unit-spot-normalized prefactor.

    The 1/sqrt(L) coefficient carries the same (1/sqrt(e_lo) - 1/sqrt(e_hi))
    factor as the other subleading terms: every perturbation of the matching
    equation enters through the derivative of the leading-order wing map, and
    the price-inversion oracle confirms the residual times L stays bounded
    only with that factor in place (without it the residual grows like
    sqrt(L); see the wing self-consistency tests).
    """
    sq_hi, sq_lo = math.sqrt(e_hi), math.sqrt(e_lo)
    s2t = math.sqrt(2.0 * T)
    base2 = 1.0 / sq_lo - 1.0 / sq_hi
    base3 = e_lo**-1.5 - e_hi**-1.5
    c_lead = math.sqrt(2.0 / T) * (sq_hi - sq_lo)
    c_const = r2 / s2t * base2
    c_llog = (2.0 * r4 + 1.0) / (2.0 * s2t) * base2
    c_inv = (
        base2 / s2t * math.log(2.0 * math.sqrt(math.pi) * r1n / (sq_hi * sq_lo * (sq_hi - sq_lo)))
        + r2 * r2 / (4.0 * s2t) * base3
    )
    c_llog2 = r2 * (2.0 * r4 + 1.0) / (4.0 * s2t) * base3
    return c_lead, c_const, c_llog, c_inv, c_llog2


def expansion_from_tail(tail: TailAsymptote, x0: float, T: float) -> SmileExpansion:
    """Large-wing expansion from a density tail record at infinity.

    The prefactor is first normalized to unit spot (r1 -> r1 x0^(1-r3)), which
    is how a general initial price enters the constant term.
    """
    if tail.side != AT_INFINITY:
        raise DomainError("large-wing expansion requires a tail at infinity")
    if not tail.r3 > 2.0:
        raise InfinitePriceError(f"wing expansion needs tail power > 2, got {tail.r3}")
    r1n = tail.r1 * x0 ** (1.0 - tail.r3)
    c = _wing_coefficients(r1n, tail.r2, tail.r3 - 2.0, tail.r3 - 1.0, tail.r4, T)
    return SmileExpansion(WING_LARGE, *c, T=T, x0=x0)


def expansion_from_zero_tail(tail: TailAsymptote, x0: float, T: float) -> SmileExpansion:
    """Small-wing expansion from a density record at zero (direct form).

    With the density behaving like s1 x^(s3 - 1) near zero (s3 = r3 + 1 of the
    record), the coefficients are the large-wing ones at exponent offsets
    (s3, s3 + 1); this equals routing the reflected density x^(-3) D(1/x)
    through the large-wing pipeline.
    """
    if tail.side != AT_ZERO:
        raise DomainError("small-wing expansion requires a tail at zero")
    s3 = tail.r3 + 1.0
    if not s3 > 0.0:
        raise InfinitePriceError(f"wing expansion needs positive small-x moment index, got s3={s3}")
    s1n = tail.r1 * x0**s3
    c = _wing_coefficients(s1n, tail.r2, s3, s3 + 1.0, tail.r4, T)
    return SmileExpansion(WING_SMALL, *c, T=T, x0=x0)


def _expected_drift(model: MixedModel) -> float:
    if model.jump_kind == "kou":
        return risk_neutral_drift(model.jumps)
    if model.jump_kind == "nig":
        return _nig.nig_no_arb_drift(model.jumps)
    return 0.0


def smile_expansion(model: MixedModel, wing: str) -> SmileExpansion:
    """Five-term wing expansion of the model smile on the requested wing.

    Requires the martingale drift for the jump component (implied volatility
    is defined against the spot as forward); raises on a degenerate regime or
    an exploding prefactor moment, propagated from the wing classification.
    """
    mu_star = _expected_drift(model)
    if abs(model.heston.mu - mu_star) > 1e-9 * max(1.0, abs(mu_star)):
        raise DomainError(
            f"model drift {model.heston.mu} is not the martingale drift {mu_star}; "
            "install the no-arbitrage drift before asking for smile asymptotics"
        )
    classify_wing(model, wing)  # surfaces degenerate regimes before any algebra
    if wing == WING_LARGE:
        return expansion_from_tail(mixed_tail_asymptote(model), model.x0, model.t)
    return expansion_from_zero_tail(mixed_zero_asymptote(model), model.x0, model.t)


def implied_vol_approx(expansion: SmileExpansion, K: float, guard: float = 4.0) -> float:
    """Evaluate the wing expansion at strike K (on the expansion's wing)."""
    if not K > 0:
        raise DomainError(f"need K > 0, got {K}")
    L = math.log(K / expansion.x0) if expansion.wing == WING_LARGE else math.log(expansion.x0 / K)
    if L < guard:
        raise RegimeGuardError(
            f"strike K={K} is not on the {expansion.wing} wing regime (L={L:.6g} < {guard})"
        )
    return expansion.evaluate(L)
