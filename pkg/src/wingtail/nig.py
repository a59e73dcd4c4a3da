"""Symmetric centered normal-inverse-Gaussian jump factor.

The log-jump at horizon t has the closed-form density
    k(t) * K1(alpha*sqrt(y^2 + (delta t)^2)) / sqrt(y^2 + (delta t)^2),
k(t) = alpha*delta*t*e^(alpha*delta*t)/pi, built from Brownian motion run on an
inverse-Gaussian clock. Only this symmetric centered case is supported; the
price-density tail is a clean power law x^(-alpha-1) with a (log x)^(-3/2)
correction and no exp-sqrt-log factor.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import k1e

from .errors import DomainError, MomentExplosionError, NoArbitrageError, RegimeGuardError
from .mellin import AT_INFINITY, AT_ZERO, ERROR_INV_LOG, TailAsymptote
from .numerics import UnderflowWarning

__all__ = [
    "NIGParams",
    "nig_log_density",
    "nig_price_density",
    "nig_price_log_density",
    "nig_tail_asymptote",
    "nig_tail_record",
    "nig_zero_record",
    "nig_no_arb_drift",
    "nig_mgf",
    "log_nig_mgf",
    "sample_nig",
    "sample_nigs",
]


@dataclass(frozen=True)
class NIGParams:
    """Tail-heaviness alpha, scale delta, horizon t."""

    alpha: float
    delta: float
    t: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"need alpha > 0, got {self.alpha}")
        if not self.delta > 0:
            raise DomainError(f"need delta > 0, got {self.delta}")
        if not self.t > 0:
            raise DomainError(f"need t > 0, got {self.t}")

    @property
    def k_factor(self) -> float:
        adt = self.alpha * self.delta * self.t
        return adt * math.exp(adt) / math.pi


def _log_density_core(params: NIGParams, y: float) -> float:
    # log of k(t) K1(alpha s)/s at s = sqrt(y^2 + (delta t)^2), via the
    # exponentially scaled Bessel function so huge |y| stays finite
    s = math.hypot(y, params.delta * params.t)
    z = params.alpha * s
    scaled = float(k1e(z))
    if scaled == 0.0 or not math.isfinite(scaled):
        raise DomainError(f"Bessel evaluation failed at z={z}")
    adt = params.alpha * params.delta * params.t
    return math.log(adt / math.pi) + adt + math.log(scaled) - z - math.log(s)


def nig_log_density(params: NIGParams, y: float) -> float:
    """Density of the log-jump Y_t at y (symmetric, unimodal at 0).

    For |y| so large that the value underflows double precision, returns 0.0
    and emits an UnderflowWarning.
    """
    log_val = _log_density_core(params, y)
    if log_val < -745.0:
        warnings.warn(f"NIG density underflowed at y={y}", UnderflowWarning, stacklevel=2)
        return 0.0
    return math.exp(log_val)


def nig_price_density(params: NIGParams, x: float) -> float:
    """Density of the jump factor e^{Y_t} at x > 0."""
    if not x > 0:
        raise DomainError(f"nig_price_density requires x > 0, got {x}")
    return nig_log_density(params, math.log(x)) / x


def nig_price_log_density(params: NIGParams, x: float) -> float:
    """log of nig_price_density, safe in the far tails."""
    if not x > 0:
        raise DomainError(f"nig_price_log_density requires x > 0, got {x}")
    return _log_density_core(params, math.log(x)) - math.log(x)


def nig_tail_record(params: NIGParams) -> TailAsymptote:
    """Large-x price-density asymptote: k(t) sqrt(pi/2 alpha) x^(-alpha-1) (log x)^(-3/2)."""
    return TailAsymptote(
        r1=params.k_factor * math.sqrt(math.pi / (2.0 * params.alpha)),
        r2=0.0,
        r3=params.alpha + 1.0,
        r4=-1.5,
        side=AT_INFINITY,
        error_order=ERROR_INV_LOG,
    )


def nig_zero_record(params: NIGParams) -> TailAsymptote:
    """Small-x price-density asymptote, by the x <-> 1/x symmetry of the law."""
    return TailAsymptote(
        r1=params.k_factor * math.sqrt(math.pi / (2.0 * params.alpha)),
        r2=0.0,
        r3=params.alpha - 1.0,
        r4=-1.5,
        side=AT_ZERO,
        error_order=ERROR_INV_LOG,
    )


def nig_tail_asymptote(params: NIGParams, x: float, guard: float = 4.0) -> TailAsymptote:
    """Tail record, guarded: only meaningful for log x >= guard."""
    if not x > 0 or math.log(x) < guard:
        raise RegimeGuardError(f"nig_tail_asymptote requires log x >= {guard}, got x={x}")
    return nig_tail_record(params)


def nig_no_arb_drift(params: NIGParams) -> float:
    """Heston drift making the mixed price a martingale at zero rates."""
    if params.alpha < 1.0:
        raise NoArbitrageError(
            f"no arbitrage-free drift exists for alpha={params.alpha} < 1: "
            "the jump factor has infinite mean correction"
        )
    return params.delta * (math.sqrt(params.alpha**2 - 1.0) - params.alpha)


def log_nig_mgf(params: NIGParams, z: complex) -> complex:
    """log E[e^{z Y_t}] for complex z with |Re z| < alpha."""
    z = complex(z)
    if not abs(z.real) < params.alpha:
        raise MomentExplosionError(
            f"NIG moment of order {z} undefined: admissible open interval is "
            f"({-params.alpha}, {params.alpha})"
        )
    import cmath

    return params.delta * params.t * (params.alpha - cmath.sqrt(params.alpha**2 - z * z))


def nig_mgf(params: NIGParams, s: float) -> float:
    """E[e^{s Y_t}] = exp(delta t (alpha - sqrt(alpha^2 - s^2))), |s| < alpha."""
    return math.exp(log_nig_mgf(params, complex(s)).real)


def _sample_inverse_gaussian(gen, mean: float, shape: float, size: int) -> np.ndarray:
    # Michael-Schucany-Haas transform with the standard rejection step
    nu = gen.standard_normal(size) ** 2
    w = mean * nu
    x = mean + mean / (2.0 * shape) * (w - np.sqrt(w * (4.0 * shape + w)))
    u = gen.uniform(size=size)
    take_other = u > mean / (mean + x)
    x[take_other] = mean * mean / x[take_other]
    return x


def sample_nigs(params: NIGParams, stream, size: int) -> np.ndarray:
    """Vector of draws of Y_t via inverse-Gaussian subordination."""
    gen = stream.generator
    dt = params.delta * params.t
    clock = _sample_inverse_gaussian(gen, mean=dt / params.alpha, shape=dt * dt, size=size)
    return np.sqrt(clock) * gen.standard_normal(size)


def sample_nig(params: NIGParams, stream) -> float:
    """One draw of Y_t."""
    return float(sample_nigs(params, stream, 1)[0])
