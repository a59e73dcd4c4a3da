"""Shared numeric kernel: special functions, quadrature, root finding, RNG streams.

All routines are pure functions of their arguments. Random streams are explicit
values (`RngStream`), never shared mutable state.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _sci_integrate
from scipy import optimize as _sci_optimize
from scipy import special as _sci_special

from .errors import BracketingError, ConvergenceError, DomainError

__all__ = [
    "Tolerance",
    "UnderflowWarning",
    "log_gamma",
    "bessel_k1",
    "integrate",
    "find_root",
    "RngStream",
]


class UnderflowWarning(RuntimeWarning):
    """A special-function value underflowed to zero."""


@dataclass(frozen=True)
class Tolerance:
    """Relative/absolute tolerance plus an iteration budget."""

    rel: float = 1e-10
    abs: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not self.rel > 0:
            raise DomainError(f"Tolerance.rel must be > 0, got {self.rel}")
        if self.abs < 0:
            raise DomainError(f"Tolerance.abs must be >= 0, got {self.abs}")
        if self.max_iter < 1:
            raise DomainError(f"Tolerance.max_iter must be >= 1, got {self.max_iter}")


DEFAULT_TOL = Tolerance()


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def bessel_k1(z: float) -> float:
    """Modified Bessel function of the third kind, order 1.

    Underflows to 0 for very large z (roughly z > 705); that case returns 0.0
    and emits an UnderflowWarning instead of raising.
    """
    if not z > 0:
        raise DomainError(f"bessel_k1 requires z > 0, got {z}")
    val = float(_sci_special.k1(z))
    if val == 0.0:
        warnings.warn(f"bessel_k1 underflowed at z={z}", UnderflowWarning, stacklevel=2)
    return val


def integrate(f, a: float, b: float, tol: Tolerance = DEFAULT_TOL, *, points=None) -> float:
    """Adaptive quadrature of f over (a, b); endpoints may be +-inf.

    Integrable endpoint singularities are handled by the adaptive subdivision.
    Raises ConvergenceError (carrying the best estimate) when the requested
    tolerance is not met within the subdivision budget.
    """
    limit = max(int(tol.max_iter), 50)
    # QUADPACK requires epsrel > 50*eps when no absolute tolerance is given
    epsrel = tol.rel if tol.abs > 0 else max(tol.rel, 1.2e-14)
    kwargs = dict(epsabs=tol.abs, epsrel=epsrel, limit=limit, full_output=1)
    if points is not None and np.isfinite(a) and np.isfinite(b):
        kwargs["points"] = points
    out = _sci_integrate.quad(f, a, b, **kwargs)
    value, abserr = out[0], out[1]
    if len(out) >= 4:  # an error message is appended on trouble
        message = out[3]
        # accept the estimate anyway when the reported error is within tolerance
        if abserr > max(tol.abs, tol.rel * abs(value)) * 10.0:
            raise ConvergenceError(
                f"quadrature did not converge on ({a}, {b}): {message}",
                best_estimate=value,
                error_estimate=abserr,
            )
    return value


def find_root(f, lo: float, hi: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Root of f on [lo, hi]; requires a sign change on the bracket.

    Interpolation-accelerated bisection (Brent), so convergence is guaranteed
    for continuous f.
    """
    if not lo < hi:
        raise DomainError(f"find_root requires lo < hi, got [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketingError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo:.6g}, f(hi)={fhi:.6g}"
        )
    xtol = max(tol.abs, 4.0 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0))
    return float(
        _sci_optimize.brentq(f, lo, hi, xtol=xtol, rtol=max(tol.rel, 8.9e-16), maxiter=max(tol.max_iter, 100))
    )


class RngStream:
    """Reproducible uniform stream with index-derived independent sub-streams."""

    def __init__(self, seed: int, _spawn_key: tuple = ()):
        self.seed = int(seed)
        self._spawn_key = tuple(_spawn_key)
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self._spawn_key)
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def substream(self, index: int) -> "RngStream":
        """Independent stream derived deterministically from (seed, index)."""
        return RngStream(self.seed, self._spawn_key + (int(index),))

    def uniform(self, size=None):
        return self.generator.uniform(size=size)

    def normal(self, size=None):
        return self.generator.standard_normal(size=size)
