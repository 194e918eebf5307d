"""Adaptive Gauss-Kronrod (10/21) quadrature on finite and half-infinite ranges."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .core import InvalidInputError, as_vector3
from .green import imag_axis_contraction, projectors

__all__ = [
    "QuadratureResult",
    "NonConvergenceError",
    "adaptive_integrate",
    "integrate_to_infinity",
    "offresonant_integrand",
    "offresonant_integral",
]

# QUADPACK qk21 abscissae (positive half) and weights.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208745861137,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[1:10:2] = _WG
GAUSS_WEIGHTS[11:20:2] = _WG[::-1]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool
    roundoff_limited: bool = False


class NonConvergenceError(RuntimeError):
    """Subdivision budget exhausted; ``partial`` holds the best estimate."""

    def __init__(self, message, partial: QuadratureResult):
        super().__init__(message)
        self.partial = partial


def _panel(f, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fx = np.asarray(f(mid + half * NODES), dtype=float)
    if fx.shape != NODES.shape:
        fx = np.broadcast_to(fx, NODES.shape)
    if not np.all(np.isfinite(fx)):
        raise InvalidInputError(f"integrand is not finite on [{a}, {b}]")
    kron = half * float(fx @ KRONROD_WEIGHTS)
    gauss = half * float(fx @ GAUSS_WEIGHTS)
    absval = abs(half) * float(np.abs(fx) @ KRONROD_WEIGHTS)
    return kron, abs(kron - gauss), absval


def adaptive_integrate(f, a: float, b: float, rel_tol: float = 1e-10, *,
                       abs_tol: float = 1e-300, max_panels: int = 2000) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` by adaptive bisection of 21-point panels.

    ``f`` is called with a numpy array of nodes and must return an array of
    the same shape.  Converged when the summed error estimate is at most
    ``max(rel_tol * |value|, abs_tol)``, or when it has reached the rounding
    level of ``integral |f|`` (reported as ``roundoff_limited``).
    """
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise InvalidInputError("need finite a < b")
    if not 1e-14 <= rel_tol <= 1e-2:
        raise InvalidInputError("rel_tol must lie in [1e-14, 1e-2]")

    kron, err, absval = _panel(f, a, b)
    heap = [(-err, a, b, kron, err, absval)]
    value, total_err, total_abs = kron, err, absval
    evaluations = 21
    panels = 1

    def done():
        if total_err <= max(rel_tol * abs(value), abs_tol):
            return True, False
        if total_err <= 50 * _EPS * total_abs:
            return True, True
        return False, False

    ok, roundoff = done()
    while not ok:
        if panels >= max_panels:
            partial = QuadratureResult(value, total_err, evaluations, False)
            raise NonConvergenceError(
                f"no convergence after {panels} panels (error {total_err:.3g})", partial)
        _, lo, hi, k0, e0, s0 = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        k1, e1, s1 = _panel(f, lo, mid)
        k2, e2, s2 = _panel(f, mid, hi)
        evaluations += 42
        panels += 1
        value += k1 + k2 - k0
        total_err += e1 + e2 - e0
        total_abs += s1 + s2 - s0
        heapq.heappush(heap, (-e1, lo, mid, k1, e1, s1))
        heapq.heappush(heap, (-e2, mid, hi, k2, e2, s2))
        if panels % 64 == 0:
            # Re-sum to stop drift of the running totals.
            value = math.fsum(p[3] for p in heap)
            total_err = math.fsum(p[4] for p in heap)
        ok, roundoff = done()

    value = math.fsum(p[3] for p in sorted(heap, key=lambda p: p[1]))
    total_err = math.fsum(p[4] for p in heap)
    return QuadratureResult(value, total_err, evaluations, True, roundoff)


def integrate_to_infinity(f, a: float, split: float, rel_tol: float = 1e-10, **kw) -> QuadratureResult:
    """Integrate over ``[a, inf)`` as ``[a, split]`` plus the tail mapped by x = split/t."""
    if not split > a >= 0 and split > 0:
        raise InvalidInputError("need 0 <= a < split")

    def tail(t):
        return f(split / t) * split / t**2

    head = adaptive_integrate(f, a, split, rel_tol, **kw)
    rest = adaptive_integrate(tail, 0.0, 1.0, rel_tol, **kw)
    return QuadratureResult(
        head.value + rest.value,
        head.abs_error_estimate + rest.abs_error_estimate,
        head.evaluations + rest.evaluations,
        head.converged and rest.converged,
        head.roundoff_limited or rest.roundoff_limited,
    )


def offresonant_integrand(kA: float, kB: float, R: float, muA, muB, rhat):
    """Return the vectorised integrand of the off-resonant q-integral.

    ``(q^2 - kA kB) q^2 muA.G(iqR).muB / (pi (q^2 + kA^2)(q^2 + kB^2))``.
    """
    muA = as_vector3(muA, "muA")
    muB = as_vector3(muB, "muB")
    rhat = as_vector3(rhat, "rhat")
    alpha, beta = projectors(rhat)
    a = float(muA @ alpha @ muB)
    b = float(muA @ beta @ muB)
    # Fixed operand order makes the result bit-for-bit symmetric in kA, kB.
    kA, kB = sorted((float(kA), float(kB)))
    kk = kA * kB

    def integrand(q):
        q = np.asarray(q, dtype=float)
        q2 = q * q
        return (q2 - kk) * q2 * imag_axis_contraction(q, R, a, b) / (
            math.pi * (q2 + kA**2) * (q2 + kB**2))

    return integrand


def offresonant_integral(kA: float, kB: float, R: float, muA, muB, rhat,
                         rel_tol: float = 1e-10) -> float:
    """Off-resonant imaginary-frequency integral over ``q`` in ``(0, inf)``."""
    if not (kA > 0 and kB > 0 and R > 0):
        raise InvalidInputError("kA, kB and R must be positive")
    f = offresonant_integrand(kA, kB, R, muA, muB, rhat)
    qc = max(10 / R, 5 * max(kA, kB))
    return integrate_to_infinity(f, 0.0, qc, rel_tol).value

