"""Free-space Green functions of an oscillating electric dipole.

``electric_green(k, r)`` is the dyadic

    G(kr) = -(k e^{ikr} / 4 pi) [alpha/kr + i beta/(kr)^2 - beta/(kr)^3],

with ``alpha = I - rr`` and ``beta = I - 3 rr``, and ``magnetic_green`` the
scalar ``-(k e^{ikr}/4 pi)(1/kr + i/(kr)^2)`` that multiplies ``E . r`` in the
magnetic dyadic.  The Levi-Civita contraction is fixed as
``(E . r)_ij = eps_ijl r_l``, so that ``curl G = i k g E . r`` holds with the
curl taken on the second tensor index (see ``finite_difference_curl``).
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import spherical_jn

from .core import CONSTANTS, InvalidInputError, as_vector3

__all__ = [
    "SingularityError",
    "LEVI_CIVITA",
    "projectors",
    "electric_green",
    "electric_green_dk",
    "magnetic_green",
    "magnetic_green_dk",
    "electric_green_imag_axis",
    "imag_axis_contraction",
    "levi_civita_dot",
    "curl_electric_green",
    "finite_difference_curl",
    "cross_projected_curl",
    "green_frequency_derivative",
    "vacuum_correlators",
]

FOUR_PI = 4 * math.pi


class SingularityError(InvalidInputError):
    """Green functions are singular at zero separation."""


LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _l in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _l] = 1.0
    LEVI_CIVITA[_j, _i, _l] = -1.0


def _geometry(rvec):
    rvec = as_vector3(rvec, "rvec")
    r = float(np.linalg.norm(rvec))
    if r == 0:
        raise SingularityError("Green function evaluated at zero separation")
    return r, rvec / r


def _check_k(k):
    if np.iscomplexobj(k):
        if k == 0:
            raise InvalidInputError("k must be nonzero")
    elif not (math.isfinite(k) and k > 0):
        raise InvalidInputError("k must be positive")


def projectors(rhat):
    """Return ``(alpha, beta) = (I - rr, I - 3 rr)``."""
    rr = np.outer(rhat, rhat)
    eye = np.eye(3)
    return eye - rr, eye - 3 * rr


def electric_green(k, rvec) -> np.ndarray:
    """Electric dyadic Green function (m^-1).  ``k`` may be complex."""
    _check_k(k)
    r, rhat = _geometry(rvec)
    alpha, beta = projectors(rhat)
    x = k * r
    if np.iscomplexobj(k):
        pref = -k * np.exp(1j * x) / FOUR_PI
        return pref * (alpha / x + 1j * beta / x**2 - beta / x**3)
    # Real k: Im part via spherical Bessel functions, which stay accurate
    # where sin x - x cos x cancels (kr << 1).
    s, c = math.sin(x), math.cos(x)
    re = alpha * c / x - beta * (s / x**2 + c / x**3)
    im = alpha * spherical_jn(0, x) - beta * (spherical_jn(1, x) / x)
    return -k / FOUR_PI * (re + 1j * im)


def electric_green_dk(k: float, rvec) -> np.ndarray:
    """Closed-form d/dk of ``electric_green`` at fixed ``rvec`` (dimensionless)."""
    _check_k(k)
    r, rhat = _geometry(rvec)
    alpha, beta = projectors(rhat)
    x = k * r
    return -np.exp(1j * x) / FOUR_PI * (
        1j * alpha - beta / x - 2j * beta / x**2 + 2 * beta / x**3
    )


def magnetic_green(k, r: float) -> complex:
    _check_k(k)
    if not r > 0:
        raise SingularityError("magnetic Green function evaluated at r = 0")
    x = k * r
    return complex(-k * np.exp(1j * x) / FOUR_PI * (1 / x + 1j / x**2))


def magnetic_green_dk(k: float, r: float) -> complex:
    _check_k(k)
    if not r > 0:
        raise SingularityError("magnetic Green function evaluated at r = 0")
    x = k * r
    return complex(-np.exp(1j * x) / FOUR_PI * (1j - 1 / x - 1j / x**2))


def electric_green_imag_axis(q, rvec) -> np.ndarray:
    """``electric_green`` continued to ``k = i q``; real, decaying as e^{-qr}.

    ``q`` may be an array, in which case the result has shape ``q.shape + (3, 3)``.
    """
    r, rhat = _geometry(rvec)
    q = np.asarray(q, dtype=float)
    if np.any(~(q > 0)):
        raise InvalidInputError("q must be positive")
    alpha, beta = projectors(rhat)
    qq = q[..., None, None]
    return -np.exp(-qq * r) / FOUR_PI * (alpha / r + beta / (qq * r**2) + beta / (qq**2 * r**3))


def imag_axis_contraction(q, r: float, a: float, b: float):
    """``mu1 . G(iqr) . mu2`` given ``a = mu1.alpha.mu2`` and ``b = mu1.beta.mu2``.

    Vectorised over ``q``; this is the quadrature hot path.
    """
    q = np.asarray(q, dtype=float)
    return -np.exp(-q * r) / FOUR_PI * (a / r + b / (q * r**2) + b / (q**2 * r**3))


def levi_civita_dot(rhat) -> np.ndarray:
    """``(E . rhat)_ij = eps_ijl rhat_l``; maps a vector ``m`` to ``m x rhat``."""
    return LEVI_CIVITA @ np.asarray(rhat, dtype=float)


def curl_electric_green(k: float, rvec) -> np.ndarray:
    """``i k g(kr) E . rhat`` (m^-2); antisymmetric."""
    r, rhat = _geometry(rvec)
    return 1j * k * magnetic_green(k, r) * levi_civita_dot(rhat)


def finite_difference_curl(k: float, rvec, h: float | None = None) -> np.ndarray:
    """Central-difference curl of ``electric_green`` on its second index.

    ``C_ij = eps_jlm d_l G_im``, step ``h`` defaults to ``1e-6 |rvec|``.
    """
    rvec = as_vector3(rvec, "rvec")
    if h is None:
        h = 1e-6 * float(np.linalg.norm(rvec))
    grad = np.empty((3, 3, 3), dtype=complex)  # grad[l, i, m] = d_l G_im
    for l in range(3):
        step = np.zeros(3)
        step[l] = h
        grad[l] = (electric_green(k, rvec + step) - electric_green(k, rvec - step)) / (2 * h)
    return np.einsum("jlm,lim->ij", LEVI_CIVITA, grad)


def cross_projected_curl(mu1, mu2, k: float, rvec) -> np.ndarray:
    """``mu1 x curl G . mu2 = i k g (mu1_par mu2_perp - (mu1_perp . mu2_perp) rhat)``."""
    mu1 = as_vector3(mu1, "mu1")
    mu2 = as_vector3(mu2, "mu2")
    r, rhat = _geometry(rvec)
    p1 = mu1 @ rhat
    p2 = mu2 @ rhat
    perp1 = mu1 - p1 * rhat
    perp2 = mu2 - p2 * rhat
    bracket = p1 * perp2 - (perp1 @ perp2) * rhat
    return 1j * k * magnetic_green(k, r) * bracket


def green_frequency_derivative(k: float, rvec, weight_power: int, c: float = CONSTANTS.c):
    """d/d omega of ``omega**n G(omega r / c)`` at ``omega = c k``."""
    if int(weight_power) != weight_power or weight_power < 0:
        raise InvalidInputError("weight_power must be a non-negative integer")
    n = int(weight_power)
    w = c * k
    out = w**n * electric_green_dk(k, rvec) / c
    if n:
        out = out + n * w ** (n - 1) * electric_green(k, rvec)
    return out


def vacuum_correlators(k: float, rvec, const=CONSTANTS):
    """Angle-integrated vacuum correlators ``(<E-E+>, <B-E+>)``.

    ``ee = -(8 pi^2 hbar c/eps0) Im G`` and
    ``be = -(8 pi^2 i hbar/(eps0 k)) curl Im G`` with
    ``curl Im G = Im(i k g) E . rhat = k Re g E . rhat``.
    """
    r, rhat = _geometry(rvec)
    ee = -(8 * math.pi**2 * const.hbar * const.c / const.eps0) * electric_green(k, rvec).imag
    curl_im = k * magnetic_green(k, r).real * levi_civita_dot(rhat)
    be = -(8j * math.pi**2 * const.hbar / (const.eps0 * k)) * curl_im
    return ee, be
