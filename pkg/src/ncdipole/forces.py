"""Nonconservative dipole forces on a two-atom system with atom A excited.

Four tiers are available and the caller picks one explicitly:

* ``force_leading_identical``: the leading resonant term built from the Green
  functions (Re g Im G +/- Im g Re G contractions).
* ``force_closed_A`` / ``force_closed_B``: the same term in closed trigonometric form.
* ``force_full_identical``: leading term plus the Gamma/omega corrections
  (frequency derivative, quasi-stationary and off-resonant quadrature terms).
* ``force_full_dissimilar``: the detuned formulas; the 1/Delta terms are
  regrouped so that Delta -> 0 is a removable singularity.

All prefactors use eps0**2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import CONSTANTS, InvalidInputError, TwoAtomSystem, as_vector3, force_scale
from .green import (
    cross_projected_curl,
    electric_green,
    green_frequency_derivative,
    magnetic_green,
    magnetic_green_dk,
)
from .quadrature import offresonant_integral

__all__ = [
    "Tier",
    "WrongTierError",
    "ForceSample",
    "MIN_V_LEADING",
    "envelope",
    "force_leading_identical",
    "force_closed_A",
    "force_closed_B",
    "net_force",
    "reciprocal_split",
    "full_identical_terms",
    "force_full_identical",
    "full_dissimilar_terms",
    "force_full_dissimilar",
    "force_sample",
]

MIN_V_LEADING = 0.1
# Below this |Delta| * (R/c + 1/omega) the frequency divided difference is
# replaced by the derivative at the midpoint frequency.
_DIVIDED_DIFFERENCE_SWITCH = 1e-5


class Tier(str, Enum):
    LEADING_CLOSED = "LeadingClosed"
    LEADING_COMPOSED = "LeadingComposed"
    FULL_IDENTICAL = "FullIdentical"
    FULL_DISSIMILAR = "FullDissimilar"


class WrongTierError(InvalidInputError):
    """The requested formula tier does not apply to this system."""


@dataclass(frozen=True)
class ForceSample:
    T: float
    F_A: np.ndarray
    F_B: np.ndarray
    F_net: np.ndarray
    F_A_par: float
    F_A_perp: np.ndarray
    F_B_par: float
    F_B_perp: np.ndarray
    formula_tier: Tier

    @classmethod
    def from_forces(cls, T, fa, fb, rhat, tier):
        fa = as_vector3(fa, "F_A")
        fb = as_vector3(fb, "F_B")
        pa = float(fa @ rhat)
        pb = float(fb @ rhat)
        return cls(T, fa, fb, fa + fb, pa, fa - pa * rhat, pb, fb - pb * rhat, Tier(tier))


def envelope(gamma: float, T):
    """Time dependence (1 - Gamma T) e^{-Gamma T} of the leading tier."""
    gt = gamma * np.asarray(T, dtype=float)
    return (1 - gt) * np.exp(-gt)


def _which(which):
    w = str(which).upper()
    if w not in ("A", "B"):
        raise InvalidInputError(f"which must be 'A' or 'B', got {which!r}")
    return w


def _check_T(T):
    if not (math.isfinite(T) and T >= 0):
        raise InvalidInputError("T must be finite and non-negative")


def _require_identical(system: TwoAtomSystem, tier: str):
    if not system.is_identical:
        raise WrongTierError(
            f"{tier} needs identical atoms (Delta_AB = {system.detuning:.3g} rad/s); "
            "use force_full_dissimilar")


def _leading_checks(system, T, tier):
    _require_identical(system, tier)
    _check_T(T)
    if system.v < MIN_V_LEADING:
        raise InvalidInputError(
            f"k0 R = {system.v:.3g} is below {MIN_V_LEADING}; far outside validity")


def _brackets(muA, mub, rhat):
    """``(V_A, V_B)`` with V_A = muA_par mub_perp - (muA_perp.mub_perp) rhat, B symmetric."""
    pa = muA @ rhat
    pb = mub @ rhat
    perpA = muA - pa * rhat
    perpb = mub - pb * rhat
    cross = perpA @ perpb
    return pa * perpb - cross * rhat, pb * perpA - cross * rhat


# -- leading order ---------------------------------------------------------

def force_leading_identical(system: TwoAtomSystem, T: float, which="A") -> np.ndarray:
    """Leading-order force from the composed Green-function expression."""
    _leading_checks(system, T, "force_leading_identical")
    which = _which(which)
    c, eps0, hbar = CONSTANTS.c, CONSTANTS.eps0, CONSTANTS.hbar
    a = system.atomA
    k, w = a.k0, a.omega0
    rhat = system.rhat
    G = electric_green(k, system.separation)
    g = magnetic_green(k, system.R)
    if which == "A":
        M = g.real * G.imag + g.imag * G.real
    else:
        M = g.real * G.imag - g.imag * G.real
    pref = 2 * w**4 * envelope(a.gamma, T) / (-(c**5) * eps0**2 * hbar)
    out = np.zeros(3)
    muA = a.dipoles[0]
    for mub in system.atomB.dipoles:
        VA, VB = _brackets(muA, mub, rhat)
        out += (VA if which == "A" else VB) * (muA @ M @ mub)
    return pref * out


def _closed(system, T, which):
    a = system.atomA
    v = system.v
    rhat = system.rhat
    alpha = np.eye(3) - np.outer(rhat, rhat)
    beta = np.eye(3) - 3 * np.outer(rhat, rhat)
    if which == "A":
        s2, c2 = math.sin(2 * v), math.cos(2 * v)
        M = alpha / v**2 * (s2 + c2 / v) + beta / v**3 * (c2 - 2 * s2 / v - c2 / v**2)
    else:
        M = (beta - alpha) / v**3 + beta / v**5
    mu_ref = float(np.linalg.norm(a.dipoles[0]))
    muA = a.dipoles[0] / mu_ref
    out = np.zeros(3)
    for mub in system.atomB.dipoles:
        mub = mub / mu_ref
        VA, VB = _brackets(muA, mub, rhat)
        out += (VA if which == "A" else VB) * (muA @ M @ mub)
    return -force_scale(a.k0, mu_ref) * envelope(a.gamma, T) * out


def force_closed_A(system: TwoAtomSystem, T: float) -> np.ndarray:
    """Closed form of the leading force on A; oscillates with period pi/k0 in R."""
    _leading_checks(system, T, "force_closed_A")
    return _closed(system, T, "A")


def force_closed_B(system: TwoAtomSystem, T: float) -> np.ndarray:
    """Closed form of the leading force on B; no oscillatory factor."""
    _leading_checks(system, T, "force_closed_B")
    return _closed(system, T, "B")


def net_force(system: TwoAtomSystem, T: float) -> np.ndarray:
    """Net (nonreciprocal) leading force F_A + F_B, evaluated directly."""
    _leading_checks(system, T, "net_force")
    c, eps0, hbar = CONSTANTS.c, CONSTANTS.eps0, CONSTANTS.hbar
    a = system.atomA
    k, w = a.k0, a.omega0
    rhat = system.rhat
    G = electric_green(k, system.separation)
    g = magnetic_green(k, system.R)
    sym = g.real * G.imag
    anti = g.imag * G.real
    pref = 2 * w**4 * envelope(a.gamma, T) / (-(c**5) * eps0**2 * hbar)
    muA = a.dipoles[0]
    out = np.zeros(3)
    for mub in system.atomB.dipoles:
        VA, VB = _brackets(muA, mub, rhat)
        out += (VA + VB) * (muA @ sym @ mub) + (VA - VB) * (muA @ anti @ mub)
    return pref * out


def reciprocal_split(fa, fb):
    """Return ``((fa - fb)/2, fa + fb)``: the action-reaction part and the net push."""
    fa = as_vector3(fa, "fa")
    fb = as_vector3(fb, "fb")
    return (fa - fb) / 2, fa + fb


# -- full formulas ------------------------------------------------------------

def _curl_dw(mu1, mu2, k, rvec, c):
    """d/d omega of ``mu1 x curl G(kR) . mu2`` (complex vector)."""
    r = float(np.linalg.norm(rvec))
    unit_curl = cross_projected_curl(mu1, mu2, k, rvec) / (1j * k * magnetic_green(k, r))
    return 1j / c * (magnetic_green(k, r) + k * magnetic_green_dk(k, r)) * unit_curl


def _sinc_T(delta, T):
    """sin(delta T)/delta, finite at delta = 0."""
    return T * np.sinc(delta * T / math.pi)


def _one_minus_cos_over(delta, T):
    """(1 - cos(delta T))/delta without cancellation."""
    if delta == 0:
        return 0.0
    return 2 * math.sin(0.5 * delta * T) ** 2 / delta


_IDENTICAL_LABELS = ("frequency-derivative", "leading", "quasi-stationary", "off-resonant-quadrature")
_DISSIMILAR_LABELS = ("resonant-cos", "resonant-sin", "quasi-stationary", "off-resonant-quadrature")


def full_identical_terms(system: TwoAtomSystem, T: float, which="A", printed=False) -> dict:
    """Term-by-term identical-atom force, summed over B's sublevels.

    With ``printed=True`` the frequency-derivative term of the force on B
    uses the Re/Im pairing ``dR d(w^2 sI) + dI d(w^2 sR)``; the default uses the
    opposite relative sign, which is the Delta -> 0 limit of the detuned formula.
    """
    _require_identical(system, "force_full_identical")
    _check_T(T)
    which = _which(which)
    c, eps0, hbar = CONSTANTS.c, CONSTANTS.eps0, CONSTANTS.hbar
    a = system.atomA
    k, w, gam = a.k0, a.omega0, a.gamma
    rvec, R, rhat = system.separation, system.R, system.rhat
    p4 = 1 / (c**4 * eps0**2 * hbar)
    p3 = 1 / (c**3 * eps0**2 * hbar)
    e = math.exp(-gam * T)
    G = electric_green(k, rvec)
    dG2 = green_frequency_derivative(k, rvec, 2)
    dG3 = green_frequency_derivative(k, rvec, 3)
    muA = a.dipoles[0]
    terms = {label: np.zeros(3) for label in _IDENTICAL_LABELS}
    for mub in system.atomB.dipoles:
        s = mub @ G @ muA
        Q = offresonant_integral(k, k, R, muA, mub, rhat)
        if which == "A":
            C = cross_projected_curl(muA, mub, k, rvec)
            dC = _curl_dw(muA, mub, k, rvec, c)
            d_w3Cs = dC * w**3 * s + C * (mub @ dG3 @ muA)
            terms["frequency-derivative"] += 2 * gam * e * p4 * d_w3Cs.imag
            terms["leading"] += 2 * w**3 * (1 - gam * T) * e * p4 * (C * s).real
            terms["quasi-stationary"] += -2 * w**2 * gam * e * p4 * (C * s).imag
            terms["off-resonant-quadrature"] += 2 * w * gam * e * p3 * C.imag * Q
        else:
            D = cross_projected_curl(mub, muA, k, rvec)
            ds2 = mub @ dG2 @ muA
            if printed:
                deriv = -2 * gam * w * e * p4 * (D * ds2).imag
            else:
                deriv = 2 * gam * w * e * p4 * (D * np.conj(ds2)).imag
            terms["frequency-derivative"] += deriv
            terms["leading"] += -2 * w**3 * (1 - gam * T) * e * p4 * (D * np.conj(s)).real
            terms["quasi-stationary"] += -2 * w**2 * gam * e * p4 * (D * np.conj(s)).imag
            terms["off-resonant-quadrature"] += 2 * w * gam * e * p3 * D.imag * Q
    return terms


def force_full_identical(system: TwoAtomSystem, T: float, which="A", printed=False) -> np.ndarray:
    """Identical-atom force including all Gamma/omega correction terms."""
    terms = full_identical_terms(system, T, which, printed)
    return sum((terms[label] for label in _IDENTICAL_LABELS), np.zeros(3))


def full_dissimilar_terms(system: TwoAtomSystem, T: float, which="A", printed=False) -> dict:
    """Term-by-term detuned force, summed over B's sublevels.

    The default regroups the resonant terms so that the 2 Delta pieces pair
    with the brackets whose Delta -> 0 limit is the leading identical-atom
    force, and uses twice the printed 1/(omega_A + omega_B) quasi-stationary
    coefficient so that the limit matches ``force_full_identical``.
    ``printed=True`` evaluates the pairings and coefficient as printed.
    """
    _check_T(T)
    which = _which(which)
    delta = system.detuning
    if delta == 0:
        raise WrongTierError("Delta_AB = 0: use force_full_identical")
    c, eps0, hbar = CONSTANTS.c, CONSTANTS.eps0, CONSTANTS.hbar
    a, b = system.atomA, system.atomB
    wA, wB = a.omega0, b.omega0
    kA, kB = wA / c, wB / c
    gA, gb = a.gamma, b.gamma
    gs = gA + gb
    rvec, R, rhat = system.separation, system.R, system.rhat
    p4 = 1 / (c**4 * eps0**2 * hbar)
    p3 = 1 / (c**3 * eps0**2 * hbar)
    eA = math.exp(-gA * T)
    eS = math.exp(-gs * T / 2)
    cos_, sin_ = math.cos(delta * T), math.sin(delta * T)
    sinc_T = _sinc_T(delta, T)
    omc = _one_minus_cos_over(delta, T)
    wm = 0.5 * (wA + wB)
    km = wm / c
    use_derivative = abs(delta) * (R / c + 1 / min(wA, wB)) < _DIVIDED_DIFFERENCE_SWITCH
    quasi_factor = 1.0 if printed else 2.0

    GA, GB = electric_green(kA, rvec), electric_green(kB, rvec)
    if use_derivative:
        dG2m = green_frequency_derivative(km, rvec, 2)
        dG3m = green_frequency_derivative(km, rvec, 3)
        Gm = electric_green(km, rvec)
    muA = a.dipoles[0]
    terms = {label: np.zeros(3) for label in _DISSIMILAR_LABELS}
    for mub in b.dipoles:
        sA, sB = mub @ GA @ muA, mub @ GB @ muA
        Q = offresonant_integral(kA, kB, R, muA, mub, rhat)
        if which == "A":
            CA = cross_projected_curl(muA, mub, kA, rvec)
            CB = cross_projected_curl(muA, mub, kB, rvec)
            hA = wA**3 * (CA * sA).imag
            hB = wB**3 * (CB * sB).imag
            if use_derivative:
                Cm = cross_projected_curl(muA, mub, km, rvec)
                dCm = _curl_dw(muA, mub, km, rvec, c)
                dh = (dCm * wm**3 * (mub @ Gm @ muA) + Cm * (mub @ dG3m @ muA)).imag
            else:
                dh = (hA - hB) / delta
            singular = 2 * gA * eA * dh + hB * (2 * gA * eA - gs * eS) / delta + gs * eS * hB * omc
            YB = wB**3 * (CB * sB).real
            if printed:
                res_cos = singular + 2 * eS * hB * cos_
                res_sin = -eS * YB * (2 * sin_ + gs * sinc_T)
            else:
                res_cos = singular + 2 * eS * YB * cos_
                res_sin = -eS * (2 * hB * sin_ + gs * YB * sinc_T)
            quasi = -quasi_factor * 2 * gA * eA * hA / (wA + wB)
            off = eS * p3 * Q * (
                wB * gs * (CB.imag * cos_ + CB.real * sin_)
                + 2 * wB * delta * (CB.imag * sin_ - CB.real * cos_))
        else:
            DA = cross_projected_curl(mub, muA, kA, rvec)
            g_at_A = (DA * np.conj(wA**2 * sA)).imag
            g_at_B = (DA * np.conj(wB**2 * sB)).imag
            if use_derivative:
                dg = (DA * np.conj(mub @ dG2m @ muA)).imag
            else:
                dg = (g_at_A - g_at_B) / delta
            singular = wA * (2 * gA * eA * dg + g_at_B * (2 * gA * eA - gs * eS) / delta
                             + gs * eS * g_at_B * omc)
            YpB = wB**2 * (DA * np.conj(sB)).real
            if printed:
                res_cos = singular + 2 * wA * eS * g_at_B * cos_
                res_sin = wA * eS * YpB * (2 * sin_ + gs * sinc_T)
            else:
                res_cos = singular - 2 * wA * eS * YpB * cos_
                res_sin = wA * eS * (-2 * g_at_B * sin_ + gs * YpB * sinc_T)
            quasi = -quasi_factor * 2 * wA * gA * eA * g_at_A / (wA + wB)
            off = eS * p3 * Q * (
                wA * gs * (DA.imag * cos_ - DA.real * sin_)
                + 2 * wA * delta * (DA.imag * sin_ + DA.real * cos_))
        terms["resonant-cos"] += p4 * res_cos
        terms["resonant-sin"] += p4 * res_sin
        terms["quasi-stationary"] += p4 * quasi
        terms["off-resonant-quadrature"] += off
    return terms


def force_full_dissimilar(system: TwoAtomSystem, T: float, which="A", printed=False) -> np.ndarray:
    """Detuned-atom force including every resonant, quasi-stationary and quadrature term."""
    terms = full_dissimilar_terms(system, T, which, printed)
    return sum((terms[label] for label in _DISSIMILAR_LABELS), np.zeros(3))


_TIER_ALIASES = {
    "leading": Tier.LEADING_CLOSED,
    "full-identical": Tier.FULL_IDENTICAL,
    "full-dissimilar": Tier.FULL_DISSIMILAR,
}


def force_sample(system: TwoAtomSystem, T: float, tier=Tier.LEADING_CLOSED) -> ForceSample:
    """Forces on both atoms at time ``T`` for the chosen tier."""
    tier = _TIER_ALIASES.get(tier, tier)
    tier = Tier(tier)
    if tier is Tier.LEADING_CLOSED:
        fa, fb = force_closed_A(system, T), force_closed_B(system, T)
    elif tier is Tier.LEADING_COMPOSED:
        fa = force_leading_identical(system, T, "A")
        fb = force_leading_identical(system, T, "B")
    elif tier is Tier.FULL_IDENTICAL:
        fa = force_full_identical(system, T, "A")
        fb = force_full_identical(system, T, "B")
    else:
        fa = force_full_dissimilar(system, T, "A")
        fb = force_full_dissimilar(system, T, "B")
    return ForceSample.from_forces(T, fa, fb, system.rhat, tier)
