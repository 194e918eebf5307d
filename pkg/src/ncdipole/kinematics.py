"""Momentum transfer and displacements driven by the leading-order forces.

The separation is frozen during the motion (displacements are ~fm against
~100 nm separations), so the leading force factorises into a fixed spatial
vector times the envelope (1 - Gamma t) e^{-Gamma t}.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import bisect

from .core import (
    InvalidInputError,
    TwoAtomSystem,
    dimensionless,
    hydrogen_preset,
    with_separation,
)
from .forces import envelope, force_closed_A, force_closed_B
from .quadrature import adaptive_integrate, integrate_to_infinity

__all__ = [
    "Convention",
    "DisplacementCurve",
    "RootNotFoundError",
    "shape_A",
    "shape_B",
    "leading_force",
    "longitudinal_momentum",
    "displacement",
    "displacement_coefficients",
    "hydrogen_displacement_curve",
    "same_direction_threshold",
]

_REL_TOL = 1e-12


class Convention(str, Enum):
    TRUNCATE_AT_LIFETIME = "truncate"
    FULL_DECAY = "full-decay"


class RootNotFoundError(RuntimeError):
    pass


def shape_A(v):
    """[(2v^2 - 1) cos 2v - (2v - v^3) sin 2v] / v^5."""
    v = np.asarray(v, dtype=float)
    return ((2 * v**2 - 1) * np.cos(2 * v) - (2 * v - v**3) * np.sin(2 * v)) / v**5


def shape_B(v):
    """-(1 + v^2) / v^5."""
    v = np.asarray(v, dtype=float)
    return -(1 + v**2) / v**5


def leading_force(system: TwoAtomSystem, which) -> np.ndarray:
    """Spatial factor of the leading force, i.e. its value at T = 0."""
    w = str(which).upper()
    if w == "A":
        return force_closed_A(system, 0.0)
    if w == "B":
        return force_closed_B(system, 0.0)
    raise InvalidInputError(f"which must be 'A' or 'B', got {which!r}")


def _integrate_vector(profile, a, b):
    out = np.empty(3)
    for i in range(3):
        out[i] = adaptive_integrate(lambda t, i=i: _component(profile, t, i), a, b, _REL_TOL).value
    return out


def _component(profile, t, i):
    return np.array([profile(x)[i] for x in np.atleast_1d(t)])


def _envelope_impulse(gamma, T):
    """Integral of the envelope over [0, T] (T may be inf)."""
    f = lambda t: envelope(gamma, t)
    if math.isinf(T):
        return integrate_to_infinity(f, 0.0, 10 / gamma, _REL_TOL).value
    if T == 0:
        return 0.0
    return adaptive_integrate(f, 0.0, T, _REL_TOL).value


def _envelope_kernel(gamma, T):
    """Double time integral of the envelope, int_0^T (T - t) env(t) dt (T may be inf)."""
    if math.isinf(T):
        # (T - t) kernel -> -t once the velocity has decayed.
        f = lambda t: -t * envelope(gamma, t)
        return integrate_to_infinity(f, 0.0, 10 / gamma, _REL_TOL).value
    if T == 0:
        return 0.0
    return adaptive_integrate(lambda t: (T - t) * envelope(gamma, t), 0.0, T, _REL_TOL).value


def longitudinal_momentum(system: TwoAtomSystem, T: float, which="A") -> np.ndarray:
    """Change of the longitudinal EM momentum partner, -int_0^T F(t) dt (kg m/s)."""
    if not T >= 0:
        raise InvalidInputError("T must be non-negative")
    return -leading_force(system, which) * _envelope_impulse(system.atomA.gamma, T)


def displacement(system: TwoAtomSystem, T_final: float | None = None, which="A",
                 convention=Convention.TRUNCATE_AT_LIFETIME, force_profile=None) -> np.ndarray:
    """Centre-of-mass displacement S(T) = (1/m) int_0^T dt int_0^t F(t') dt'.

    ``convention`` picks the end time when ``T_final`` is None: one lifetime
    (truncate) or the T -> inf limit (full-decay).  ``force_profile`` replaces
    the leading force by an arbitrary ``t -> vector`` callable.
    """
    convention = Convention(convention)
    w = str(which).upper()
    gamma = system.atomA.gamma
    mass = (system.atomA if w == "A" else system.atomB).mass
    if T_final is None:
        T_final = 1 / gamma if convention is Convention.TRUNCATE_AT_LIFETIME else math.inf
    if not T_final > 0:
        raise InvalidInputError("T_final must be positive")
    if force_profile is not None:
        if math.isinf(T_final):
            raise InvalidInputError("a custom force profile needs a finite T_final")
        return _integrate_vector(lambda t: (T_final - t) * np.asarray(force_profile(t)),
                                 0.0, T_final) / mass
    return leading_force(system, w) * _envelope_kernel(gamma, T_final) / mass


def displacement_coefficients(convention=Convention.TRUNCATE_AT_LIFETIME, R_ref: float = 100e-9):
    """Prefactors (C_A, C_B) in metres with S_A,x = C_A f_A(v), S_B,x = C_B f_B(v).

    Hydrogen geometry: the transverse sums reduce to F_A,x = F0 f_A / 2 and
    F_B,x = F0 f_B with F0 the force scale.
    """
    system = hydrogen_preset(R_ref)
    groups = dimensionless(system)
    gamma = system.atomA.gamma
    T = 1 / gamma if Convention(convention) is Convention.TRUNCATE_AT_LIFETIME else math.inf
    base = groups.force_scale * _envelope_kernel(gamma, T) / system.atomA.mass
    return base / 2, base


@dataclass(frozen=True)
class DisplacementCurve:
    v_grid: np.ndarray
    S_A: np.ndarray
    S_B: np.ndarray
    convention: Convention
    shape_A: np.ndarray
    shape_B: np.ndarray
    coefficient_A: float
    coefficient_B: float
    perturbative: np.ndarray

    @property
    def R_grid(self):
        return self.v_grid / hydrogen_preset(1.0).atomA.k0


def hydrogen_displacement_curve(v_grid, convention=Convention.TRUNCATE_AT_LIFETIME,
                                workers: int = 1) -> DisplacementCurve:
    """Transverse displacements of a hydrogen pair over a grid of k0 R values."""
    v = np.asarray(v_grid, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError("v_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(v) <= 0):
        raise InvalidInputError("v_grid must be strictly increasing")
    if v[0] < 1 or v[-1] > 100:
        raise InvalidInputError("v_grid must lie within [1, 100]")
    convention = Convention(convention)
    base = hydrogen_preset(1.0)
    k0, gamma = base.atomA.k0, base.atomA.gamma
    T = 1 / gamma if convention is Convention.TRUNCATE_AT_LIFETIME else math.inf
    kernel = _envelope_kernel(gamma, T)
    mA, mB = base.atomA.mass, base.atomB.mass

    def row(x):
        s = with_separation(base, x / k0)
        return leading_force(s, "A") * kernel / mA, leading_force(s, "B") * kernel / mB

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(row, v))
    else:
        rows = [row(x) for x in v]
    cA, cB = displacement_coefficients(convention)
    return DisplacementCurve(
        v_grid=v,
        S_A=np.array([r[0] for r in rows]),
        S_B=np.array([r[1] for r in rows]),
        convention=convention,
        shape_A=shape_A(v),
        shape_B=shape_B(v),
        coefficient_A=cA,
        coefficient_B=cB,
        perturbative=v >= 1,
    )


def same_direction_threshold(system: TwoAtomSystem | None = None, v_lo: float = 1.0,
                             v_hi: float = 5.0, xtol: float = 1e-10, scan_points: int = 400) -> float:
    """Smallest R above 1/k0 where the transverse displacements of A and B stop sharing a sign.

    The sign of S_B never changes, so this is the first zero of S_A,x.  The
    bracket is scanned for the first sign change, then bisected in v.
    """
    base = hydrogen_preset(1.0) if system is None else system
    k0 = base.atomA.k0
    axis = base.atomA.dipoles[0] - (base.atomA.dipoles[0] @ base.rhat) * base.rhat
    axis = axis / np.linalg.norm(axis)

    def product(v):
        s = with_separation(base, v / k0)
        return float(leading_force(s, "A") @ axis) * float(leading_force(s, "B") @ axis)

    grid = np.linspace(v_lo, v_hi, scan_points)
    vals = np.array([product(x) for x in grid])
    idx = np.nonzero(np.sign(vals[1:]) != np.sign(vals[:-1]))[0]
    if idx.size == 0:
        raise RootNotFoundError(f"no sign change of S_A * S_B for v in [{v_lo}, {v_hi}]")
    i = idx[0]
    v_star = bisect(product, grid[i], grid[i + 1], xtol=xtol)
    return v_star / k0
