"""Constants, vector helpers and the two-atom configuration.

Vectors are plain ``numpy`` arrays of shape (3,) and tensors are (3, 3)
arrays; the helpers here only validate and normalise them.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import constants as _sc

__all__ = [
    "Constants",
    "CONSTANTS",
    "InvalidInputError",
    "PerturbativeRegimeWarning",
    "Atom",
    "TwoAtomSystem",
    "DimensionlessGroups",
    "as_vector3",
    "unit",
    "max_asymmetry",
    "decompose_dipole",
    "hydrogen_dipole",
    "hydrogen_atom",
    "hydrogen_preset",
    "dimensionless",
    "with_separation",
    "detuned",
]


class InvalidInputError(ValueError):
    """Input violates a documented precondition."""


class PerturbativeRegimeWarning(UserWarning):
    """Separation below one reduced wavelength (k0 R < 1)."""


@dataclass(frozen=True)
class Constants:
    """CODATA values in SI units."""

    c: float = _sc.c
    hbar: float = _sc.hbar
    eps0: float = _sc.epsilon_0
    e_charge: float = _sc.e
    a0: float = _sc.physical_constants["Bohr radius"][0]
    m_p: float = _sc.m_p
    m_e: float = _sc.m_e

    def __post_init__(self):
        for name in ("c", "hbar", "eps0", "e_charge", "a0", "m_p", "m_e"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"constant {name} must be positive")


CONSTANTS = Constants()


def as_vector3(x, name="vector") -> np.ndarray:
    """Return ``x`` as a finite float array of shape (3,)."""
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise InvalidInputError(f"{name} must have shape (3,), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} has non-finite components")
    return v


def unit(x) -> np.ndarray:
    v = as_vector3(x)
    n = np.linalg.norm(v)
    if n == 0:
        raise InvalidInputError("cannot normalise the zero vector")
    return v / n


def max_asymmetry(t) -> float:
    """Largest entry of ``|t - t.T|``."""
    t = np.asarray(t)
    return float(np.max(np.abs(t - t.T)))


def decompose_dipole(mu, rhat):
    """Split ``mu`` into its projection on ``rhat`` and the orthogonal part.

    Returns ``(mu_par, mu_perp)`` with ``mu_par`` a scalar and ``mu_perp`` a
    vector, so that ``mu_par * rhat + mu_perp == mu``.
    """
    mu = as_vector3(mu, "mu")
    rhat = as_vector3(rhat, "rhat")
    if abs(np.linalg.norm(rhat) - 1.0) > 1e-12:
        raise InvalidInputError("rhat must be a unit vector")
    mu_par = float(mu @ rhat)
    return mu_par, mu - mu_par * rhat


@dataclass(frozen=True)
class Atom:
    """Two-level atom; ``dipoles`` holds one transition dipole per excited sublevel."""

    omega0: float
    gamma: float
    mass: float
    dipoles: tuple = field(default=())

    def __post_init__(self):
        dips = tuple(as_vector3(d, "dipole") for d in self.dipoles)
        for d in dips:
            d.setflags(write=False)
        object.__setattr__(self, "dipoles", dips)
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise InvalidInputError("omega0 must be positive")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise InvalidInputError("gamma must be positive")
        if not self.gamma < self.omega0:
            raise InvalidInputError("gamma must be smaller than omega0")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise InvalidInputError("mass must be positive")
        if not dips:
            raise InvalidInputError("an atom needs at least one dipole")

    @property
    def k0(self) -> float:
        return self.omega0 / CONSTANTS.c

    @property
    def wavelength(self) -> float:
        return 2 * math.pi / self.k0


@dataclass(frozen=True)
class TwoAtomSystem:
    """Atoms A (initially excited) and B; ``separation`` is R_A - R_B."""

    atomA: Atom
    atomB: Atom
    separation: np.ndarray

    def __post_init__(self):
        sep = as_vector3(self.separation, "separation")
        if np.linalg.norm(sep) == 0:
            raise InvalidInputError("separation must be nonzero")
        sep.setflags(write=False)
        object.__setattr__(self, "separation", sep)

    @property
    def R(self) -> float:
        return float(np.linalg.norm(self.separation))

    @property
    def rhat(self) -> np.ndarray:
        return self.separation / self.R

    @property
    def v(self) -> float:
        return self.atomA.k0 * self.R

    @property
    def detuning(self) -> float:
        return self.atomA.omega0 - self.atomB.omega0

    @property
    def is_identical(self) -> bool:
        return self.atomA.omega0 == self.atomB.omega0 and self.atomA.gamma == self.atomB.gamma

    @property
    def perturbative(self) -> bool:
        return self.v >= 1.0

    def check_regime(self) -> bool:
        """Warn when k0 R < 1; returns whether the system is perturbative."""
        if not self.perturbative:
            warnings.warn(
                f"k0*R = {self.v:.3g} < 1 lies outside the perturbative regime",
                PerturbativeRegimeWarning,
                stacklevel=2,
            )
        return self.perturbative


@dataclass(frozen=True)
class DimensionlessGroups:
    v: float
    tau: float
    force_scale: float
    detuning_ratio: float
    k0: float
    gamma0: float

    def __post_init__(self):
        if not (self.force_scale > 0 and self.v > 0 and self.tau >= 0):
            raise InvalidInputError("invalid dimensionless groups")

    def separation_si(self, v=None) -> float:
        return (self.v if v is None else v) / self.k0

    def time_si(self, tau=None) -> float:
        return (self.tau if tau is None else tau) / self.gamma0

    def force_si(self, f):
        return np.asarray(f) * self.force_scale


def force_scale(k0: float, mu: float, const: Constants = CONSTANTS) -> float:
    """k0^6 mu^4 / (8 pi^2 eps0^2 hbar c), in newtons."""
    return k0**6 * mu**4 / (8 * math.pi**2 * const.eps0**2 * const.hbar * const.c)


def dimensionless(system: TwoAtomSystem, T: float = 0.0) -> DimensionlessGroups:
    if not T >= 0:
        raise InvalidInputError("T must be non-negative")
    a = system.atomA
    mu = float(np.linalg.norm(a.dipoles[0]))
    return DimensionlessGroups(
        v=a.k0 * system.R,
        tau=a.gamma * T,
        force_scale=force_scale(a.k0, mu),
        detuning_ratio=system.detuning / a.gamma,
        k0=a.k0,
        gamma0=a.gamma,
    )


HYDROGEN_WAVELENGTH = 121.6e-9
HYDROGEN_LIFETIME = 1.6e-9


def hydrogen_dipole(const: Constants = CONSTANTS) -> float:
    """|<1s| e r |2p>| = (128 sqrt(2) / 243) e a0."""
    return 128 * math.sqrt(2) / 243 * const.e_charge * const.a0


def hydrogen_atom(dipoles) -> Atom:
    return Atom(
        omega0=2 * math.pi * CONSTANTS.c / HYDROGEN_WAVELENGTH,
        gamma=1 / HYDROGEN_LIFETIME,
        mass=CONSTANTS.m_p + CONSTANTS.m_e,
        dipoles=tuple(dipoles),
    )


def hydrogen_preset(R: float) -> TwoAtomSystem:
    """Two hydrogen atoms a distance ``R`` apart on the z axis.

    A is excited to (2p_x + 2p_z)/sqrt(2); B carries the three 2p sublevels.
    B sits at +R z relative to A, so R_A - R_B = -R z.
    """
    if not (math.isfinite(R) and R > 0):
        raise InvalidInputError("R must be positive")
    mu = hydrogen_dipole()
    a = hydrogen_atom([mu * np.array([1.0, 0.0, 1.0]) / math.sqrt(2)])
    b = hydrogen_atom(mu * np.eye(3))
    return TwoAtomSystem(a, b, np.array([0.0, 0.0, -R]))


def with_separation(system: TwoAtomSystem, R: float) -> TwoAtomSystem:
    """Same atoms and axis, new distance ``R``."""
    if not (math.isfinite(R) and R > 0):
        raise InvalidInputError("R must be positive")
    return TwoAtomSystem(system.atomA, system.atomB, system.rhat * R)


def detuned(system: TwoAtomSystem, delta: float) -> TwoAtomSystem:
    """Split the common frequency symmetrically so that omega_A - omega_B = delta."""
    w = 0.5 * (system.atomA.omega0 + system.atomB.omega0)
    a = Atom(w + delta / 2, system.atomA.gamma, system.atomA.mass, system.atomA.dipoles)
    b = Atom(w - delta / 2, system.atomB.gamma, system.atomB.mass, system.atomB.dipoles)
    return TwoAtomSystem(a, b, system.separation)
