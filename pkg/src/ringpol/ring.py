"""Dimensionless ring parameters and the closed-ring eigenproblem.

Indices follow the physics convention throughout: ``mu`` and ``j`` take the
values 1 and 2, and arrays indexed by them are stored in that order.

Spinors are plain complex numpy arrays of shape ``(2,)`` holding the
(up, down) components in the S_z basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants as sc

TWO_PI = 2.0 * math.pi


def spinor(up: complex, down: complex) -> np.ndarray:
    return np.array([up, down], dtype=complex)


@dataclass(frozen=True)
class PhysicalContext:
    """Device constants in SI units: ring radius (m), effective mass (kg), field (V/m)."""

    ring_radius_a: float
    effective_mass: float
    electric_field_Ez: float

    def __post_init__(self):
        for name in ("ring_radius_a", "effective_mass"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        # zero field is allowed: it is the uncoupled reference ring
        if not self.electric_field_Ez >= 0:
            raise ValueError("electric_field_Ez must be non-negative")

    @property
    def hbar_omega(self) -> float:
        """Ring kinetic energy scale hbar*Omega = hbar^2 / (2 m* a^2), in joules."""
        return sc.hbar**2 / (2.0 * self.effective_mass * self.ring_radius_a**2)


@dataclass(frozen=True)
class RingParams:
    so_ratio: float
    ka: float

    def __post_init__(self):
        if not (math.isfinite(self.ka) and self.ka > 0):
            raise ValueError(f"ka must be positive, got {self.ka!r}")
        if not (math.isfinite(self.so_ratio) and self.so_ratio >= 0):
            raise ValueError(f"so_ratio must be non-negative, got {self.so_ratio!r}")


@dataclass(frozen=True)
class RingGeometry:
    """Angular positions of the two output junctions, measured from the input lead."""

    gamma1: float
    gamma2: float

    def __post_init__(self):
        if not (0.0 < self.gamma1 < self.gamma2 < TWO_PI):
            raise ValueError(
                f"need 0 < gamma1 < gamma2 < 2*pi, got ({self.gamma1!r}, {self.gamma2!r})"
            )

    @classmethod
    def symmetric(cls, gamma2: float) -> "RingGeometry":
        return cls(TWO_PI - gamma2, gamma2)


@dataclass(frozen=True)
class DerivedParams:
    so_ratio: float
    ka: float
    w: float
    q: float
    theta: float
    ac_phase: tuple[float, float]
    kappa: np.ndarray = field(repr=False)  # kappa[mu-1, j-1]

    def kap(self, mu: int, j: int) -> float:
        return float(self.kappa[mu - 1, j - 1])

    @property
    def cos_half(self) -> float:
        return math.cos(self.theta / 2.0)

    @property
    def sin_half(self) -> float:
        return math.sin(self.theta / 2.0)

    def energy(self, mu: int, kappa: float) -> float:
        """Closed-ring eigenvalue E_mu(kappa) in units of hbar*Omega."""
        return kappa**2 + (-1) ** mu * kappa * self.w + 0.25

    def energy_ac_form(self, mu: int, kappa: float) -> float:
        """Same eigenvalue written through the Aharonov-Casher phase."""
        phi = self.ac_phase[mu - 1]
        return (kappa - 0.5 - phi / TWO_PI) ** 2 - (self.so_ratio / 2.0) ** 2


def derive(params: RingParams) -> DerivedParams:
    so, ka = params.so_ratio, params.ka
    w = math.sqrt(1.0 + so * so)
    q = math.sqrt((so / 2.0) ** 2 + ka * ka)
    theta = -math.atan(so)
    ac_phase = tuple(-math.pi * (1.0 + (-1) ** mu * w) for mu in (1, 2))
    kappa = np.array(
        [[(-1) ** (mu + 1) * (w / 2.0 + (-1) ** j * q) for j in (1, 2)] for mu in (1, 2)]
    )
    return DerivedParams(so, ka, w, q, theta, ac_phase, kappa)


def spin_part(mu: int, theta: float, phi: float) -> np.ndarray:
    """Local eigenspinor chi^mu(phi) without the orbital factor e^{i kappa phi}."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    em, ep = np.exp(-0.5j * phi), np.exp(0.5j * phi)
    if mu == 1:
        return np.array([em * c, ep * s])
    if mu == 2:
        return np.array([em * s, -ep * c])
    raise ValueError(f"mu must be 1 or 2, got {mu!r}")


def eigenspinor(mu: int, kappa: float, phi: float, theta: float) -> np.ndarray:
    return np.exp(1j * kappa * phi) * spin_part(mu, theta, phi)


def dimensionless_from_physical(ctx: PhysicalContext, energy_E: float) -> RingParams:
    """Convert an SI device description and electron energy to ``RingParams``.

    ``ka = sqrt(E / hbar*Omega)``. The spin-orbit frequency is taken as
    ``omega = e hbar E_z / (2 m*^2 c^2 a)`` (SI, Pauli form), which gives
    ``omega/Omega = e E_z a / (m* c^2)``. Real devices are usually described by
    a Rashba coefficient instead; callers with such a value should build
    ``RingParams`` directly.
    """
    if not energy_E > 0:
        raise ValueError("energy must be positive")
    ka = math.sqrt(energy_E / ctx.hbar_omega)
    so = sc.e * ctx.electric_field_Ez * ctx.ring_radius_a / (ctx.effective_mass * sc.c**2)
    return RingParams(so_ratio=so, ka=ka)


def energy_for_ka(ctx: PhysicalContext, ka: float) -> float:
    return ka * ka * ctx.hbar_omega
