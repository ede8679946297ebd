"""Spin-dependent transport through a three-terminal Rashba quantum ring."""

from ringpol.ring import (
    DerivedParams,
    PhysicalContext,
    RingGeometry,
    RingParams,
    derive,
    dimensionless_from_physical,
    eigenspinor,
    spinor,
)
from ringpol.transport import (
    HFunctions,
    JunctionResonance,
    ScatteringSolution,
    h_functions,
    propagate_density,
    ring_coefficients,
    scatter,
    transmission,
)
from ringpol.polarization import PolarizationCase, PolarizationPoint

__version__ = "0.1.0"

__all__ = [
    "DerivedParams",
    "HFunctions",
    "JunctionResonance",
    "PhysicalContext",
    "PolarizationCase",
    "PolarizationPoint",
    "RingGeometry",
    "RingParams",
    "ScatteringSolution",
    "derive",
    "dimensionless_from_physical",
    "eigenspinor",
    "h_functions",
    "propagate_density",
    "ring_coefficients",
    "scatter",
    "spinor",
    "transmission",
]
