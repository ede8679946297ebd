"""Closed-form transmission, reflection and ring coefficients.

Ring coefficients are stored as a complex array ``a[i, mu-1, j-1]`` with
segment ``i`` = 0, 1, 2 for I, II, III. Segment I spans [0, gamma1], II spans
[gamma1, gamma2], III spans [gamma2, 2*pi]. Angles are never reduced mod 2*pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ringpol.ring import DerivedParams, RingGeometry

PI = math.pi

# |y| below this fraction of its largest term is treated as a bound-state resonance
Y_FLOOR = 1e-300


class JunctionResonance(ArithmeticError):
    """The scattering denominator vanishes; transmission is undefined here."""


@dataclass(frozen=True)
class HFunctions:
    h1: tuple[complex, complex]  # h1^(1), h1^(2)
    h2: tuple[complex, complex]
    y: complex
    y_scale: float  # magnitude of the largest term of y

    def scale(self) -> float:
        return max(abs(v) for v in (*self.h1, *self.h2))


@dataclass(frozen=True)
class ScatteringSolution:
    T1: np.ndarray
    T2: np.ndarray
    R: complex  # R_upup = R_downdown; off-diagonals vanish identically
    eta1: float
    eta2: float
    reflect_prob: float
    coeffs: Optional[np.ndarray] = None

    @property
    def eta(self) -> float:
        return self.eta1 + self.eta2

    @property
    def R_matrix(self) -> np.ndarray:
        return self.R * np.eye(2, dtype=complex)

    def T(self, n: int) -> np.ndarray:
        return (self.T1, self.T2)[n - 1]

    def conservation_residual(self) -> float:
        return abs(self.eta1 + self.eta2 + self.reflect_prob - 1.0)


def _y_terms(geom: RingGeometry, d: DerivedParams, ka: float) -> list[complex]:
    g1, g2, q, w = geom.gamma1, geom.gamma2, d.q, d.w
    s, c = math.sin, math.cos
    return [
        1j * ka**3 * (s(2 * q * (PI - g2 + g1)) + s(2 * q * (PI - g1))
                      - s(2 * q * (PI - g2)) - s(2 * q * PI)),
        -2 * q * ka**2 * (c(2 * q * (PI - g2 + g1)) + c(2 * q * (PI - g1))
                          + c(2 * q * (PI - g2)) - c(2 * q * PI)),
        4 * q * ka**2 * c(2 * q * PI),
        -12j * q**2 * ka * s(2 * q * PI),
        8 * q**3 * (c(w * PI) + c(2 * q * PI)),
    ]


def h_functions(geom: RingGeometry, d: DerivedParams, ka: float) -> HFunctions:
    g1, g2, q, w = geom.gamma1, geom.gamma2, d.q, d.w
    s = math.sin
    ewpi = np.exp(-1j * w * PI)
    sin21 = s(q * (g2 - g1))
    h1_1 = -ka * np.exp(0.5j * w * g1) * s(q * (2 * PI - g2)) * sin21
    h1_2 = ka * np.exp(0.5j * w * g2) * ewpi * s(q * g1) * sin21
    h2 = tuple(
        1j * q * np.exp(0.5j * w * g) * (ewpi * s(q * g) - s(q * (2 * PI - g)))
        for g in (g1, g2)
    )
    terms = _y_terms(geom, d, ka)
    return HFunctions(
        h1=(complex(h1_1), complex(h1_2)),
        h2=(complex(h2[0]), complex(h2[1])),
        y=complex(sum(terms)),
        y_scale=max(abs(t) for t in terms),
    )


def _check_y(h: HFunctions) -> None:
    if abs(h.y) < Y_FLOOR * max(1.0, h.y_scale):
        raise JunctionResonance(f"scattering denominator vanishes (|y| = {abs(h.y):.3e})")


def transmission(geom: RingGeometry, d: DerivedParams, ka: float,
                 h: Optional[HFunctions] = None):
    """Return ``(T1, T2, R)``: two 2x2 transmission matrices and the diagonal reflection amplitude."""
    if h is None:
        h = h_functions(geom, d, ka)
    _check_y(h)
    c, s = d.cos_half, d.sin_half
    pref = 8 * d.q * ka / h.y
    Ts = []
    for n, g in ((1, geom.gamma1), (2, geom.gamma2)):
        plus = h.h1[n - 1] + h.h2[n - 1]
        minus = np.conj(h.h1[n - 1] - h.h2[n - 1])
        em, ep = np.exp(-0.5j * g), np.exp(0.5j * g)
        uu = pref * em * (c * c * plus + s * s * minus)
        ud = pref * em * s * c * (plus - minus)
        du = np.exp(1j * g) * ud
        dd = pref * ep * (s * s * plus + c * c * minus)
        Ts.append(np.array([[uu, ud], [du, dd]], dtype=complex))

    g1, g2, q = geom.gamma1, geom.gamma2, d.q
    sn = math.sin
    R = 8 * ka / h.y * (
        -1j * q * q * sn(2 * q * PI)
        + 1j * ka * ka * sn(q * (g2 - g1)) * sn(q * (2 * PI - g2)) * sn(q * g1)
        - q * ka * (sn(q * (2 * PI - g1)) * sn(q * g1) + sn(q * (2 * PI - g2)) * sn(q * g2))
    ) - 1.0
    return Ts[0], Ts[1], complex(R)


def efficiency(T: np.ndarray) -> float:
    """Transmitted probability for unpolarized input: Tr(T rho T^dagger) with rho = I/2."""
    return 0.5 * float(np.sum(np.abs(T) ** 2))


def drive_amplitudes(d: DerivedParams, f: np.ndarray) -> tuple[complex, complex]:
    """Projections d^1, d^2 of the incoming spinor onto the input-junction eigenspinors."""
    c, s = d.cos_half, d.sin_half
    return (2 * d.ka * (c * f[0] + s * f[1]), 2 * d.ka * (s * f[0] - c * f[1]))


def ring_coefficients(geom: RingGeometry, d: DerivedParams, ka: float, f,
                      h: Optional[HFunctions] = None) -> np.ndarray:
    """Closed-form a[i, mu-1, j-1] for incoming spinor ``f`` (need not be normalized)."""
    f = np.asarray(f, dtype=complex)
    if f.shape != (2,) or not np.all(np.isfinite(f)):
        raise ValueError("input spinor must be two finite complex numbers")
    if h is None:
        h = h_functions(geom, d, ka)
    _check_y(h)
    g1, g2, q, w, y = geom.gamma1, geom.gamma2, d.q, d.w, h.y
    sn = math.sin
    dmu = drive_amplitudes(d, f)
    a = np.zeros((3, 2, 2), dtype=complex)
    for mu in (1, 2):
        ac = np.exp(1j * (-1) ** mu * w * PI)
        for j in (1, 2):
            sg = (-1) ** (mu + j)
            e1, e2, e2pi = (np.exp(1j * sg * q * x) for x in (g1, g2, 2 * PI))
            a[0, mu - 1, j - 1] = 2 * dmu[mu - 1] / y * sg * (
                ka * ka * e1 * sn(q * (g2 - g1)) * sn(q * (2 * PI - g2))
                + 1j * q * ka * (e1 * sn(q * (2 * PI - g1)) + e2 * sn(q * (2 * PI - g2)))
                - q * q * (ac + e2pi)
            )
            a[1, mu - 1, j - 1] = 2 * q * dmu[mu - 1] / y * sg * (
                -q * (ac + e2pi)
                + 1j * ka * (e1 * ac * sn(q * g1) + e2 * sn(q * (2 * PI - g2)))
            )
        for j in (1, 2):
            sg = (-1) ** (mu + j)
            other = 3 - j  # partner index j + (-1)^(j+1)
            a[2, mu - 1, j - 1] = (
                (2 * q + sg * ka) * a[1, mu - 1, j - 1]
                + sg * ka * np.exp(2j * sg * q * g2) * a[1, mu - 1, other - 1]
            ) / (2 * q)
    return a


def scatter(geom: RingGeometry, d: DerivedParams, ka: Optional[float] = None,
            f=None) -> ScatteringSolution:
    """Full closed-form solution; ring coefficients are included when ``f`` is given."""
    if ka is None:
        ka = d.ka
    h = h_functions(geom, d, ka)
    T1, T2, R = transmission(geom, d, ka, h)
    coeffs = None if f is None else ring_coefficients(geom, d, ka, f, h)
    return ScatteringSolution(
        T1=T1, T2=T2, R=R,
        eta1=efficiency(T1), eta2=efficiency(T2), reflect_prob=abs(R) ** 2,
        coeffs=coeffs,
    )


def propagate_density(T: np.ndarray, rho_in: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    rho_in = np.asarray(rho_in, dtype=complex)
    if rho_in.shape != (2, 2):
        raise ValueError("density matrix must be 2x2")
    if np.max(np.abs(rho_in - rho_in.conj().T)) > atol:
        raise ValueError("density matrix is not Hermitian")
    evals = np.linalg.eigvalsh(rho_in)
    if evals[0] < -atol or np.trace(rho_in).real > 1.0 + atol:
        raise ValueError("density matrix must be positive semidefinite with trace <= 1")
    T = np.asarray(T, dtype=complex)
    out = T @ rho_in @ T.conj().T
    return 0.5 * (out + out.conj().T)
