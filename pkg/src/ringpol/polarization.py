"""Perfect-polarization conditions, output spinors and spin textures.

Two sign patterns of ``h1^(n) +/- h2^(n) = 0`` give nonzero transmission at
both outputs:

* ``CaseA``: h1^(1) + h2^(1) = 0 and h1^(2) - h2^(2) = 0
* ``CaseB``: h1^(1) - h2^(1) = 0 and h1^(2) + h2^(2) = 0
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ringpol.oracle import amplitude, wavefunction
from ringpol.ring import DerivedParams, RingGeometry, RingParams, spin_part
from ringpol.transport import HFunctions, h_functions, ring_coefficients

TWO_PI = 2.0 * math.pi
PI = math.pi
EDGE = 1e-12

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class PolarizationCase(enum.Enum):
    A = "a"
    B = "b"

    @property
    def signs(self) -> tuple[int, int]:
        """Signs s_n in h1^(n) + s_n h2^(n) = 0 for n = 1, 2."""
        return (1, -1) if self is PolarizationCase.A else (-1, 1)

    @property
    def trig_sign(self) -> int:
        return 1 if self is PolarizationCase.A else -1

    @classmethod
    def parse(cls, value) -> "PolarizationCase":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass
class PolarizationPoint:
    geom: RingGeometry
    params: RingParams
    case_tag: PolarizationCase
    eta: float  # eta1 + eta2
    eta1: float
    eta2: float
    out_spinor: tuple[np.ndarray, np.ndarray]
    residual: float
    det_norm: tuple[float, float] = (float("nan"), float("nan"))

    @property
    def reflection_loss(self) -> float:
        return 1.0 - self.eta


@dataclass
class TextureSample:
    phi: float
    segment: int
    prob: np.ndarray  # occupation of eigenspinor channels mu = 1, 2
    bloch: np.ndarray
    purity: float
    rho: np.ndarray = field(repr=False)


def sign_pattern_residual(h: HFunctions, s1: int, s2: int) -> float:
    """Normalized size of (h1^(1) + s1 h2^(1), h1^(2) + s2 h2^(2))."""
    scale = h.scale()
    if scale == 0.0:
        return 0.0
    v1 = h.h1[0] + s1 * h.h2[0]
    v2 = h.h1[1] + s2 * h.h2[1]
    return math.sqrt(abs(v1) ** 2 + abs(v2) ** 2) / scale


def condition_residual(geom: RingGeometry, d: DerivedParams, ka: float,
                       case: PolarizationCase) -> float:
    case = PolarizationCase.parse(case)
    return sign_pattern_residual(h_functions(geom, d, ka), *case.signs)


def condition_vector(geom: RingGeometry, d: DerivedParams, ka: float,
                     case: PolarizationCase) -> np.ndarray:
    """Real 4-vector of the normalized case conditions, for least-squares polishing."""
    h = h_functions(geom, d, ka)
    s1, s2 = PolarizationCase.parse(case).signs
    scale = h.scale() or 1.0
    v = np.array([h.h1[0] + s1 * h.h2[0], h.h1[1] + s2 * h.h2[1]]) / scale
    return np.concatenate([v.real, v.imag])


def _pair_residual(lhs_num: float, rhs: float, lhs_den: float) -> float:
    scale = max(abs(lhs_num), abs(rhs), abs(lhs_den), 1e-300)
    return abs(lhs_num * lhs_den - rhs) / scale


def trig_conditions(geom: RingGeometry, d: DerivedParams, ka: float, sign: int):
    """Cross-multiplied residuals of the cos(w pi) and sin(w pi) conditions.

    ``sign=+1`` corresponds to CaseA, ``-1`` to CaseB. Each residual is the
    larger of the two printed equalities, scaled by its largest term.
    """
    g1, g2, q, w = geom.gamma1, geom.gamma2, d.q, d.w
    cw, sw = math.cos(w * PI), math.sin(w * PI)
    return _trig_residuals(g1, g2, q, ka, cw, sign * sw)


def trig_conditions_ac(geom: RingGeometry, d: DerivedParams, ka: float, sign: int, mu: int):
    """Same conditions written through the Aharonov-Casher phase of channel ``mu``."""
    phi = d.ac_phase[mu - 1]
    # cos Phi = -cos(w pi), sin Phi = (-1)^mu sin(w pi)
    return _trig_residuals(geom.gamma1, geom.gamma2, d.q, ka,
                           -math.cos(phi), sign * (-1) ** mu * math.sin(phi))


def _trig_residuals(g1, g2, q, ka, cw, sw_signed):
    s = math.sin
    sg1, sg2 = s(q * g1), s(q * g2)
    sc1, sc2 = s(q * (TWO_PI - g1)), s(q * (TWO_PI - g2))
    s21 = s(q * (g2 - g1))
    res_cos = max(_pair_residual(cw, sc1, sg1), _pair_residual(cw, sg2, sc2))
    k = ka / q
    res_sin = max(_pair_residual(sw_signed, k * sc2 * s21, sg1),
                  _pair_residual(sw_signed, k * sg1 * s21, sc2))
    return res_cos, res_sin


def geometry_family(gamma_fixed: float, which: str, index: int, sign: int, q: float) -> Optional[float]:
    """Free junction angle of a polarizing geometry family, or None if out of range.

    ``which="fix_gamma2"`` returns gamma1 = 2pi - gamma2 + sign*index*pi/q;
    ``which="fix_gamma1"`` returns gamma2 = 2pi - gamma1 + sign*index*pi/q.
    """
    if index < 0:
        raise ValueError("family index must be non-negative")
    if not q > 0:
        raise ValueError("q must be positive")
    angle = TWO_PI - gamma_fixed + sign * index * PI / q
    # angles within EDGE of a boundary count as a degenerate (merged) junction
    if which == "fix_gamma2":
        ok = EDGE < angle < gamma_fixed - EDGE
    elif which == "fix_gamma1":
        ok = gamma_fixed + EDGE < angle < TWO_PI - EDGE
    else:
        raise ValueError(f"unknown family {which!r}")
    return angle if ok else None


def family_geometry(gamma_fixed: float, which: str, index: int, sign: int, q: float) -> Optional[RingGeometry]:
    angle = geometry_family(gamma_fixed, which, index, sign, q)
    if angle is None:
        return None
    if which == "fix_gamma2":
        return RingGeometry(angle, gamma_fixed)
    return RingGeometry(gamma_fixed, angle)


def output_spinors(case: PolarizationCase, geom: RingGeometry, theta: float):
    """Pure output states at leads 1 and 2: the local eigenspinors at the junctions."""
    case = PolarizationCase.parse(case)
    mus = (2, 1) if case is PolarizationCase.A else (1, 2)
    return tuple(spin_part(mu, theta, g) for mu, g in zip(mus, (geom.gamma1, geom.gamma2)))


def normalized_det(T: np.ndarray) -> float:
    """det(T T^dag) / (Tr(T T^dag)/2)^2; zero iff the output is a pure state."""
    M = T @ T.conj().T
    tr = np.trace(M).real
    if tr == 0.0:
        return 0.0
    return float(abs(np.linalg.det(M)) / (0.5 * tr) ** 2)


def dominant_state(T: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(T @ T.conj().T)
    return evecs[:, -1]


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)) ** 2 / (np.vdot(a, a).real * np.vdot(b, b).real))


def bloch_vector(rho: np.ndarray) -> tuple[np.ndarray, float]:
    """Bloch vector and purity Tr(rho_hat^2) of the trace-normalized state."""
    tr = np.trace(rho).real
    if tr <= 0.0:
        return np.zeros(3), float("nan")
    rho_hat = rho / tr
    vec = np.array([np.trace(rho_hat @ s).real for s in SIGMA])
    return vec, float(np.trace(rho_hat @ rho_hat).real)


def segment_of(phi: float, geom: RingGeometry) -> int:
    if not 0.0 <= phi <= TWO_PI:
        raise ValueError(f"phi must lie in [0, 2pi], got {phi!r}")
    if phi <= geom.gamma1:
        return 0
    if phi <= geom.gamma2:
        return 1
    return 2


InputMode = Union[str, Sequence[complex], np.ndarray]


def texture_inputs(mode: InputMode, d: DerivedParams):
    """Constituent pure inputs and their common weight for an input mode."""
    if isinstance(mode, str):
        if mode == "eigen_mixture":
            return [spin_part(1, d.theta, 0.0), spin_part(2, d.theta, 0.0)], 0.5
        if mode == "sz_mixture":
            return [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)], 0.5
        raise ValueError(f"unknown input mode {mode!r}")
    f = np.asarray(mode, dtype=complex)
    if f.shape != (2,):
        raise ValueError("pure input must be a 2-component spinor")
    return [f], 1.0


def spin_texture(geom: RingGeometry, d: DerivedParams, ka: float, input_mode: InputMode,
                 phi_grid) -> list[TextureSample]:
    phis = np.asarray(phi_grid, dtype=float)
    if np.any(phis < 0.0) or np.any(phis > TWO_PI):
        raise ValueError("phi grid must lie within [0, 2pi]")
    inputs, weight = texture_inputs(input_mode, d)
    coeffs = [ring_coefficients(geom, d, ka, f) for f in inputs]
    samples = []
    for phi in phis:
        seg = segment_of(float(phi), geom)
        psis = [wavefunction(a, d, seg, phi) for a in coeffs]
        rho = weight * sum(np.outer(p, p.conj()) for p in psis)
        chis = [spin_part(mu, d.theta, phi) for mu in (1, 2)]
        prob = np.array([max(0.0, np.vdot(c, rho @ c).real / weight) for c in chis])
        vec, purity = bloch_vector(rho)
        samples.append(TextureSample(float(phi), seg, prob, vec, purity, rho))
    return samples


def channel_currents(coeffs: np.ndarray, d: DerivedParams) -> np.ndarray:
    """J[i, mu-1, j-1] = (-1)^(mu+j+1) 2q |a_ij^mu|^2 for every partial wave."""
    J = np.zeros((3, 2, 2))
    for mu in (1, 2):
        for j in (1, 2):
            J[:, mu - 1, j - 1] = (-1) ** (mu + j + 1) * 2 * d.q * np.abs(coeffs[:, mu - 1, j - 1]) ** 2
    return J


def channel_current_direct(coeffs: np.ndarray, d: DerivedParams, segment: int, mu: int, j: int) -> float:
    """|a|^2 [2 kappa + (-1)^mu (cos theta - (omega/Omega) sin theta)], before simplification."""
    a2 = abs(coeffs[segment, mu - 1, j - 1]) ** 2
    return a2 * (2 * d.kap(mu, j) + (-1) ** mu * (math.cos(d.theta) - d.so_ratio * math.sin(d.theta)))


def interference_diagnostics(coeffs: np.ndarray, d: DerivedParams, atol: float = 1e-8) -> dict:
    """Per-segment partial-wave currents and their net value for each channel.

    The two partial waves of a channel circulate in opposite directions, so
    the net channel current ``2q (-1)^mu (|a_i1|^2 - |a_i2|^2)`` is the signed
    sum of the two; it vanishes when their magnitudes are equal.
    """
    J = channel_currents(coeffs, d)
    net = J.sum(axis=2)  # net[i, mu-1]
    vanishing = [(i, mu) for i in range(3) for mu in (1, 2) if abs(net[i, mu - 1]) < atol]
    return {"partial": J, "net": net, "vanishing": vanishing}


def pure_points(geom: RingGeometry, d: DerivedParams, ka: float,
                tol: float = 1e-8) -> list[tuple[float, int, int]]:
    """Angles where one eigen-input channel amplitude |N_i^mu| vanishes.

    |N|^2 = |a1|^2 + |a2|^2 + 2|a1||a2| cos((k1 - k2) phi + arg(a1 a2*)), so its
    minima sit on a lattice of spacing 2pi/|k1 - k2| = pi/q with depth
    (|a1| - |a2|)^2. A minimum counts as a zero when ||a1| - |a2|| is below
    ``tol`` relative to the larger magnitude. Returns sorted ``(phi, segment, mu)``.
    """
    bounds = ((0.0, geom.gamma1), (geom.gamma1, geom.gamma2), (geom.gamma2, TWO_PI))
    found = []
    for mu in (1, 2):
        a = ring_coefficients(geom, d, ka, spin_part(mu, d.theta, 0.0))
        delta = d.kap(mu, 1) - d.kap(mu, 2)
        for seg, (lo, hi) in enumerate(bounds):
            a1, a2 = a[seg, mu - 1, 0], a[seg, mu - 1, 1]
            big = max(abs(a1), abs(a2))
            if big == 0.0 or abs(abs(a1) - abs(a2)) / big >= tol:
                continue
            offset = math.pi - np.angle(a1 * np.conj(a2))
            period = TWO_PI / abs(delta)
            start = offset / delta
            m_lo = math.ceil((lo - start) / period - 1e-12)
            m_hi = math.floor((hi - start) / period + 1e-12)
            for m in range(m_lo, m_hi + 1):
                phi = start + m * period
                if lo - 1e-12 <= phi <= hi + 1e-12:
                    found.append((float(min(max(phi, lo), hi)), seg, mu))
    return sorted(found)
