"""Brute-force boundary-value solver for the three-terminal ring.

Builds the 12 matching equations (wave-function continuity plus Griffith
current conditions at all three junctions) and solves them numerically. The
result is the reference the closed forms in :mod:`ringpol.transport` are
checked against, so nothing here imports from that module's formulas.

Unknown ordering: ``index = (mu-1)*6 + i*2 + (j-1)`` with segment ``i`` in
{0: I, 1: II, 2: III}. Rows use the same mu-major layout, which makes the
matrix literally block diagonal with two 6x6 blocks.

Within one mu channel every partial wave shares the local spinor chi^mu(phi),
so the spinor matching conditions at a junction reduce to scalar conditions
on N^mu(phi) = sum_j a_j^mu exp(i kappa_j^mu phi). With phi the outward
coordinate for segment starts and -phi for segment ends, each junction gives

    continuity:  N_left(g) = N_right(g)
    current:     ka * N_lead + (-i d/dphi)(N_right - N_left) = 0

and at the input junction N_III(2pi) carries an extra sign from chi(2pi) = -chi(0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ringpol.ring import DerivedParams, RingGeometry, spin_part
from ringpol.transport import JunctionResonance

TWO_PI = 2.0 * math.pi
COND_LIMIT = 1e12


def unknown_index(i: int, mu: int, j: int) -> int:
    return (mu - 1) * 6 + i * 2 + (j - 1)


@dataclass
class JunctionSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    geom: RingGeometry
    derived: DerivedParams
    ka: float
    f: np.ndarray

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.matrix))


@dataclass
class OracleSolution:
    coeffs: np.ndarray  # a[i, mu-1, j-1]
    r: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    residual: float
    condition: float


def assemble(geom: RingGeometry, d: DerivedParams, ka: float, f) -> JunctionSystem:
    f = np.asarray(f, dtype=complex)
    c, s = d.cos_half, d.sin_half
    # projections of f on chi^mu(0), times 2ka
    drive = (2 * ka * (c * f[0] + s * f[1]), 2 * ka * (s * f[0] - c * f[1]))

    A = np.zeros((12, 12), dtype=complex)
    b = np.zeros(12, dtype=complex)
    I, II, III = 0, 1, 2
    for mu in (1, 2):
        r0 = (mu - 1) * 6
        for j in (1, 2):
            k = d.kap(mu, j)
            col = lambda seg: unknown_index(seg, mu, j)  # noqa: E731
            e2pi = np.exp(1j * k * TWO_PI)
            # input junction at phi = 0 == 2*pi
            A[r0, col(I)] = 1.0
            A[r0, col(III)] = e2pi
            A[r0 + 1, col(I)] = ka + k
            A[r0 + 1, col(III)] = k * e2pi
            # output junctions: (left segment, right segment, angle)
            for row, left, right, g in ((r0 + 2, I, II, geom.gamma1),
                                        (r0 + 4, II, III, geom.gamma2)):
                e = np.exp(1j * k * g)
                A[row, col(left)] = e
                A[row, col(right)] = -e
                A[row + 1, col(right)] = (ka + k) * e
                A[row + 1, col(left)] = -k * e
        b[r0 + 1] = drive[mu - 1]
    return JunctionSystem(A, b, geom, d, ka, f)


def _solve_refined(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.linalg.solve(A, b)
    return x + np.linalg.solve(A, b - A @ x)


def solve(system: JunctionSystem) -> OracleSolution:
    cond = system.condition
    if not cond < COND_LIMIT:
        raise JunctionResonance(f"junction system is singular (cond = {cond:.3e})")
    A, b = system.matrix, system.rhs
    x = _solve_refined(A, b)
    bn = np.linalg.norm(b)
    residual = float(np.linalg.norm(A @ x - b) / bn) if bn > 0 else float(np.linalg.norm(A @ x))

    coeffs = np.zeros((3, 2, 2), dtype=complex)
    for i in range(3):
        for mu in (1, 2):
            for j in (1, 2):
                coeffs[i, mu - 1, j - 1] = x[unknown_index(i, mu, j)]

    d, g = system.derived, system.geom
    r = wavefunction(coeffs, d, 0, 0.0) - system.f
    t1 = wavefunction(coeffs, d, 1, g.gamma1)
    t2 = wavefunction(coeffs, d, 1, g.gamma2)
    return OracleSolution(coeffs, r, t1, t2, residual, cond)


def solve_for(geom: RingGeometry, d: DerivedParams, ka: float, f) -> OracleSolution:
    return solve(assemble(geom, d, ka, f))


def transmission_matrices(geom: RingGeometry, d: DerivedParams, ka: float):
    """Oracle ``(T1, T2, R)`` built column by column from S_z basis inputs."""
    T1 = np.zeros((2, 2), dtype=complex)
    T2 = np.zeros((2, 2), dtype=complex)
    R = np.zeros((2, 2), dtype=complex)
    for col, f in enumerate(((1.0, 0.0), (0.0, 1.0))):
        sol = solve_for(geom, d, ka, f)
        T1[:, col], T2[:, col], R[:, col] = sol.t1, sol.t2, sol.r
    return T1, T2, R


def amplitude(coeffs: np.ndarray, d: DerivedParams, segment: int, mu: int, phi: float) -> complex:
    """Spatial amplitude N_i^mu(phi) of eigenspinor channel mu."""
    return complex(sum(coeffs[segment, mu - 1, j - 1] * np.exp(1j * d.kap(mu, j) * phi)
                       for j in (1, 2)))


def wavefunction(coeffs: np.ndarray, d: DerivedParams, segment: int, phi: float) -> np.ndarray:
    return sum(amplitude(coeffs, d, segment, mu, phi) * spin_part(mu, d.theta, phi)
               for mu in (1, 2))


def wavefunction_deriv(coeffs: np.ndarray, d: DerivedParams, segment: int, phi: float) -> np.ndarray:
    """d Psi_i / d phi, differentiating each partial wave component-wise."""
    out = np.zeros(2, dtype=complex)
    c, s = d.cos_half, d.sin_half
    for mu in (1, 2):
        u, v = (c, s) if mu == 1 else (s, -c)
        for j in (1, 2):
            a = coeffs[segment, mu - 1, j - 1]
            k = d.kap(mu, j)
            out[0] += a * 1j * (k - 0.5) * np.exp(1j * (k - 0.5) * phi) * u
            out[1] += a * 1j * (k + 0.5) * np.exp(1j * (k + 0.5) * phi) * v
    return out


def griffith_residuals(sol: OracleSolution, d: DerivedParams, geom: RingGeometry,
                       ka: float, f) -> dict[str, float]:
    """Residuals of the full spinor matching conditions, per junction.

    These use the unreduced conditions (spinor continuity and the derivative
    balance), so they check the reduced rows of :func:`assemble` as well as
    the solve. Values are scaled by ``(1 + ka) * |f|``.
    """
    f = np.asarray(f, dtype=complex)
    scale = (1.0 + ka) * max(np.linalg.norm(f), 1e-300)
    a = sol.coeffs
    psi = lambda i, p: wavefunction(a, d, i, p)  # noqa: E731
    dpsi = lambda i, p: wavefunction_deriv(a, d, i, p)  # noqa: E731
    out = {}
    res3 = [
        psi(0, 0.0) - (f + sol.r),
        psi(2, TWO_PI) - (f + sol.r),
        1j * ka * (f - sol.r) - dpsi(0, 0.0) + dpsi(2, TWO_PI),
    ]
    out["junction3"] = max(float(np.max(np.abs(v))) for v in res3) / scale
    for name, left, right, g, t in (("junction1", 0, 1, geom.gamma1, sol.t1),
                                    ("junction2", 1, 2, geom.gamma2, sol.t2)):
        res = [
            psi(left, g) - t,
            psi(right, g) - t,
            1j * ka * t - dpsi(left, g) + dpsi(right, g),
        ]
        out[name] = max(float(np.max(np.abs(v))) for v in res) / scale
    return out


def lead_current(psi_plus, psi_minus, ka: float) -> float:
    """Normalized lead current 2ka(|psi+|^2 - |psi-|^2) for plane-wave amplitudes."""
    pp = np.asarray(psi_plus, dtype=complex)
    pm = np.asarray(psi_minus, dtype=complex)
    return float(2.0 * ka * (np.vdot(pp, pp).real - np.vdot(pm, pm).real))


def ring_current(coeffs: np.ndarray, d: DerivedParams, segment: int, phi: float) -> float:
    """Spin current density 2 Re[Psi^dag ((omega/2Omega) sigma_r - i d/dphi) Psi] in a segment."""
    psi = wavefunction(coeffs, d, segment, phi)
    dpsi = wavefunction_deriv(coeffs, d, segment, phi)
    sigma_r = np.array([[0.0, np.exp(-1j * phi)], [np.exp(1j * phi), 0.0]])
    op = 0.5 * d.so_ratio * (sigma_r @ psi) - 1j * dpsi
    return float(2.0 * np.vdot(psi, op).real)


def junction_balances(sol: OracleSolution, d: DerivedParams, geom: RingGeometry,
                      ka: float, f) -> dict[str, float]:
    """Current balance at each junction: lead current minus net ring current."""
    a = sol.coeffs
    J = lambda i, p: ring_current(a, d, i, p)  # noqa: E731
    zero = np.zeros(2, dtype=complex)
    return {
        "junction3": lead_current(f, sol.r, ka) - (J(0, 0.0) - J(2, TWO_PI)),
        "junction1": lead_current(sol.t1, zero, ka) - (J(0, geom.gamma1) - J(1, geom.gamma1)),
        "junction2": lead_current(sol.t2, zero, ka) - (J(1, geom.gamma2) - J(2, geom.gamma2)),
    }
