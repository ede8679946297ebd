"""Parameter sweeps and perfect-polarization root finding.

A sweep walks one variable (``ka``, ``so_ratio`` or ``gamma2``) over a
uniform grid, optionally moving gamma1 along a polarizing family
``gamma1 = 2pi - gamma2 + sign*m*pi/q``. Root finding works in two stages:

1. local dips of the non-negative case residual on the grid are refined by
   golden-section search in the sweep variable;
2. each dip is polished by least squares on the complex case conditions over
   the sweep variable and a companion variable (``so_ratio`` for ``ka`` and
   ``gamma2`` sweeps, ``ka`` for ``so_ratio`` sweeps).

The second stage is needed because the conditions are two real equations:
along a one-parameter line they generically have near misses, not zeros,
and parameter values rounded to a few digits are only seeds.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from ringpol.polarization import (
    PolarizationCase,
    PolarizationPoint,
    condition_residual,
    condition_vector,
    dominant_state,
    family_geometry,
    fidelity,
    normalized_det,
    output_spinors,
)
from ringpol.ring import RingGeometry, RingParams, derive
from ringpol.transport import JunctionResonance, scatter

DEFAULT_SAMPLES = 2000
VARIABLES = ("ka", "so_ratio", "gamma2")
COMPANION = {"ka": "so_ratio", "gamma2": "so_ratio", "so_ratio": "ka"}


@dataclass(frozen=True)
class Family:
    index: int
    sign: int = -1
    which: str = "fix_gamma2"

    def __post_init__(self):
        if self.index < 0 or self.sign not in (-1, 1):
            raise ValueError("family needs a non-negative index and sign +/-1")
        if self.which not in ("fix_gamma2", "fix_gamma1"):
            raise ValueError(f"unknown family kind {self.which!r}")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    lo: float
    hi: float
    samples: int = DEFAULT_SAMPLES
    family: Optional[Family] = None  # None keeps the base geometry fixed
    case: PolarizationCase = PolarizationCase.A

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ValueError(f"sweep variable must be one of {VARIABLES}")
        if not self.lo < self.hi:
            raise ValueError("sweep range needs lo < hi")
        if self.samples < 2:
            raise ValueError("sweep needs at least 2 samples")
        object.__setattr__(self, "case", PolarizationCase.parse(self.case))


@dataclass
class SweepRow:
    value: float
    gamma1: float
    gamma2: float
    so_ratio: float
    ka: float
    eta1: float
    eta2: float
    reflect_prob: float
    residual_a: float
    residual_b: float
    status: str = "ok"  # ok | invalid_geometry | resonance

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def residual(self, case: PolarizationCase) -> float:
        return self.residual_a if case is PolarizationCase.A else self.residual_b


COLUMNS = ("value", "gamma1", "gamma2", "so_ratio", "ka", "eta1", "eta2",
           "reflect_prob", "residual_a", "residual_b", "status")


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[SweepRow]
    lo: float  # bounds actually sampled after clipping
    hi: float
    clipped: bool = False
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def thread_count() -> int:
    raw = os.environ.get("RINGPOL_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def configure(spec: SweepSpec, base_geom: RingGeometry, base_params: RingParams,
              value: float, companion: Optional[float] = None):
    """Geometry and parameters at one sweep value; geometry is None when invalid."""
    so, ka, g1, g2 = base_params.so_ratio, base_params.ka, base_geom.gamma1, base_geom.gamma2
    if spec.variable == "ka":
        ka = value
    elif spec.variable == "so_ratio":
        so = value
    else:
        g2 = value
    if companion is not None:
        if COMPANION[spec.variable] == "so_ratio":
            so = companion
        else:
            ka = companion
    if not (ka > 0 and so >= 0):
        return None, None
    params = RingParams(so_ratio=so, ka=ka)
    if spec.family is None:
        if not 0.0 < g1 < g2 < 2 * math.pi:
            return None, params
        return RingGeometry(g1, g2), params
    q = derive(params).q
    fixed = g2 if spec.family.which == "fix_gamma2" else g1
    geom = family_geometry(fixed, spec.family.which, spec.family.index, spec.family.sign, q)
    return geom, params


def _valid(spec, base_geom, base_params, value) -> bool:
    geom, _ = configure(spec, base_geom, base_params, value)
    return geom is not None


def clip_range(spec: SweepSpec, base_geom: RingGeometry, base_params: RingParams,
               probe: int = 4001) -> tuple[float, float]:
    """Largest contiguous valid sub-interval of [lo, hi], edges bisected to ~1e-12.

    Raises ``ValueError`` if no sampled value yields a valid geometry.
    """
    grid = np.linspace(spec.lo, spec.hi, probe)
    ok = np.array([_valid(spec, base_geom, base_params, v) for v in grid])
    if not ok.any():
        raise ValueError("no valid geometry anywhere in the sweep range")
    # longest run of valid samples
    best, start = (0, 0), None
    for k, flag in enumerate(np.append(ok, False)):
        if flag and start is None:
            start = k
        elif not flag and start is not None:
            if k - start > best[1] - best[0]:
                best = (start, k)
            start = None
    i0, i1 = best[0], best[1] - 1

    def edge(good, bad):
        for _ in range(200):
            mid = 0.5 * (good + bad)
            if mid in (good, bad):
                break
            if _valid(spec, base_geom, base_params, mid):
                good = mid
            else:
                bad = mid
            if abs(good - bad) < 1e-12 * max(1.0, abs(good)):
                break
        return good

    lo = grid[i0] if i0 == 0 else edge(grid[i0], grid[i0 - 1])
    hi = grid[i1] if i1 == probe - 1 else edge(grid[i1], grid[i1 + 1])
    if not lo < hi:
        raise ValueError("valid part of the sweep range is degenerate")
    return float(lo), float(hi)


def evaluate(spec: SweepSpec, base_geom: RingGeometry, base_params: RingParams,
             value: float, companion: Optional[float] = None) -> SweepRow:
    geom, params = configure(spec, base_geom, base_params, value, companion)
    nan = float("nan")
    so = params.so_ratio if params else nan
    ka = params.ka if params else nan
    if geom is None:
        return SweepRow(value, nan, nan, so, ka, nan, nan, nan, nan, nan, "invalid_geometry")
    d = derive(params)
    try:
        sol = scatter(geom, d)
    except JunctionResonance:
        return SweepRow(value, geom.gamma1, geom.gamma2, so, ka, nan, nan, nan, nan, nan, "resonance")
    return SweepRow(
        value, geom.gamma1, geom.gamma2, so, ka,
        sol.eta1, sol.eta2, sol.reflect_prob,
        condition_residual(geom, d, ka, PolarizationCase.A),
        condition_residual(geom, d, ka, PolarizationCase.B),
    )


def sweep(spec: SweepSpec, base_geom: RingGeometry, base_params: RingParams,
          clip: bool = True) -> SweepResult:
    """Evaluate transmission and both case residuals on a uniform grid.

    Family sweeps are clipped to the valid part of the range first; rows that
    still fall outside (or hit a resonance) are kept with a status flag.
    """
    lo, hi = spec.lo, spec.hi
    clipped = False
    if clip and spec.family is not None:
        lo, hi = clip_range(spec, base_geom, base_params)
        clipped = (lo, hi) != (spec.lo, spec.hi)
    values = np.linspace(lo, hi, spec.samples)
    work = lambda v: evaluate(spec, base_geom, base_params, float(v))  # noqa: E731
    threads = thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, values))
    else:
        rows = [work(v) for v in values]
    if not any(r.ok for r in rows):
        raise ValueError("sweep produced no valid rows")
    meta = {"requested": [spec.lo, spec.hi], "sampled": [lo, hi], "clipped": clipped,
            "samples": spec.samples}
    return SweepResult(spec, rows, lo, hi, clipped, meta)


def _dips(residuals: np.ndarray) -> list[int]:
    out = []
    for k in range(1, len(residuals) - 1):
        r0, r1, r2 = residuals[k - 1], residuals[k], residuals[k + 1]
        if np.isfinite([r0, r1, r2]).all() and r1 < r0 and r1 <= r2:
            out.append(k)
    return out


def _residual_at(spec, base_geom, base_params, value, companion=None) -> float:
    geom, params = configure(spec, base_geom, base_params, value, companion)
    if geom is None:
        return float("inf")
    return condition_residual(geom, derive(params), params.ka, spec.case)


def _polish(spec, base_geom, base_params, value, companion0):
    """Least-squares solve of the case conditions in (variable, companion)."""
    bad = np.full(4, 10.0)

    def fun(x):
        geom, params = configure(spec, base_geom, base_params, x[0], x[1])
        if geom is None:
            return bad
        return condition_vector(geom, derive(params), params.ka, spec.case)

    sol = least_squares(fun, [value, companion0], method="lm",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
    return float(sol.x[0]), float(sol.x[1])


def _companion_value(spec, base_params) -> float:
    return base_params.so_ratio if COMPANION[spec.variable] == "so_ratio" else base_params.ka


def build_point(spec: SweepSpec, geom: RingGeometry, params: RingParams) -> PolarizationPoint:
    d = derive(params)
    sol = scatter(geom, d)
    out = output_spinors(spec.case, geom, d.theta)
    return PolarizationPoint(
        geom=geom, params=params, case_tag=spec.case,
        eta=sol.eta, eta1=sol.eta1, eta2=sol.eta2, out_spinor=out,
        residual=condition_residual(geom, d, params.ka, spec.case),
        det_norm=(normalized_det(sol.T1), normalized_det(sol.T2)),
    )


def refine_point(spec: SweepSpec, base_geom: RingGeometry, base_params: RingParams,
                 value: float, companion: Optional[float] = None,
                 max_companion_shift: float = 0.1) -> Optional[PolarizationPoint]:
    """Polish one seed into a root; None if it drifts too far or leaves the valid region."""
    c0 = _companion_value(spec, base_params) if companion is None else companion
    v, c = _polish(spec, base_geom, base_params, value, c0)
    if abs(c - c0) > max_companion_shift:
        return None
    geom, params = configure(spec, base_geom, base_params, v, c)
    if geom is None:
        return None
    try:
        return build_point(spec, geom, params)
    except JunctionResonance:
        return None


def _accept(point: PolarizationPoint, tol: float) -> bool:
    if not point.residual < tol:
        return False
    if max(point.det_norm) >= max(tol, 1e-8):
        return False
    d = derive(point.params)
    sol = scatter(point.geom, d)
    if min(point.eta1, point.eta2) <= 0.0:
        return False
    fids = [fidelity(dominant_state(T), v) for T, v in zip((sol.T1, sol.T2), point.out_spinor)]
    return min(fids) > 1.0 - max(tol, 1e-8)


def _sweep_value(spec: SweepSpec, point: PolarizationPoint) -> float:
    if spec.variable == "ka":
        return point.params.ka
    if spec.variable == "so_ratio":
        return point.params.so_ratio
    return point.geom.gamma2


def find_polarization_points(spec: SweepSpec, base_geom: RingGeometry, base_params: RingParams,
                             tol: float = 1e-8, result: Optional[SweepResult] = None,
                             polish: bool = True, max_companion_shift: float = 0.1
                             ) -> list[PolarizationPoint]:
    """Perfect-polarization points seeded by residual dips along the sweep.

    With ``polish=False`` only the golden-section stage runs and the companion
    variable stays at its base value.
    """
    if result is None:
        result = sweep(spec, base_geom, base_params)
    values = result.column("value")
    res = np.array([r.residual(spec.case) if r.ok else np.nan for r in result.rows])

    points: list[PolarizationPoint] = []
    for k in _dips(res):
        f = lambda v: _residual_at(spec, base_geom, base_params, v)  # noqa: E731
        try:
            g = minimize_scalar(f, bracket=(values[k - 1], values[k], values[k + 1]),
                                method="golden", tol=1e-12)
            seed = float(g.x) if values[k - 1] <= g.x <= values[k + 1] else float(values[k])
        except ValueError:
            seed = float(values[k])
        if polish:
            pt = refine_point(spec, base_geom, base_params, seed,
                              max_companion_shift=max_companion_shift)
        else:
            geom, params = configure(spec, base_geom, base_params, seed)
            pt = build_point(spec, geom, params) if geom is not None else None
        if pt is None or not _accept(pt, tol):
            continue
        v = _sweep_value(spec, pt)
        if not result.lo - 1e-9 <= v <= result.hi + 1e-9:
            continue
        if any(abs(_sweep_value(spec, p) - v) < 1e-7
               and abs(p.params.so_ratio - pt.params.so_ratio) < 1e-7
               and abs(p.params.ka - pt.params.ka) < 1e-7 for p in points):
            continue
        points.append(pt)
    points.sort(key=lambda p: _sweep_value(spec, p))
    return points


def find_reflectionless_points(points: list[PolarizationPoint], eps: float = 1e-3
                               ) -> list[PolarizationPoint]:
    """Points with reflection loss 1 - eta below ``eps``, best first."""
    keep = [p for p in points if p.reflection_loss < eps]
    return sorted(keep, key=lambda p: p.reflection_loss)


def refine_seed(case, geom: RingGeometry, params: RingParams, vary: str = "ka",
                family: Optional[Family] = None, max_companion_shift: float = 0.1
                ) -> Optional[PolarizationPoint]:
    """Polish a single parameter seed (e.g. rounded reference values) into a root."""
    value = {"ka": params.ka, "so_ratio": params.so_ratio, "gamma2": geom.gamma2}[vary]
    spec = SweepSpec(vary, value - 1.0, value + 1.0, samples=2, family=family,
                     case=PolarizationCase.parse(case))
    return refine_point(spec, geom, params, value, max_companion_shift=max_companion_shift)


def with_samples(spec: SweepSpec, samples: int) -> SweepSpec:
    return replace(spec, samples=samples)
