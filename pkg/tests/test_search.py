import math

import numpy as np
import pytest

from ringpol import presets as P
from ringpol.polarization import PolarizationCase
from ringpol.ring import RingGeometry, RingParams
from ringpol.search import (
    Family,
    SweepSpec,
    clip_range,
    find_polarization_points,
    find_reflectionless_points,
    refine_seed,
    sweep,
    with_samples,
)

A, B = PolarizationCase.A, PolarizationCase.B
BASE_GEOM = RingGeometry(2 * math.pi / 3, P.GAMMA2)


@pytest.fixture(scope="module")
def family_a():
    spec = P.family_spec(A)
    result = sweep(spec, BASE_GEOM, P.FAMILY_BASE_PARAMS)
    return spec, result, find_polarization_points(spec, BASE_GEOM, P.FAMILY_BASE_PARAMS, result=result)


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec("ka", 2.0, 1.0)
    with pytest.raises(ValueError):
        SweepSpec("ka", 1.0, 2.0, samples=1)
    with pytest.raises(ValueError):
        SweepSpec("energy", 1.0, 2.0)
    with pytest.raises(ValueError):
        Family(-1)


def test_family_sweep_rows(family_a):
    _, result, _ = family_a
    assert len(result.rows) == 2000 and all(r.ok for r in result.rows)
    eta = result.column("eta1") + result.column("eta2")
    assert np.all((eta >= 0) & (eta <= 1 + 1e-10))
    cons = np.abs(eta + result.column("reflect_prob") - 1)
    assert cons.max() < 1e-10
    g1 = result.column("gamma1")
    assert np.all((g1 > 0) & (g1 < P.GAMMA2))


def test_family_points(family_a):
    _, _, points = family_a
    assert len(points) >= 2
    for p, (so, ka) in zip(points, P.FAMILY_ROOTS[A]):
        assert p.params.so_ratio == pytest.approx(so, abs=1e-8)
        assert p.params.ka == pytest.approx(ka, abs=1e-8)
        assert p.eta1 == pytest.approx(p.eta2, abs=1e-9)
        assert 0 < p.eta <= 1 + 1e-10
        assert p.residual < 1e-8 and max(p.det_norm) < 1e-8
        for v in p.out_spinor:
            assert np.linalg.norm(v) == pytest.approx(1.0)
    assert min(p.reflection_loss for p in points) < 0.05


def test_family_case_b_point():
    spec = P.family_spec(B)
    points = find_polarization_points(spec, BASE_GEOM, P.FAMILY_BASE_PARAMS)
    (so, ka), = P.FAMILY_ROOTS[B]
    assert any(abs(p.params.ka - ka) < 1e-8 and abs(p.params.so_ratio - so) < 1e-8 for p in points)


def test_loose_tolerance_is_superset(family_a):
    spec, result, tight = family_a
    loose = find_polarization_points(spec, BASE_GEOM, P.FAMILY_BASE_PARAMS, tol=1e-2, result=result)
    for p in tight:
        assert any(abs(p.params.ka - o.params.ka) < 1e-9 for o in loose)


def test_grid_doubling_is_stable(family_a):
    spec, _, points = family_a
    dense = find_polarization_points(with_samples(spec, 4000), BASE_GEOM, P.FAMILY_BASE_PARAMS)
    for p in points:
        assert any(abs(p.params.ka - o.params.ka) < 1e-6 for o in dense)


def test_deterministic_across_threads(monkeypatch):
    spec = with_samples(P.family_spec(A), 300)
    monkeypatch.setenv("RINGPOL_THREADS", "1")
    serial = sweep(spec, BASE_GEOM, P.FAMILY_BASE_PARAMS)
    monkeypatch.setenv("RINGPOL_THREADS", "4")
    parallel = sweep(spec, BASE_GEOM, P.FAMILY_BASE_PARAMS)
    assert [r.__dict__ for r in serial.rows] == [r.__dict__ for r in parallel.rows]


def test_clipping_reports_bounds():
    spec = SweepSpec("ka", 7.0, 10.0, samples=50, family=P.FAMILY)
    lo, hi = clip_range(spec, BASE_GEOM, P.FAMILY_BASE_PARAMS)
    # validity needs q > 9 at so_ratio 2.27
    assert lo == pytest.approx(math.sqrt(81 - (2.27 / 2) ** 2), abs=1e-9)
    assert hi == 10.0
    result = sweep(spec, BASE_GEOM, P.FAMILY_BASE_PARAMS)
    assert result.clipped and result.meta["sampled"] == [lo, hi]
    assert result.meta["requested"] == [7.0, 10.0]


def test_entirely_invalid_range_raises():
    spec = SweepSpec("ka", 1.0, 5.0, samples=20, family=P.FAMILY)
    with pytest.raises(ValueError):
        sweep(spec, BASE_GEOM, P.FAMILY_BASE_PARAMS)


def test_no_coupling_no_polarization():
    spec = SweepSpec("ka", 0.2, 12.0, samples=2000)
    result = sweep(spec, BASE_GEOM, RingParams(0.0, 1.0))
    assert min(result.column("residual_a").min(), result.column("residual_b").min()) > 1e-3
    assert find_polarization_points(spec, BASE_GEOM, RingParams(0.0, 1.0), result=result) == []


def test_reflectionless_filter(family_a):
    _, _, points = family_a
    assert find_reflectionless_points(points, eps=0.0) == []
    ranked = find_reflectionless_points(points, eps=1.0)
    losses = [p.reflection_loss for p in ranked]
    assert losses == sorted(losses) and len(ranked) == len(points)


def test_refine_seed_symmetric():
    pt = refine_seed(A, P.SYMMETRIC_GEOMETRY, P.SYMMETRIC_SEED)
    assert abs(pt.params.ka - 1.38) < 0.01
    assert pt.params.ka == pytest.approx(P.SYMMETRIC_ROOT.ka, abs=1e-9)
    assert pt.params.so_ratio == pytest.approx(P.SYMMETRIC_ROOT.so_ratio, abs=1e-9)
    assert pt.residual < 1e-8


def test_symmetric_sweep_finds_one_point_near_seed():
    spec = SweepSpec("ka", 1.2, 1.6, samples=400, case=A)
    points = find_polarization_points(spec, P.SYMMETRIC_GEOMETRY, P.SYMMETRIC_SEED)
    near = [p for p in points if abs(p.params.ka - 1.38) < 0.01]
    assert len(near) == 1
