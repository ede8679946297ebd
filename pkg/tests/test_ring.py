import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import constants as sc

from ringpol.ring import (
    PhysicalContext,
    RingGeometry,
    RingParams,
    derive,
    dimensionless_from_physical,
    eigenspinor,
    energy_for_ka,
    spin_part,
)

so_ratios = st.floats(0.0, 10.0, allow_nan=False)
kas = st.floats(0.05, 15.0, allow_nan=False)


def test_zero_coupling_limit():
    d = derive(RingParams(0.0, 1.0))
    assert d.w == 1.0 and d.q == 1.0 and d.theta == 0.0
    assert d.ac_phase[0] == 0.0
    assert d.ac_phase[1] == pytest.approx(-2 * math.pi, abs=1e-15)
    assert d.kappa.ravel().tolist() == [-0.5, 1.5, 0.5, -1.5]


def test_regression_values():
    # reference values: direct evaluation of sqrt(1 + 2.27^2), sqrt(1.135^2 + 100), -atan(2.27)
    d = derive(RingParams(2.27, 10.0))
    assert d.w == pytest.approx(2.48050398104901, rel=1e-12)
    assert d.q == pytest.approx(10.0642051350318, rel=1e-12)
    assert d.theta == pytest.approx(-1.15584664781101, rel=1e-12)


@pytest.mark.parametrize("ka", [0.0, -1.0, float("nan")])
def test_rejects_bad_ka(ka):
    with pytest.raises(ValueError):
        RingParams(0.5, ka)


def test_rejects_negative_coupling():
    with pytest.raises(ValueError):
        RingParams(-0.1, 1.0)


@pytest.mark.parametrize("g1,g2", [(0.0, 1.0), (2.0, 2.0), (3.0, 1.0), (1.0, 2 * math.pi)])
def test_geometry_invariants(g1, g2):
    with pytest.raises(ValueError):
        RingGeometry(g1, g2)


@settings(max_examples=200, deadline=None)
@given(so_ratios, kas)
def test_fourfold_degeneracy(so, ka):
    d = derive(RingParams(so, ka))
    target = ka * ka
    for mu in (1, 2):
        for j in (1, 2):
            k = d.kap(mu, j)
            assert d.energy(mu, k) == pytest.approx(target, rel=1e-12, abs=1e-12)
            assert d.energy_ac_form(mu, k) == pytest.approx(target, rel=1e-11, abs=1e-11)


@settings(max_examples=200, deadline=None)
@given(so_ratios, kas)
def test_kappa_identities(so, ka):
    d = derive(RingParams(so, ka))
    for mu in (1, 2):
        sign = (-1) ** (mu + 1)
        assert d.kap(mu, 1) + d.kap(mu, 2) == pytest.approx(sign * d.w, abs=1e-12)
        assert d.kap(mu, 1) - d.kap(mu, 2) == pytest.approx(-2 * sign * d.q, abs=1e-12)
    assert sum(d.ac_phase) == pytest.approx(-2 * math.pi, abs=1e-12)
    assert d.w >= 1.0 and d.q >= ka


def test_theta_branch_matches_ratio_identity():
    rng = np.random.default_rng(7)
    for so in rng.uniform(0.0, 10.0, 100):
        if so == 0.0:
            continue
        d = derive(RingParams(so, 1.0))
        assert math.tan(d.theta / 2) == pytest.approx((1 - d.w) / so, abs=1e-12)


def test_eigenspinor_basics():
    assert np.allclose(eigenspinor(1, 0.7, 0.0, 0.0), [1, 0])
    d = derive(RingParams(3.05, 1.0))
    ratio = eigenspinor(1, 0.3, 0.9, d.theta)
    assert ratio[1] / ratio[0] == pytest.approx(math.tan(d.theta / 2) * np.exp(0.9j), abs=1e-12)
    assert math.tan(d.theta / 2) == pytest.approx((1 - d.w) / 3.05, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1.5, 0.0), st.floats(-5, 5), st.floats(0, 2 * math.pi))
def test_eigenspinors_orthonormal(theta, kappa, phi):
    u = eigenspinor(1, kappa, phi, theta)
    v = eigenspinor(2, kappa, phi, theta)
    assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-14)
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-14)
    assert abs(np.vdot(v, u)) < 1e-14


def test_spin_part_rejects_bad_index():
    with pytest.raises(ValueError):
        spin_part(3, 0.0, 0.0)


def test_physical_conversion():
    ctx = PhysicalContext(250e-9, 0.023 * sc.m_e, 0.0)
    assert dimensionless_from_physical(ctx, ctx.hbar_omega).ka == pytest.approx(1.0, rel=1e-14)
    assert dimensionless_from_physical(ctx, ctx.hbar_omega).so_ratio == 0.0
    # E for ka = 1.38: 1.38^2 * hbar^2 / (2 m* a^2)
    E = energy_for_ka(ctx, 1.38)
    assert E == pytest.approx(8.08692936338838e-24, rel=1e-10)
    assert dimensionless_from_physical(ctx, E).ka == pytest.approx(1.38, rel=1e-14)
    with pytest.raises(ValueError):
        dimensionless_from_physical(ctx, 0.0)
    with pytest.raises(ValueError):
        PhysicalContext(-1.0, 1.0, 1.0)


def test_physical_coupling_scales_with_field():
    ctx1 = PhysicalContext(250e-9, 0.023 * sc.m_e, 1e6)
    ctx2 = PhysicalContext(250e-9, 0.023 * sc.m_e, 2e6)
    s1 = dimensionless_from_physical(ctx1, ctx1.hbar_omega).so_ratio
    s2 = dimensionless_from_physical(ctx2, ctx2.hbar_omega).so_ratio
    assert s2 == pytest.approx(2 * s1, rel=1e-14)
    assert s1 == pytest.approx(sc.e * 1e6 * 250e-9 / (0.023 * sc.m_e * sc.c**2), rel=1e-14)
