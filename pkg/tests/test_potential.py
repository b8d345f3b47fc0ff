import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jostpole import ControlPoint, FixedParams, PotentialProfile, default_fixed, default_profile, region_wave_number
from oracles import mp_wave_number


def test_branch_point_zero():
    prof = PotentialProfile(default_fixed(U2=2.0), ControlPoint(2.0, 1.04))
    K2 = region_wave_number(prof, 2, np.sqrt(2.0))
    # sqrt(2)**2 misses 2 by one ulp, so K2 itself is only ~sqrt(ulp)
    assert abs(K2**2) < 1e-15 and abs(K2) < 1e-7


def test_k_zero_barrier():
    prof = PotentialProfile(default_fixed(U2=2.0), ControlPoint(2.0, 1.04))
    assert region_wave_number(prof, 2, 0.0) == pytest.approx(1.41421356, abs=1e-8)


def test_well_wave_number_high_precision():
    # well_scale 1 puts U3 = v3 directly
    prof = PotentialProfile(default_fixed(well_scale=1.0), ControlPoint(1.1314661145, 1.038235081))
    k = complex(2.2269761, -0.0722014)
    K3 = region_wave_number(prof, 3, k)
    ref = mp_wave_number(1.038235081, k, 3)
    assert abs(K3 - ref) < 1e-14 * abs(ref)


def test_bad_region():
    with pytest.raises(ValueError):
        region_wave_number(default_profile(), 5, 1.0)


def test_real_regimes():
    prof = default_profile()
    assert region_wave_number(prof, 2, 1.5).imag == 0 and region_wave_number(prof, 2, 1.5).real > 0
    K3 = region_wave_number(prof, 3, 2.5)
    assert K3.imag == 0 and K3.real > 0


def test_invalid_params():
    with pytest.raises(ValueError):
        FixedParams(r1=0.0)
    with pytest.raises(ValueError):
        FixedParams(U2=-1.0)
    with pytest.raises(ValueError):
        FixedParams(outer_well_sign=0)
    with pytest.raises(ValueError):
        ControlPoint(0.0, 1.0)


def test_potential_levels():
    prof = default_profile()
    r = np.array([0.5, prof.r1 + 0.1, prof.r2 + 0.1, prof.r3 + 0.1, prof.r4 + 0.1])
    assert np.allclose(prof.potential(r), [0, prof.fixed.U2, prof.U3, prof.fixed.U4, 0])
    assert prof.U3 == pytest.approx(2 * 1.04)


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.sampled_from([2, 3, 4]))
def test_square_identity(re, im, region):
    prof = default_profile()
    k = complex(re, im)
    K = region_wave_number(prof, region, k)
    target = (-1) ** region * (prof.level(region) - k * k)
    assert abs(K * K - target) < 1e-12 * max(1.0, abs(target))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 5), st.floats(-2, 2))
def test_radii_ordering(d, v3):
    prof = default_profile().with_control(ControlPoint(d, v3))
    r1, r2, r3, r4 = prof.radii
    assert 0 < r1 < r2 < r3 < r4
