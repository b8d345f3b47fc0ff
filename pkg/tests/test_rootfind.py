import numpy as np
import pytest

from jostpole import (
    ControlPoint,
    DerivativeVanishes,
    Doublet,
    KWindow,
    NonConvergence,
    count_zeros,
    polish_zero,
    scan_window,
    track_doublet,
)
from conftest import EP_PUB, K1_PUB, K2_PUB, WINDOW
from oracles import contour_count


def test_polish_first_published(profile):
    z = polish_zero(profile, 2.21 - 0.14j)
    assert abs(z.real - K1_PUB.real) < 1e-6 and abs(z.imag - K1_PUB.imag) < 1e-6


def test_polish_second_published(profile):
    z = polish_zero(profile, 2.23 - 0.002j)
    assert abs(z.real - K2_PUB.real) < 1e-6 and abs(z.imag - K2_PUB.imag) < 1e-6


def test_polish_fixed_point(doublet, profile):
    z, steps = polish_zero(profile, doublet.k1, full_output=True)
    assert steps <= 1
    assert abs(z - doublet.k1) < 1e-14


def test_polish_idempotent(profile):
    z = polish_zero(profile, 2.2 - 0.1j)
    assert polish_zero(profile, z) == pytest.approx(z, abs=1e-14)


def test_polish_rejects_double_zero(ep):
    # exactly at the double zero |f'| vanishes but |f| is already tiny: accepted
    z = polish_zero(ep.profile, ep.k_d)
    assert abs(z - ep.k_d) < 1e-7


def test_derivative_vanishes_off_zero(ep, monkeypatch):
    import jostpole.rootfind as rf

    real = rf._k_derivs

    def fake(profile, k, order, *a, **kw):
        (d1, d2), m = real(profile, k, order, *a, **kw)
        return (d1 * 1e-14, d2), m

    monkeypatch.setattr(rf, "_k_derivs", fake)
    with pytest.raises(DerivativeVanishes):
        polish_zero(ep.profile, ep.k_d + 0.05)


def test_nonconvergence_carries_trace(profile):
    with pytest.raises(NonConvergence) as info:
        polish_zero(profile, 2.2 - 0.1j, max_iter=1)
    assert info.value.last is not None


def test_scan_finds_exact_doublet(profile):
    z = scan_window(profile, WINDOW, 64)
    assert len(z) == 2
    assert abs(z[0] - K1_PUB) < 2e-6 and abs(z[1] - K2_PUB) < 2e-6


def test_scan_far_window_empty(profile):
    w = KWindow(0.1, 0.3, -0.05, 0.0)
    assert scan_window(profile, w, 64) == []
    assert count_zeros(profile, w) == 0
    assert abs(contour_count(profile, w)) < 1e-6


def test_argument_principle_matches(profile):
    assert count_zeros(profile, WINDOW) == 2
    assert abs(contour_count(profile, WINDOW, 2048) - 2) < 1e-6


def test_scan_grid_minimum():
    with pytest.raises(ValueError):
        scan_window(None, WINDOW, 8)


def test_window_invariants():
    with pytest.raises(ValueError):
        KWindow(1.0, 1.0, -1, 0)


@pytest.mark.parametrize("seed", [0, 1])
def test_scan_count_agrees_with_winding_random_windows(profile, seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.5, 3.0)
    w = KWindow(a, a + rng.uniform(0.3, 0.8), -rng.uniform(0.05, 0.6), 0.0)
    assert len(scan_window(profile, w, 64)) == count_zeros(profile, w)


def test_track_constant_path(doublet):
    out = track_doublet(doublet.profile, [doublet.control] * 4, doublet)
    for d in out:
        assert d.k1 == doublet.k1 and d.k2 == doublet.k2


def test_track_towards_ep(doublet):
    path = [ControlPoint(d, EP_PUB["v3"]) for d in np.linspace(2.0, EP_PUB["d"], 30)]
    start = Doublet(polish_zero(doublet.profile.with_control(path[0]), doublet.k1),
                    polish_zero(doublet.profile.with_control(path[0]), doublet.k2),
                    doublet.profile.with_control(path[0]))
    out = track_doublet(doublet.profile, path, start)
    gaps = [o.gap for o in out]
    assert gaps[-1] < 1e-3 < gaps[0]
    mid = 0.5 * (out[-1].k1 + out[-1].k2)
    assert abs(mid - complex(2.22697606, -0.07220139)) < 1e-3


def test_small_loop_off_ep_keeps_labels(doublet):
    c = doublet.control
    th = np.linspace(0, 2 * np.pi, 65)
    path = [ControlPoint(c.d + 0.02 * np.cos(t), c.v3 + 0.005 * np.sin(t)) for t in th]
    out = track_doublet(doublet.profile, path, doublet)
    assert abs(out[-1].k1 - out[0].k1) < 1e-9 and abs(out[-1].k2 - out[0].k2) < 1e-9
    assert out[-1].labels == doublet.labels


def test_refinement_independence(doublet):
    c = doublet.control
    target = ControlPoint(1.8, 1.039)
    coarse = track_doublet(doublet.profile, [c, target], doublet)[-1]
    fine_path = [ControlPoint(c.d + t * (target.d - c.d), c.v3 + t * (target.v3 - c.v3)) for t in np.linspace(0, 1, 9)]
    fine = track_doublet(doublet.profile, fine_path, doublet)[-1]
    assert abs(coarse.k1 - fine.k1) < 1e-8 and abs(coarse.k2 - fine.k2) < 1e-8


def test_mirror_zeros(doublet, profile):
    for z in (doublet.k1, doublet.k2):
        m = polish_zero(profile, -z.conjugate())
        assert abs(m + z.conjugate()) < 1e-10
