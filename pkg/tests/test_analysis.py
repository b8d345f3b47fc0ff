import numpy as np
import pytest

from jostpole.analysis import (
    ENERGY_CROSSING_WIDTH_ANTICROSSING,
    JOINT_CROSSING,
    UNDETERMINED,
    WIDTH_CROSSING_ENERGY_ANTICROSSING,
    encircle,
    loop_path,
    pole_trajectory,
    section,
    surface_scan,
)
from jostpole.unfolding import energy_split


@pytest.fixture(scope="module")
def sections(ep, coeffs):
    rng = (ep.d_star - 3e-3, ep.d_star + 3e-3)
    return {v: section(ep, coeffs, v, rng, 121) for v in (1.0381, ep.v3_star, 1.0384)}


def test_surface_grid(ep, coeffs):
    grid = surface_scan(ep, coeffs, (2e-3, 5e-4), (9, 9))
    assert len(grid) == 9 and len(grid[0]) == 9
    centre = grid[4][4]
    assert centre.k1 == ep.k_d and centre.k2 == ep.k_d
    gaps = [abs(p.k1 - p.k2) for i, row in enumerate(grid) for j, p in enumerate(row) if (i, j) != (4, 4)]
    assert min(gaps) > 0
    assert all(p.ok for row in grid for p in row)
    for row in grid:
        for p in row:
            assert p.E1 == p.k1**2


def test_surface_rejects_small_grid(ep, coeffs):
    with pytest.raises(ValueError):
        surface_scan(ep, coeffs, (1e-3, 1e-3), (4, 8))


def test_surface_seams_on_rays(ep, coeffs):
    # along the k-plane cut the real parts join, on the opposite ray the
    # imaginary parts; the joining is exact only to O(rho^1.5), so the 1e-6
    # level needs rho below about 6e-4
    from jostpole.analysis import doublet_near_ep

    x0 = coeffs.xi_hat0_k
    for rho in (1e-4, 3e-4):
        a = doublet_near_ep(ep, coeffs, rho * x0)
        assert abs(a.k1.real - a.k2.real) < 1e-6 and abs(a.k1.imag - a.k2.imag) > 1e-4
        b = doublet_near_ep(ep, coeffs, -rho * x0)
        assert abs(b.k1.imag - b.k2.imag) < 1e-6 and abs(b.k1.real - b.k2.real) > 1e-4


def test_seam_deviation_scales_as_three_halves(ep, coeffs):
    from jostpole.analysis import doublet_near_ep

    x0 = coeffs.xi_hat0_k
    dev = [abs(np.diff([p.k1.real, p.k2.real])[0]) for p in (doublet_near_ep(ep, coeffs, r * x0) for r in (1e-4, 1e-3))]
    assert dev[1] / dev[0] == pytest.approx(10**1.5, rel=0.05)


def test_section_classes(sections, ep):
    assert sections[1.0381].classification == WIDTH_CROSSING_ENERGY_ANTICROSSING
    assert sections[ep.v3_star].classification == JOINT_CROSSING
    assert sections[1.0384].classification == ENERGY_CROSSING_WIDTH_ANTICROSSING
    for s in sections.values():
        assert s.exact_classification == s.classification
    assert sections[ep.v3_star].crossing_d == ep.d_star


def test_section_exact_vs_approximant(sections):
    s = sections[1.0381]
    E = np.array([[p.E1, p.E2] for p in s.sweep])
    Eh = np.array([[p.Ehat1, p.Ehat2] for p in s.sweep])
    assert np.max(np.abs(E.real - Eh.real)) < 0.05 * np.ptp(E.real)
    assert np.max(np.abs(E.imag - Eh.imag)) < 0.05 * np.ptp(E.imag)


def test_section_identities(sections, coeffs, ep):
    for s in sections.values():
        dE, dG = s.approx_dE_dGamma()
        xi = np.c_[s.d - ep.d_star, np.full(len(s.d), s.xi2)]
        rx, ix = energy_split(coeffs, xi)
        sc = np.hypot(rx, ix).max()
        assert np.max(np.abs(dE * dG + ix)) < 1e-13 * sc
        assert np.max(np.abs(dE**2 - 0.25 * dG**2 - rx)) < 1e-13 * sc
        assert np.all(np.sign(dE * dG) == -np.sign(ix))


def test_section_undetermined(ep, coeffs):
    s = section(ep, coeffs, 1.0381, (ep.d_star + 1e-3, ep.d_star + 2e-3), 11)
    assert s.classification == UNDETERMINED


def test_section_reverse_direction(ep, coeffs, sections):
    fwd = sections[1.0381]
    rev = section(ep, coeffs, 1.0381, (ep.d_star + 3e-3, ep.d_star - 3e-3), 121)
    assert rev.classification == fwd.classification
    assert rev.exact_classification == fwd.exact_classification
    assert np.allclose(rev.d[::-1], fwd.d)


def test_trajectory_fits(sections, ep):
    for v, kind in ((1.0381, "i"), (ep.v3_star, "ii"), (1.0384, "iii")):
        fit = pole_trajectory(sections[v])
        assert fit.trajectory_type == kind
        assert fit.discriminant > 0 and fit.predicted_discriminant > 0
        assert fit.B == pytest.approx(fit.predicted_B, rel=1e-2)
        assert fit.C == pytest.approx(-1, rel=1e-2)
    assert pole_trajectory(sections[ep.v3_star]).degenerate


def test_trajectory_approximant_exact_conic(sections):
    fit = pole_trajectory(sections[1.0384], use="approx")
    assert fit.B == pytest.approx(fit.predicted_B, rel=1e-10)
    assert fit.C == pytest.approx(-1, rel=1e-10)
    # constant term is -(R . xi_c)/4
    assert fit.F == pytest.approx(-0.25 * sections[1.0384].R_dot_xic, rel=1e-8)


def test_asymptote_slopes(sections):
    fit = pole_trajectory(sections[1.0381])
    m1, m2 = fit.asymptote_slopes
    cot = fit.cot_phi1
    for m in (m1, m2):
        assert abs(1 - 2 * cot * m - m * m) < 1e-12
    # the asymptotes are perpendicular
    assert m1 * m2 == pytest.approx(-1)


def test_loop_path_shape(ep, coeffs):
    t, path = loop_path(ep, coeffs, 1e-2, 1, 64)
    assert len(path) == 65 and t[-1] == 1
    assert path[0] == path[-1] or (abs(path[0].d - path[-1].d) < 1e-15 and abs(path[0].v3 - path[-1].v3) < 1e-15)


@pytest.mark.parametrize("windings,expected", [(1, "swap"), (2, "identity"), (3, "swap"), (4, "identity")])
def test_monodromy_parity(ep, coeffs, windings, expected):
    res = encircle(ep, coeffs, 1e-2, windings, 64)
    assert res.permutation == expected
    assert res.mismatch < 1e-6


def test_loop_off_ep(ep, coeffs):
    res = encircle(ep, coeffs, 1e-2, 1, 64, center_offset=(0.05, 0.0))
    assert res.permutation == "identity"


def test_loop_rejects_coarse_sampling(ep, coeffs):
    with pytest.raises(ValueError):
        encircle(ep, coeffs, 1e-2, 1, 32)
