"""Self-consistency checks run by ``jostpole validate``.

Each check returns (name, passed, detail). None of them needs anything
beyond the library itself; the independent ODE oracle lives in the tests.
"""

from __future__ import annotations

import numpy as np

from . import analysis, exceptional, jost, rootfind, unfolding


def _fd_derivative(f, x, h):
    """Five-point central difference with one Richardson step."""
    def d(hh):
        return (f(x - 2 * hh) - 8 * f(x - hh) + 8 * f(x + hh) - f(x + 2 * hh)) / (12 * hh)
    a, b = d(h), d(h / 2)
    return b + (b - a) / 15


def check_unitarity(prof, rng, n):
    ks = rng.uniform(0.1, 5.0, n)
    err = max(abs(abs(jost.s_matrix(prof, k)[0]) - 1.0) for k in ks)
    return "unitarity |S|=1", err < 1e-12, f"max ||S|-1| = {err:.2e} over {n} real k"


def check_branch(prof, rng):
    ks = rng.uniform(0.5, 3.0, 20) + 1j * rng.uniform(-0.5, 0.1, 20)
    worst = 0.0
    for flip in [(-1, 1, 1), (1, -1, 1), (1, 1, -1), (-1, -1, -1)]:
        a = jost.jost_values(prof, ks)
        b = jost.jost_values(prof, ks, branch=flip)
        worst = max(worst, float(np.max(np.abs(a - b) / np.abs(a))))
    return "branch insensitivity", worst < 1e-12, f"max relative change {worst:.2e}"


def check_derivatives(prof, rng):
    worst = 0.0
    for k in rng.uniform(1.0, 3.0, 4) + 1j * rng.uniform(-0.3, 0.0, 4):
        f1 = jost.jost_k_derivatives(prof, k, 1)[0]
        fd = _fd_derivative(lambda z: jost.jost_function(prof, z), k, 1e-3)
        worst = max(worst, abs(f1 - fd) / abs(fd))
    return "k-derivative vs finite difference", worst < 1e-8, f"max relative deviation {worst:.2e}"


def check_zeros(prof, window, grid_n):
    zeros = rootfind.scan_window(prof, window, grid_n)
    count = rootfind.count_zeros(prof, window)
    mirror = 0.0
    for z in zeros:
        m = rootfind.polish_zero(prof, -z.conjugate())
        mirror = max(mirror, abs(m + z.conjugate()))
    ok_count = count == len(zeros)
    ok_mirror = mirror < 1e-9
    detail = f"{len(zeros)} zeros, winding {count}, mirror deviation {mirror:.2e}"
    return [("argument principle count", ok_count, detail), ("mirror zeros", ok_mirror, detail)], zeros


def check_ep(ep):
    rep = exceptional.verify_ep(ep)
    return "exceptional point", rep.is_ep and rep.precision < 1e-8, (
        f"|f|={rep.f_abs:.1e} |f'|={rep.fprime_abs:.1e} count={rep.zero_count} precision={rep.precision:.1e}")


def check_fits(ep, co, radius=1e-4, n=20):
    th = 2 * np.pi * np.arange(n) / n
    X = radius * np.c_[np.cos(th), np.sin(th)]
    pairs = [analysis.doublet_near_ep(ep, co, x) for x in X]
    D = np.array([(p.k1 - p.k2) ** 2 for p in pairs])
    M = np.array([0.5 * (p.k1 + p.k2) - ep.k_d for p in pairs])
    A = X.astype(complex)
    c_fit = np.linalg.lstsq(A, D, rcond=None)[0]
    d_fit = np.linalg.lstsq(A, M, rcond=None)[0]
    ec = float(np.max(np.abs(c_fit - co.c) / np.abs(co.c)))
    ed = float(np.max(np.abs(d_fit - co.dvec) / np.abs(co.dvec)))
    return [
        ("squared-gap coefficients c_i", ec < 1e-2, f"max relative deviation of fit {ec:.2e}"),
        ("centre coefficients d_i", ed < 1e-2, f"max relative deviation of fit {ed:.2e}"),
    ]


def check_identities(co, rng, n=1000):
    r = 1e-2 * np.sqrt(rng.uniform(0, 1, n))
    t = rng.uniform(0, 2 * np.pi, n)
    xi = np.c_[r * np.cos(t), r * np.sin(t)]
    E1, E2, _ = unfolding.contact_energy(co, xi)
    dE = (E1 - E2).real
    dG = -2 * (E1 - E2).imag
    rx, ix = unfolding.energy_split(co, xi)
    scale = np.hypot(rx, ix) + 1e-300
    e1 = float(np.max(np.abs(dE**2 - 0.25 * dG**2 - rx) / scale))
    e2 = float(np.max(np.abs(dE * dG + ix) / scale))
    return "approximant identities", max(e1, e2) < 1e-12, f"relative residuals {e1:.1e}, {e2:.1e}"


def run_checks(cfg):
    from .cli import build_profile, build_window, solve_ep

    rng = np.random.default_rng(cfg["validate"]["seed"])
    prof = build_profile(cfg)
    out = [check_unitarity(prof, rng, cfg["validate"]["n_unitarity"]), check_branch(prof, rng), check_derivatives(prof, rng)]
    zero_checks, _ = check_zeros(prof, build_window(cfg), cfg["grid_n"])
    out += zero_checks
    try:
        ep = solve_ep(cfg)
    except (rootfind.NonConvergence, ArithmeticError) as exc:
        return out + [("exceptional point", False, f"solver failed: {exc}")]
    out.append(check_ep(ep))
    co = unfolding.compute_coefficients(ep)
    out += check_fits(ep, co)
    out.append(check_identities(co, rng))
    return out
