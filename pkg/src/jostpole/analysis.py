"""Surfaces, sections, pole trajectories and encircling loops around the EP.

Everything here is built on two sources of numbers: the exact doublet,
obtained by continuation of Jost zeros, and the contact approximant from
:mod:`jostpole.unfolding`. Energies are E = k**2 and widths follow
E = E_res - i Gamma/2.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .exceptional import ExceptionalPoint
from .jost import jost_function
from .potential import ControlPoint
from .rootfind import Doublet, NonConvergence, polish_zero, track_doublet
from .unfolding import UnfoldingCoefficients, contact_energy, contact_k

log = logging.getLogger(__name__)

__all__ = [
    "WIDTH_CROSSING_ENERGY_ANTICROSSING",
    "JOINT_CROSSING",
    "ENERGY_CROSSING_WIDTH_ANTICROSSING",
    "UNDETERMINED",
    "SurfaceSample",
    "SectionSample",
    "SectionResult",
    "TrajectoryFit",
    "LoopResult",
    "doublet_near_ep",
    "surface_scan",
    "section",
    "classify_sign",
    "pole_trajectory",
    "encircle",
    "loop_path",
]

WIDTH_CROSSING_ENERGY_ANTICROSSING = "WIDTH_CROSSING_ENERGY_ANTICROSSING"
JOINT_CROSSING = "JOINT_CROSSING"
ENERGY_CROSSING_WIDTH_ANTICROSSING = "ENERGY_CROSSING_WIDTH_ANTICROSSING"
UNDETERMINED = "UNDETERMINED"

# relative size of R.xi_c (against |R| |xi_2|-ish scales) treated as zero
JOINT_RTOL = 1e-8


def _control(ep, xi):
    return ControlPoint(ep.d_star + float(xi[0]), ep.v3_star + float(xi[1]))


def _match(pair, ref):
    """Order ``pair`` to best match the two reference values ``ref``."""
    a, b = pair
    if abs(a - ref[1]) + abs(b - ref[0]) < abs(a - ref[0]) + abs(b - ref[1]):
        return b, a
    return a, b


def doublet_near_ep(ep: ExceptionalPoint, coeffs: UnfoldingCoefficients, xi, start_radius=1e-5):
    """Exact doublet at xi = (d - d*, v3 - v3*), reached along the ray from the EP.

    The zeros are seeded from the approximant at ``start_radius`` on the ray
    and continued outwards, so no cut is crossed on the way. ``k1`` is the
    zero continuing the ``+`` branch of :func:`contact_k`.
    """
    xi = np.asarray(xi, dtype=float)
    rho = float(np.hypot(*xi))
    if rho == 0.0:
        return Doublet(ep.k_d, ep.k_d, ep.profile, degenerate=True)
    x0 = xi * min(1.0, start_radius / rho)
    prof0 = ep.profile.with_control(_control(ep, x0))
    seeds = contact_k(coeffs, x0)
    z = tuple(polish_zero(prof0, s) for s in seeds)
    if abs(z[0] - z[1]) < 1e-3 * abs(seeds[0] - seeds[1]):
        raise NonConvergence("approximant seeds collapsed onto one zero", x0)
    start = Doublet(*_match(z, seeds), prof0)
    if rho <= start_radius:
        return start
    return track_doublet(ep.profile, [start.control, _control(ep, xi)], start)[-1]


@dataclass(frozen=True)
class SurfaceSample:
    control: ControlPoint
    k1: complex
    k2: complex
    khat1: complex
    khat2: complex
    ok: bool = True
    error: str = ""

    @property
    def E1(self):
        return self.k1**2

    @property
    def E2(self):
        return self.k2**2


def _surface_point(ep, coeffs, d, v3):
    xi = (d - ep.d_star, v3 - ep.v3_star)
    kh = contact_k(coeffs, xi)
    ctrl = ControlPoint(d, v3)
    try:
        dbl = doublet_near_ep(ep, coeffs, xi)
        return SurfaceSample(ctrl, dbl.k1, dbl.k2, *kh)
    except (NonConvergence, ArithmeticError) as exc:
        log.warning("surface sample at d=%g v3=%g failed: %s", d, v3, exc)
        return SurfaceSample(ctrl, complex(np.nan, np.nan), complex(np.nan, np.nan), *kh, ok=False, error=str(exc))


def _surface_job(ep, coeffs, point):
    return _surface_point(ep, coeffs, *point)


def surface_scan(ep: ExceptionalPoint, coeffs: UnfoldingCoefficients, half_widths, grid, threads=1):
    """Exact and approximant doublet on an n1 x n2 grid centred on the EP.

    Returns a nested list indexed [i][j] for d_i, v3_j. Each sample is
    reached along its own ray from the EP; failures are recorded in the
    sample instead of raised. Rays are independent, so ``threads > 1``
    spreads them over worker processes.
    """
    n1, n2 = grid
    if n1 < 8 or n2 < 8:
        raise ValueError("surface grid must be at least 8 x 8")
    dd, dv = half_widths
    ds = ep.d_star + np.linspace(-dd, dd, n1)
    vs = ep.v3_star + np.linspace(-dv, dv, n2)
    jobs = [(d, v) for d in ds for v in vs]
    work = partial(_surface_job, ep, coeffs)
    if threads and threads > 1:
        with ProcessPoolExecutor(threads) as pool:
            flat = list(pool.map(work, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        flat = [work(p) for p in jobs]
    return [flat[i * n2 : (i + 1) * n2] for i in range(n1)]


@dataclass(frozen=True)
class SectionSample:
    d: float
    k1: complex
    k2: complex
    Ehat1: complex
    Ehat2: complex
    degenerate: bool = False

    @property
    def E1(self):
        return self.k1**2

    @property
    def E2(self):
        return self.k2**2

    @property
    def dE(self):
        return (self.E1 - self.E2).real

    @property
    def dGamma(self):
        return -2 * (self.E1 - self.E2).imag


@dataclass(frozen=True)
class SectionResult:
    fixed_v3: float
    sweep: tuple
    classification: str
    crossing_d: float
    exact_classification: str
    R_dot_xic: float
    xi2: float
    coeffs: UnfoldingCoefficients = field(repr=False)

    @property
    def d(self):
        return np.array([s.d for s in self.sweep])

    def approx_dE_dGamma(self):
        """(dE, dGamma) of the approximant at every sample, from E1 - E2 = 2 eps."""
        xi = np.c_[self.d - self.coeffs.d_star, np.full(len(self.sweep), self.xi2)]
        _, _, eps = contact_energy(self.coeffs, xi)
        return 2 * eps.real, -4 * eps.imag


def classify_sign(value, scale):
    if not np.isfinite(value):
        return UNDETERMINED
    if abs(value) <= JOINT_RTOL * scale:
        return JOINT_CROSSING
    return WIDTH_CROSSING_ENERGY_ANTICROSSING if value > 0 else ENERGY_CROSSING_WIDTH_ANTICROSSING


def _exact_class(samples):
    """Classification read off the tracked exact doublet alone."""
    if any(s.degenerate for s in samples):
        return JOINT_CROSSING
    ok = [s for s in samples if np.isfinite(s.k1) and np.isfinite(s.k2)]
    dE = np.array([s.dE for s in ok])
    dG = np.array([s.dGamma for s in ok])
    e_cross = np.any(np.sign(dE[1:]) != np.sign(dE[:-1]))
    g_cross = np.any(np.sign(dG[1:]) != np.sign(dG[:-1]))
    if e_cross and g_cross:
        return JOINT_CROSSING
    if g_cross:
        return WIDTH_CROSSING_ENERGY_ANTICROSSING
    if e_cross:
        return ENERGY_CROSSING_WIDTH_ANTICROSSING
    return UNDETERMINED


def section(ep: ExceptionalPoint, coeffs: UnfoldingCoefficients, v3_fixed, d_range, n=201):
    """Sweep d across ``d_range`` at fixed v3.

    The approximant classification uses the sign of R . xi_c at the point
    xi_c of the sweep line where I . xi = 0; the exact classification
    looks for sign changes of dE and dGamma along the tracked doublet.
    """
    if n < 3:
        raise ValueError("need at least 3 sweep samples")
    lo, hi = d_range
    ds = np.linspace(lo, hi, n)
    xi2 = v3_fixed - ep.v3_star
    R, I = coeffs.Rvec, coeffs.Ivec

    if I[0] == 0.0:
        xi1c = np.nan
    else:
        xi1c = -I[1] * xi2 / I[0]
    crossing_d = ep.d_star + xi1c
    if np.isfinite(crossing_d) and min(lo, hi) <= crossing_d <= max(lo, hi):
        rxc = R[0] * xi1c + R[1] * xi2
        scale = np.hypot(*R) * max(abs(xi1c), abs(xi2), 1e-300)
        cls = classify_sign(rxc, scale) if xi2 != 0.0 else JOINT_CROSSING
        if xi2 == 0.0:
            rxc = 0.0
    else:
        rxc, cls = np.nan, UNDETERMINED

    path = [ControlPoint(d, v3_fixed) for d in ds]
    start = doublet_near_ep(ep, coeffs, (ds[0] - ep.d_star, xi2))
    tracked = track_doublet(ep.profile, path, start)

    xi = np.c_[ds - ep.d_star, np.full(n, xi2)]
    Eh1, Eh2, _ = contact_energy(coeffs, xi)
    samples = []
    for i, dbl in enumerate(tracked):
        e1, e2 = _match((Eh1[i], Eh2[i]), (dbl.k1**2, dbl.k2**2))
        samples.append(SectionSample(ds[i], dbl.k1, dbl.k2, e1, e2, dbl.degenerate))
    return SectionResult(
        fixed_v3=v3_fixed,
        sweep=tuple(samples),
        classification=cls,
        crossing_d=float(crossing_d) if np.isfinite(crossing_d) else np.nan,
        exact_classification=_exact_class(samples),
        R_dot_xic=float(rxc),
        xi2=xi2,
        coeffs=coeffs,
    )


@dataclass(frozen=True)
class TrajectoryFit:
    """Conic x^2 + B x y + C y^2 + F = 0 fitted to eps = (E1 - E2)/2."""

    B: float
    C: float
    F: float
    cot_phi1: float
    discriminant: float
    asymptote_slopes: tuple
    trajectory_type: str
    degenerate: bool
    points: tuple = field(repr=False, default=())

    @property
    def predicted_B(self):
        return -2 * self.cot_phi1

    @property
    def predicted_discriminant(self):
        return 4 * self.cot_phi1**2 + 4


_TYPES = {
    WIDTH_CROSSING_ENERGY_ANTICROSSING: "i",
    JOINT_CROSSING: "ii",
    ENERGY_CROSSING_WIDTH_ANTICROSSING: "iii",
    UNDETERMINED: "undetermined",
}


def pole_trajectory(sec: SectionResult, use="exact", critical_rtol=1e-3):
    """Pole trajectories of a section in the complex energy plane.

    In the coordinates x + iy = (E1 - E2)/2 the trajectories lie on
    x^2 - 2 cot(phi1) x y - y^2 - (R . xi_c)/4 = 0 with cot(phi1) = R1/I1,
    whose asymptotes have slopes tan(phi1/2) and -cot(phi1/2). The conic is
    fitted by least squares to the exact (or approximant) samples. A
    constant term below ``critical_rtol`` times the largest |eps|^2 is read
    as the critical (line-pair) case; exact data carries second-order
    corrections, so this cannot be much tighter.
    """
    co = sec.coeffs
    if use == "exact":
        eps = np.array([0.5 * (s.E1 - s.E2) for s in sec.sweep])
    else:
        eps = np.array([0.5 * (s.Ehat1 - s.Ehat2) for s in sec.sweep])
    eps = eps[np.isfinite(eps)]
    x, y = eps.real, eps.imag
    cot = co.Rvec[0] / co.Ivec[0]
    phi = np.arctan2(1.0, cot)
    slopes = (np.tan(phi / 2), -1.0 / np.tan(phi / 2))

    A = np.c_[x * y, y * y, np.ones_like(x)]
    sol, *_ = np.linalg.lstsq(A, -x * x, rcond=None)
    B, C, F = sol
    scale = np.max(x * x + y * y)
    degenerate = abs(F) < critical_rtol * scale or np.linalg.matrix_rank(np.c_[x, y], tol=1e-12 * np.sqrt(scale)) < 2
    if degenerate:
        kind = "ii"
    else:
        # F = -(R.xi_c)/4
        kind = _TYPES[classify_sign(-4 * F, 0.0)]
    return TrajectoryFit(
        B=float(B),
        C=float(C),
        F=float(F),
        cot_phi1=float(cot),
        discriminant=float(B * B - 4 * C),
        asymptote_slopes=slopes,
        trajectory_type=kind,
        degenerate=bool(degenerate),
        points=tuple(eps),
    )


def trajectory_rows(sec: SectionResult):
    """(step, E, label) rows for both poles, exact energies."""
    rows = []
    for i, s in enumerate(sec.sweep):
        rows.append((i, s.E1, "a"))
        rows.append((i, s.E2, "b"))
    return rows


@dataclass(frozen=True)
class LoopResult:
    path: tuple
    windings: int
    permutation: str
    max_residual: float
    samples: tuple = field(repr=False, default=())
    initial: tuple = ()
    final: tuple = ()

    @property
    def mismatch(self):
        """Distance between final and initial positions under the reported permutation."""
        (a0, b0), (a1, b1) = self.initial, self.final
        if self.permutation == "swap":
            return max(abs(a1 - b0), abs(b1 - a0))
        return max(abs(a1 - a0), abs(b1 - b0))


def loop_path(ep: ExceptionalPoint, coeffs: UnfoldingCoefficients, radius=1e-2, windings=1,
              samples_per_turn=256, center_offset=(0.0, 0.0)):
    """Ellipse around (d*, v3*) + offset with semi-axes radius * sqrt(|c1||c2|)/|c_i|.

    Returns (turn_fraction array, list of ControlPoint).
    """
    a1, a2 = abs(coeffs.c[0]), abs(coeffs.c[1])
    g = np.sqrt(a1 * a2)
    s1, s2 = radius * g / a1, radius * g / a2
    t = np.arange(windings * samples_per_turn + 1) / samples_per_turn
    th = 2 * np.pi * t
    d = ep.d_star + center_offset[0] + s1 * np.cos(th)
    v = ep.v3_star + center_offset[1] + s2 * np.sin(th)
    return t, [ControlPoint(float(a), float(b)) for a, b in zip(d, v)]


def encircle(ep: ExceptionalPoint, coeffs: UnfoldingCoefficients, radius=1e-2, windings=1,
             samples_per_turn=256, center_offset=(0.0, 0.0), tol=1e-6):
    """Transport the doublet around a closed loop and report the permutation."""
    if samples_per_turn < 64:
        raise ValueError("samples_per_turn must be at least 64")
    if windings < 1:
        raise ValueError("windings must be positive")
    t, path = loop_path(ep, coeffs, radius, windings, samples_per_turn, center_offset)
    xi0 = (path[0].d - ep.d_star, path[0].v3 - ep.v3_star)
    start = doublet_near_ep(ep, coeffs, xi0)
    tracked = track_doublet(ep.profile, path, start)
    resid = max(max(abs(jost_function(s.profile, s.k1)), abs(jost_function(s.profile, s.k2))) for s in tracked)
    a0, b0 = tracked[0].k1, tracked[0].k2
    a1, b1 = tracked[-1].k1, tracked[-1].k2
    same = max(abs(a1 - a0), abs(b1 - b0))
    crossed = max(abs(a1 - b0), abs(b1 - a0))
    if same < tol and same <= crossed:
        perm = "identity"
    elif crossed < tol:
        perm = "swap"
    else:
        raise NonConvergence(f"loop did not close: identity mismatch {same:.3e}, swap mismatch {crossed:.3e}")
    return LoopResult(
        path=tuple(path),
        windings=windings,
        permutation=perm,
        max_residual=float(resid),
        samples=tuple(zip(t, tracked)),
        initial=(a0, b0),
        final=(a1, b1),
    )
