"""Complex zeros of the Jost function: polishing, window scans, continuation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .jost import _k_derivs, jost_function, jost_values, zero_threshold
from .potential import ControlPoint, PotentialProfile

log = logging.getLogger(__name__)

__all__ = [
    "NonConvergence",
    "DerivativeVanishes",
    "IdentityAmbiguous",
    "KWindow",
    "Doublet",
    "polish_zero",
    "scan_window",
    "count_zeros",
    "track_doublet",
    "quadratic_seeds",
]


class NonConvergence(RuntimeError):
    def __init__(self, message, last=None, residual=None, trace=None):
        super().__init__(message)
        self.last = last
        self.residual = residual
        self.trace = trace


class DerivativeVanishes(ArithmeticError):
    """Newton met |f'| << |f''|: the guess sits on a (near) double zero."""


class IdentityAmbiguous(RuntimeError):
    pass


@dataclass(frozen=True)
class KWindow:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"empty window {self}")

    def contains(self, k, pad=0.0):
        return (self.re_min - pad <= k.real <= self.re_max + pad) and (self.im_min - pad <= k.imag <= self.im_max + pad)

    def boundary(self, n):
        """n points on the counter-clockwise rectangle boundary."""
        corners = [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]
        lengths = [abs(corners[(i + 1) % 4] - corners[i]) for i in range(4)]
        total = sum(lengths)
        pts = []
        for i in range(4):
            m = max(2, int(round(n * lengths[i] / total)))
            t = np.arange(m) / m
            pts.append(corners[i] + t * (corners[(i + 1) % 4] - corners[i]))
        return np.concatenate(pts)


@dataclass(frozen=True)
class Doublet:
    """Two tracked zeros with their identity labels.

    ``degenerate`` marks samples where continuation had to pass through
    the exceptional point, so the label assignment there is arbitrary.
    """

    k1: complex
    k2: complex
    profile: PotentialProfile
    labels: tuple = ("a", "b")
    degenerate: bool = False

    @property
    def control(self) -> ControlPoint:
        return self.profile.control

    @property
    def gap(self):
        return abs(self.k1 - self.k2)

    def by_label(self, label):
        return self.k1 if self.labels[0] == label else self.k2

    def swapped(self) -> "Doublet":
        return replace(self, k1=self.k2, k2=self.k1, labels=self.labels[::-1])


def polish_zero(profile: PotentialProfile, guess, max_iter=50, step_tol=1e-14, full_output=False):
    """Newton refinement k <- k - f/f' of a single zero.

    Stops on a step below ``step_tol`` (relative), or once |f| is under the
    zero criterion and the steps stop shrinking (rounding floor, which is
    what happens next to a near-double zero). Raises DerivativeVanishes on
    |f'| < 1e-12 |f''| and NonConvergence after ``max_iter`` steps.
    With ``full_output`` the number of Newton updates is returned too.
    """
    k = complex(guess)
    thresh = zero_threshold(profile, k)
    trace = []
    prev_step = np.inf
    done = (lambda z, n: (z, n)) if full_output else (lambda z, n: z)
    for it in range(max_iter):
        fk = jost_function(profile, k)
        if not np.isfinite(fk):
            raise NonConvergence("Jost function not finite at iterate", k, fk, trace)
        (d1, d2), _ = _k_derivs(profile, k, 2)
        small = abs(fk) < thresh
        if abs(d1) < 1e-12 * abs(d2):
            if small:
                return done(k, it)
            raise DerivativeVanishes(f"f' vanishes near k={k}; use the exceptional-point solver")
        step = fk / d1
        trace.append((k, abs(fk)))
        if abs(step) <= step_tol * max(1.0, abs(k)) or (small and abs(step) > 0.5 * prev_step):
            return done(k, it)
        k = k - step
        prev_step = abs(step)
        if prev_step > 0.1:
            thresh = zero_threshold(profile, k)
    fk = jost_function(profile, k)
    if abs(fk) < zero_threshold(profile, k):
        return done(k, max_iter)
    raise NonConvergence(f"Newton did not converge in {max_iter} steps", k, abs(fk), trace)


def quadratic_seeds(profile: PotentialProfile, k0):
    """The two roots of the local quadratic Taylor model of f about k0."""
    f0 = jost_function(profile, k0)
    (d1, d2), _ = _k_derivs(profile, k0, 2)
    disc = np.sqrt(complex(d1 * d1 - 2 * f0 * d2))
    return k0 + (-d1 + disc) / d2, k0 + (-d1 - disc) / d2


def count_zeros(profile: PotentialProfile, window: KWindow, n=2048):
    """Zeros enclosed by the window boundary, from the winding of arg f."""
    for _ in range(6):
        pts = window.boundary(n)
        vals = jost_values(profile, pts)
        dphi = np.angle(np.roll(vals, -1) / vals)
        if np.all(np.isfinite(dphi)) and np.max(np.abs(dphi)) < np.pi / 3:
            return int(round(dphi.sum() / (2 * np.pi)))
        n *= 2
    raise NonConvergence("phase winding unresolved on window boundary")


def _grid_minima(mag):
    """Interior and edge cells that are <= all of their neighbours."""
    padded = np.pad(mag, 1, constant_values=np.inf)
    center = padded[1:-1, 1:-1]
    is_min = np.ones_like(center, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue
            is_min &= center <= padded[1 + di : padded.shape[0] - 1 + di, 1 + dj : padded.shape[1] - 1 + dj]
    return np.argwhere(is_min)


def scan_window(profile: PotentialProfile, window: KWindow, grid_n=64, distinct=1e-6):
    """All zeros inside ``window`` found by polishing local minima of |f|."""
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    re = np.linspace(window.re_min, window.re_max, grid_n)
    im = np.linspace(window.im_min, window.im_max, grid_n)
    grid = re[None, :] + 1j * im[:, None]
    mag = np.abs(jost_values(profile, grid))
    mag = np.where(np.isfinite(mag), mag, np.inf)
    found = []
    for i, j in _grid_minima(mag):
        try:
            z = polish_zero(profile, grid[i, j])
        except (NonConvergence, DerivativeVanishes, ArithmeticError) as exc:
            log.debug("seed %s discarded: %s", grid[i, j], exc)
            continue
        if window.contains(z) and all(abs(z - w) > distinct for w in found):
            found.append(z)
    return sorted(found, key=lambda z: (z.real, z.imag))


def _interp_control(a: ControlPoint, b: ControlPoint, t):
    return ControlPoint(a.d + t * (b.d - a.d), a.v3 + t * (b.v3 - a.v3))


def _pair(prev: Doublet, z1, z2):
    if abs(z1 - prev.k2) + abs(z2 - prev.k1) < abs(z1 - prev.k1) + abs(z2 - prev.k2):
        return z2, z1
    return z1, z2


def _step(profile, prev: Doublet, target: ControlPoint, tol):
    """Polish both zeros at ``target`` seeded from ``prev``; None if the step is too big."""
    prof = profile.with_control(target)
    sep = prev.gap
    try:
        if prev.degenerate:
            seeds = quadratic_seeds(prof, 0.5 * (prev.k1 + prev.k2))
        else:
            seeds = (prev.k1, prev.k2)
        z1 = polish_zero(prof, seeds[0])
        z2 = polish_zero(prof, seeds[1])
    except (NonConvergence, DerivativeVanishes, ArithmeticError):
        return None
    if abs(z1 - z2) <= 2 * tol:
        raise IdentityAmbiguous("both seeds converged to the same zero")
    if prev.degenerate:
        # leaving a degenerate point: the new gap must dominate the drift of the centre
        z1, z2 = _pair(prev, z1, z2)
        drift = abs(0.5 * (z1 + z2) - 0.5 * (prev.k1 + prev.k2))
        if drift > 0.5 * abs(z1 - z2):
            return None
        return Doublet(z1, z2, prof, prev.labels)
    # nearest-neighbour matching between consecutive samples
    direct = abs(z1 - prev.k1) + abs(z2 - prev.k2)
    crossed = abs(z1 - prev.k2) + abs(z2 - prev.k1)
    if crossed < direct:
        return None
    if max(abs(z1 - prev.k1), abs(z2 - prev.k2)) >= 0.25 * max(sep, 4 * tol):
        return None
    return Doublet(z1, z2, prof, prev.labels)


def track_doublet(profile: PotentialProfile, path: Sequence[ControlPoint], initial: Doublet,
                  tol=1e-9, min_step=1e-10, max_substeps=100000):
    """Continue a doublet along ``path``, returning one Doublet per path point.

    Each step seeds Newton with the previous zeros and accepts only moves
    smaller than a quarter of the current separation; otherwise the step
    is halved. A step that would need to shrink below ``min_step`` means
    the path runs through the exceptional point: that sample is flagged
    ``degenerate`` and continuation resumes past it.
    """
    path = list(path)
    out = []
    cur = replace(initial, profile=profile.with_control(initial.control))
    substeps = 0
    for idx, target in enumerate(path):
        if idx == 0 and _same(target, cur.control):
            out.append(cur)
            continue
        start = cur.control
        t = 0.0
        h = 1.0
        degenerate = False
        while t < 1.0:
            h = min(h, 1.0 - t)
            nxt = _interp_control(start, target, t + h)
            try:
                res = _step(profile, cur, nxt, tol)
            except IdentityAmbiguous:
                res = None
            length = h * np.hypot(target.d - start.d, target.v3 - start.v3)
            if res is None:
                if length < min_step:
                    res = _force_step(profile, cur, nxt)
                    degenerate = True
                else:
                    h /= 2
                    substeps += 1
                    if substeps > max_substeps:
                        raise NonConvergence("continuation step budget exhausted", cur)
                    continue
            cur = res
            t += h
            h *= 2
        out.append(replace(cur, degenerate=degenerate))
    return out


def _force_step(profile, cur: Doublet, nxt: ControlPoint):
    """Cross a degenerate point: split the merged zero with the quadratic model."""
    prof = profile.with_control(nxt)
    zs = []
    for seed in quadratic_seeds(prof, 0.5 * (cur.k1 + cur.k2)):
        try:
            zs.append(polish_zero(prof, seed))
        except (DerivativeVanishes, NonConvergence):
            zs.append(seed)
    z1, z2 = _pair(cur, *zs)
    return Doublet(z1, z2, prof, cur.labels, degenerate=True)


def _same(a: ControlPoint, b: ControlPoint):
    return a.d == b.d and a.v3 == b.v3
