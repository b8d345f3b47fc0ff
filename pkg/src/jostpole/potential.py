"""Piecewise-constant double-barrier radial potential.

Internal units put hbar^2/2m = 1, so an energy E corresponds to k**2 and
the potential enters the radial equation as U(r) directly. Regions are
numbered as in the usual picture of the double barrier::

    1: 0  < r < r1   inner well, U = 0
    2: r1 < r < r2   inner barrier, U = U2       (r2 = r1 + d)
    3: r2 < r < r3   outer well,   U = U3        (r3 = r2 + w3)
    4: r3 < r < r4   outer barrier, U = U4       (r4 = r3 + w4)
    5: r  > r4       free region,  U = 0
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "FixedParams",
    "ControlPoint",
    "PotentialProfile",
    "region_wave_number",
    "default_fixed",
    "default_profile",
]


@dataclass(frozen=True)
class FixedParams:
    """The five parameters held fixed while (d, v3) are varied.

    ``well_scale`` and ``outer_well_sign`` fix how the outer-well control
    value ``v3`` maps to the potential level of region 3:
    ``U3 = outer_well_sign * well_scale * v3``.
    """

    U2: float = 8.0
    U4: float = 8.0
    r1: float = 1.0
    w3: float = 1.0
    w4: float = 0.304892
    well_scale: float = 2.0
    outer_well_sign: int = 1

    def __post_init__(self):
        if not (self.r1 > 0 and self.w3 >= 0 and self.w4 > 0):
            raise ValueError(f"radii/widths must be positive: r1={self.r1}, w3={self.w3}, w4={self.w4}")
        if not (self.U2 > 0 and self.U4 > 0):
            raise ValueError(f"barrier heights must be positive: U2={self.U2}, U4={self.U4}")
        if self.outer_well_sign not in (1, -1):
            raise ValueError("outer_well_sign must be +1 or -1")

    def well_level(self, v3):
        return self.outer_well_sign * self.well_scale * v3


@dataclass(frozen=True)
class ControlPoint:
    d: float
    v3: float

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"inner barrier thickness must be positive, got d={self.d}")

    def shifted(self, dd=0.0, dv3=0.0) -> "ControlPoint":
        return ControlPoint(self.d + dd, self.v3 + dv3)


@dataclass(frozen=True)
class PotentialProfile:
    fixed: FixedParams
    control: ControlPoint

    @property
    def r1(self):
        return self.fixed.r1

    @property
    def r2(self):
        return self.fixed.r1 + self.control.d

    @property
    def r3(self):
        return self.r2 + self.fixed.w3

    @property
    def r4(self):
        return self.r3 + self.fixed.w4

    @property
    def radii(self):
        return (self.r1, self.r2, self.r3, self.r4)

    @property
    def U3(self):
        return self.fixed.well_level(self.control.v3)

    def level(self, region_index: int):
        """Potential value U_i of region 2, 3 or 4."""
        if region_index == 2:
            return self.fixed.U2
        if region_index == 3:
            return self.U3
        if region_index == 4:
            return self.fixed.U4
        raise ValueError(f"region_index must be 2, 3 or 4, got {region_index!r}")

    def with_control(self, control: ControlPoint) -> "PotentialProfile":
        return replace(self, control=control)

    def potential(self, r):
        """U(r) sampled at radii ``r`` (vectorised)."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        out[(r > self.r1) & (r <= self.r2)] = self.fixed.U2
        out[(r > self.r2) & (r <= self.r3)] = self.U3
        out[(r > self.r3) & (r <= self.r4)] = self.fixed.U4
        return out


def region_wave_number(profile: PotentialProfile, region_index: int, k):
    """Wave number K_i(k) = sqrt((-1)^i (U_i - k^2)) on the principal branch.

    Works on scalars and arrays. Regions 2 and 4 are barriers
    (K = sqrt(U - k^2)), region 3 is the outer well (K = sqrt(k^2 - U3)).
    """
    level = profile.level(region_index)
    k = np.asarray(k, dtype=complex)
    sign = 1.0 if region_index % 2 == 0 else -1.0
    out = np.sqrt(sign * (level - k * k))
    return out[()] if out.ndim == 0 else out


def default_fixed(**overrides) -> FixedParams:
    return replace(FixedParams(), **overrides)


def default_profile(d=2.0, v3=1.04, **overrides) -> PotentialProfile:
    return PotentialProfile(default_fixed(**overrides), ControlPoint(d, v3))
