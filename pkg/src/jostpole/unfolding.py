"""First-order unfolding of the doublet at the exceptional point.

Near the exceptional point (d*, v3*) the doublet is described by

    (k1 + k2)/2 = k_d + sum_i dvec_i xi_i + O(xi^2)
    (k1 - k2)^2 =       sum_i c_i   xi_i + O(xi^2)

with xi = (d - d*, v3 - v3*). The coefficients follow from derivatives of
the Jost function at (k_d, d*, v3*) through the implicit function theorem.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptional import ExceptionalPoint
from .jost import jost_k_derivatives, jost_param_derivatives

__all__ = [
    "SecondDerivativeTooSmall",
    "XiPoint",
    "UnfoldingCoefficients",
    "branch_sqrt",
    "compute_coefficients",
    "contact_k",
    "contact_energy",
    "energy_split",
    "cut_lines",
    "doublet_polynomial",
]


class SecondDerivativeTooSmall(ArithmeticError):
    pass


@dataclass(frozen=True)
class XiPoint:
    xi1: float
    xi2: float

    @property
    def vec(self):
        return np.array([self.xi1, self.xi2])

    @property
    def norm(self):
        return float(np.hypot(self.xi1, self.xi2))

    @classmethod
    def from_control(cls, ep: ExceptionalPoint, control) -> "XiPoint":
        return cls(control.d - ep.d_star, control.v3 - ep.v3_star)


def branch_sqrt(F):
    """Square root with arg F taken in [0, 2pi); the cut runs along the positive real axis.

    Vectorised. The result always has a non-negative imaginary part.
    """
    F = np.asarray(F, dtype=complex)
    arg = np.mod(np.angle(F), 2 * np.pi)
    out = np.sqrt(np.abs(F)) * np.exp(0.5j * arg)
    return out[()] if out.ndim == 0 else out


def _unit_perp(v, prefer):
    """Unit vector orthogonal to ``v`` whose dot product with ``prefer`` is <= 0."""
    u = np.array([-v[1], v[0]]) / np.hypot(*v)
    return -u if np.dot(prefer, u) > 0 else u


@dataclass(frozen=True)
class UnfoldingCoefficients:
    k_d: complex
    c: tuple
    dvec: tuple
    second_deriv: complex
    third_deriv: complex
    d_star: float
    v3_star: float

    @property
    def E_d(self):
        return self.k_d**2

    @property
    def C(self):
        # (hbar^2 k_d / m)^2 c_i with hbar^2/2m = 1
        return tuple(4 * self.k_d**2 * ci for ci in self.c)

    @property
    def Rvec(self):
        return np.array([C.real for C in self.C])

    @property
    def Ivec(self):
        return np.array([C.imag for C in self.C])

    @property
    def xi_hat0(self):
        """Direction of the energy-plane branch cut: I . xi0 = 0 and R . xi0 < 0."""
        return _unit_perp(self.Ivec, self.Rvec)

    @property
    def xi_hat0_k(self):
        """Same construction applied to c_i, i.e. the cut of the k-plane surfaces."""
        re = np.array([c.real for c in self.c])
        im = np.array([c.imag for c in self.c])
        return _unit_perp(im, re)

    def as_dict(self):
        pair = lambda z: [float(z.real), float(z.imag)]  # noqa: E731
        return {
            "k_d": pair(self.k_d),
            "E_d": pair(self.E_d),
            "d_star": float(self.d_star),
            "v3_star": float(self.v3_star),
            "c1": pair(self.c[0]),
            "c2": pair(self.c[1]),
            "d1": pair(self.dvec[0]),
            "d2": pair(self.dvec[1]),
            "C1": pair(self.C[0]),
            "C2": pair(self.C[1]),
            "Rvec": [float(x) for x in self.Rvec],
            "Ivec": [float(x) for x in self.Ivec],
            "xi_hat0": [float(x) for x in self.xi_hat0],
            "xi_hat0_k": [float(x) for x in self.xi_hat0_k],
            "f2": pair(self.second_deriv),
            "f3": pair(self.third_deriv),
        }


def compute_coefficients(ep: ExceptionalPoint) -> UnfoldingCoefficients:
    prof, k = ep.profile, ep.k_d
    f0 = abs(ep.residuals[0]) if ep.residuals else 0.0
    _, f2, f3 = jost_k_derivatives(prof, k, 3)
    if abs(f2) < 1e-6 * max(1.0, f0):
        raise SecondDerivativeTooSmall(f"|f''(k_d)| = {abs(f2):.3e}: not a rank-one branch point")
    fd, fv, fdk, fvk = jost_param_derivatives(prof, k)
    c = tuple(-8.0 * fx / f2 for fx in (fd, fv))
    dvec = tuple(-(fxk - f3 * fx / (3.0 * f2)) / f2 for fx, fxk in ((fd, fdk), (fv, fvk)))
    return UnfoldingCoefficients(k, c, dvec, f2, f3, ep.d_star, ep.v3_star)


def _xi(xi):
    if isinstance(xi, XiPoint):
        return xi.xi1, xi.xi2
    xi = np.asarray(xi, dtype=float)
    return xi[..., 0], xi[..., 1]


def _warn_far(x1, x2):
    if np.any(np.hypot(x1, x2) > 0.1):
        warnings.warn("contact approximant evaluated far from the exceptional point (|xi| > 0.1)", stacklevel=3)


def contact_k(coeffs: UnfoldingCoefficients, xi):
    """Both branches k_d + sum d_i xi_i +/- sqrt(sum c_i xi_i / 4).

    ``xi`` is an XiPoint or an array with trailing dimension 2.
    """
    x1, x2 = _xi(xi)
    _warn_far(x1, x2)
    centre = coeffs.k_d + coeffs.dvec[0] * x1 + coeffs.dvec[1] * x2
    root = branch_sqrt(0.25 * (coeffs.c[0] * x1 + coeffs.c[1] * x2))
    return centre + root, centre - root


def energy_split(coeffs: UnfoldingCoefficients, xi):
    """(R . xi, I . xi)."""
    x1, x2 = _xi(xi)
    R, I = coeffs.Rvec, coeffs.Ivec
    return R[0] * x1 + R[1] * x2, I[0] * x1 + I[1] * x2


def contact_energy(coeffs: UnfoldingCoefficients, xi):
    """(E1, E2, eps) with E_{1,2} = E_d + dE_d(xi) +/- eps.

    eps = sqrt((C1 xi1 + C2 xi2)/4) on the branch of :func:`branch_sqrt`;
    dE_d is the linear shift 2 k_d sum d_i xi_i.
    """
    x1, x2 = _xi(xi)
    _warn_far(x1, x2)
    C1, C2 = coeffs.C
    eps = branch_sqrt(0.25 * (C1 * x1 + C2 * x2))
    shift = 2 * coeffs.k_d * (coeffs.dvec[0] * x1 + coeffs.dvec[1] * x2)
    base = coeffs.E_d + shift
    return base + eps, base - eps, eps


def eps_parts(coeffs: UnfoldingCoefficients, xi):
    """Re eps and Im eps from the closed forms, signs paired so that
    sgn(Re) sgn(Im) = sgn(I . xi), matching the branch of contact_energy."""
    rx, ix = energy_split(coeffs, xi)
    mod = np.hypot(rx, ix)
    re = np.sqrt(np.maximum(mod + rx, 0.0)) / (2 * np.sqrt(2))
    im = np.sqrt(np.maximum(mod - rx, 0.0)) / (2 * np.sqrt(2))
    return np.sign(ix) * re + (ix == 0) * re, im


def cut_lines(coeffs: UnfoldingCoefficients, plane="energy"):
    """Unit directions of the cuts L_R (Re parts joined) and L_I (Im parts joined).

    ``plane="energy"`` uses the energy coefficients C_i, ``plane="k"`` the
    wave-number coefficients c_i.
    """
    if plane == "energy":
        xi0 = coeffs.xi_hat0
    elif plane == "k":
        xi0 = coeffs.xi_hat0_k
    else:
        raise ValueError("plane must be 'energy' or 'k'")
    return xi0, -xi0


def doublet_polynomial(coeffs: UnfoldingCoefficients, k, xi):
    """The two-parameter quadratic model (k - k_d - sum d_i xi_i)^2 - sum c_i xi_i / 4."""
    x1, x2 = _xi(xi)
    centre = coeffs.k_d + coeffs.dvec[0] * x1 + coeffs.dvec[1] * x2
    return (k - centre) ** 2 - 0.25 * (coeffs.c[0] * x1 + coeffs.c[1] * x2)
