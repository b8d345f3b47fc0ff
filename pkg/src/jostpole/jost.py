"""Regular solution, logarithmic-derivative chain and the exact Jost function.

All evaluators in this module share one vectorised kernel, ``_chain``, that
accepts broadcastable (possibly complex) arrays for ``k``, ``d`` and ``v3``.
Letting ``d`` and ``v3`` be complex is what makes the derivative routines
work: the Jost function is entire in all three variables, so every partial
derivative is a Taylor coefficient that can be read off an FFT of samples
on a small circle (or torus) around the evaluation point.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from types import SimpleNamespace

import numpy as np

from .potential import PotentialProfile

__all__ = [
    "ChainSingularity",
    "DerivativePrecision",
    "PoleOnAxis",
    "LogDerivChain",
    "log_deriv_chain",
    "regular_solution",
    "asymptotic_coefficients",
    "jost_function",
    "jost_values",
    "jost_k_derivatives",
    "jost_param_derivatives",
    "s_matrix",
    "phase_shift_sweep",
    "zero_threshold",
    "is_zero",
    "TAU_ABS",
    "TAU_REL",
]

TAU_ABS = 1e-10
TAU_REL = 1e-8

# |Re| or |Im| beyond which hyperbolic / trigonometric factors are carried
# as (mantissa, log-magnitude) pairs.
_SCALE_AT = 30.0
# Relative size below which a chain denominator is treated as vanishing.
_SINGULAR_RTOL = 1e-10


class ChainSingularity(ArithmeticError):
    """A denominator of the logarithmic-derivative chain vanished."""

    def __init__(self, stage, k):
        super().__init__(f"logarithmic-derivative chain is singular at stage {stage} (k={k!r})")
        self.stage = stage
        self.k = k


class DerivativePrecision(ArithmeticError):
    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (estimated error {error_estimate:.3e})")
        self.error_estimate = error_estimate


class PoleOnAxis(ArithmeticError):
    pass


@dataclass(frozen=True)
class LogDerivChain:
    alpha1: complex
    alpha2: complex
    alpha3: complex
    alpha4: complex

    def as_tuple(self):
        return (self.alpha1, self.alpha2, self.alpha3, self.alpha4)


def _scaled_cos(z):
    """cos(z) as (mantissa, log-magnitude) so that cos z = m * exp(s)."""
    z = np.asarray(z, dtype=complex)
    big = np.abs(z.imag) > _SCALE_AT
    if not np.any(big):
        return np.cos(z), np.zeros(z.shape)
    # cos is even: fold onto Im w <= 0, where exp(i w) is the dominant term
    w = np.where(z.imag > 0, -z, z)
    with np.errstate(over="ignore", invalid="ignore"):
        mant = np.where(big, 0.5 * (np.exp(1j * w.real) + np.exp(-1j * w.real + 2.0 * w.imag)), np.cos(z))
    return mant, np.where(big, -w.imag, 0.0)


def _scaled_cosh(x):
    return _scaled_cos(1j * np.asarray(x, dtype=complex))


def _scaled_sin(z):
    z = np.asarray(z, dtype=complex)
    mant, logm = _scaled_cos(z - np.pi / 2)
    with np.errstate(over="ignore", invalid="ignore"):
        mant = np.where(logm == 0.0, np.sin(z), mant)
    return mant, logm


def _chain(fixed, k, d, v3, branch=(1, 1, 1), check=False):
    """Evaluate wave numbers, the alpha chain and its denominators.

    With ``check`` set (scalar use), a vanishing denominator raises
    ChainSingularity instead of silently producing inf/nan.
    """
    k = np.asarray(k, dtype=complex)
    d = np.asarray(d, dtype=complex)
    v3 = np.asarray(v3, dtype=complex)
    U3 = fixed.well_level(v3)
    kk = k * k
    K2 = branch[0] * np.sqrt(fixed.U2 - kk)
    K3 = branch[1] * np.sqrt(kk - U3)
    K4 = branch[2] * np.sqrt(fixed.U4 - kk)

    x1 = k * fixed.r1
    x2 = K2 * d
    x3 = K3 * fixed.w3
    x4 = K4 * fixed.w4
    k0 = k == 0

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t1 = np.tan(x1)
        t2 = np.tanh(x2)
        t3 = np.tan(x3)
        t4 = np.tanh(x4)
        # k cot(k r1) -> 1/r1 as k -> 0
        kcot = np.where(k0, 1.0 / fixed.r1, k / np.where(k0, 1.0, t1))
        a1 = kcot / K2
        den2 = 1.0 + a1 * t2
        a2 = K2 / K3 * (a1 + t2) / den2
        den3 = 1.0 + a2 * t3
        a3 = K3 / K4 * (a2 - t3) / den3
        den4 = 1.0 + a3 * t4
        a4 = K4 / np.where(k0, 1.0, k) * (a3 + t4) / den4
        a4 = np.where(k0, np.inf, a4)

    if check:
        kval = complex(k) if k.ndim == 0 else k
        stages = (
            ("alpha1", a1, 1.0, 1.0),
            ("alpha2", a2, den2, 1.0 + np.abs(a1 * t2)),
            ("alpha3", a3, den3, 1.0 + np.abs(a2 * t3)),
            ("alpha4", a4 if not np.all(k0) else a3, den4, 1.0 + np.abs(a3 * t4)),
        )
        for stage, alpha, den, scale in stages:
            if not np.all(np.isfinite(alpha)) or np.any(np.abs(den) <= _SINGULAR_RTOL * scale):
                raise ChainSingularity(stage, kval)

    return SimpleNamespace(
        k=k, d=d, v3=v3, K2=K2, K3=K3, K4=K4, x1=x1, x2=x2, x3=x3, x4=x4,
        t2=t2, t3=t3, t4=t4, a1=a1, a2=a2, a3=a3, a4=a4,
        den2=den2, den3=den3, den4=den4, k0=k0, fixed=fixed,
    )


def _jost_from_chain(ch):
    fixed = ch.fixed
    s1, m1 = _scaled_sin(ch.x1)
    c2, m2 = _scaled_cosh(ch.x2)
    c3, m3 = _scaled_cos(ch.x3)
    c4, m4 = _scaled_cosh(ch.x4)
    r4 = fixed.r1 + ch.d + fixed.w3 + fixed.w4
    phase = 1j * ch.k * r4
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # sin(k r1)/k -> r1 at k = 0
        s1_over_k = np.where(ch.k0, fixed.r1, s1 / np.where(ch.k0, 1.0, ch.k))
        brace = ch.K4 * (ch.t4 + ch.a3) * s1_over_k - 1j * ch.den4 * s1
        mant = c2 * ch.den2 * c3 * ch.den3 * c4 * brace * np.exp(1j * phase.imag)
        out = mant * np.exp(m1 + m2 + m3 + m4 + phase.real)
    return out


def _unpack(out):
    return out[()] if np.ndim(out) == 0 else out


def jost_values(profile_or_fixed, k, d=None, v3=None, branch=(1, 1, 1)):
    """Vectorised, unchecked Jost function f(-k; d, v3).

    Accepts either a PotentialProfile (``d``/``v3`` default to its control
    point) or a FixedParams with explicit ``d`` and ``v3``. Singular chain
    points come back as inf/nan rather than raising.
    """
    fixed, d, v3 = _resolve(profile_or_fixed, d, v3)
    return _unpack(_jost_from_chain(_chain(fixed, k, d, v3, branch)))


def _resolve(profile_or_fixed, d, v3):
    if isinstance(profile_or_fixed, PotentialProfile):
        c = profile_or_fixed.control
        return profile_or_fixed.fixed, (c.d if d is None else d), (c.v3 if v3 is None else v3)
    if d is None or v3 is None:
        raise TypeError("d and v3 are required when passing FixedParams")
    return profile_or_fixed, d, v3


def log_deriv_chain(profile: PotentialProfile, k) -> LogDerivChain:
    """alpha_1..alpha_4 by successive substitution through the four matching radii."""
    c = profile.control
    ch = _chain(profile.fixed, complex(k), c.d, c.v3, check=True)
    return LogDerivChain(complex(ch.a1), complex(ch.a2), complex(ch.a3), complex(ch.a4))


def jost_function(profile: PotentialProfile, k, branch=(1, 1, 1)) -> complex:
    """Exact Jost function f(-k; d, v3) for a single k.

    ``branch`` multiplies (K2, K3, K4) by the given signs; the value does
    not depend on that choice. Raises ChainSingularity at removable
    singular points of the chain representation.
    """
    c = profile.control
    ch = _chain(profile.fixed, complex(k), c.d, c.v3, branch=branch, check=True)
    return complex(_jost_from_chain(ch))


def regular_solution(profile: PotentialProfile, k, r, with_derivative=False):
    """Regular solution phi(k, r), phi(0) = 0 and phi'(0) = 1.

    ``r`` may be an array. Returns phi, or (phi, dphi/dr) when
    ``with_derivative`` is set.
    """
    c = profile.control
    ch = _chain(profile.fixed, complex(k), c.d, c.v3, check=True)
    k = complex(k)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be non-negative")
    r1, r2, r3, r4 = profile.radii
    K2, K3, K4 = complex(ch.K2), complex(ch.K3), complex(ch.K4)
    a1, a2, a3, a4 = (complex(a) for a in (ch.a1, ch.a2, ch.a3, ch.a4))

    phi_r1 = r1 if k == 0 else np.sin(k * r1) / k
    phi_r2 = phi_r1 * (np.cosh(K2 * (r2 - r1)) + a1 * np.sinh(K2 * (r2 - r1)))
    phi_r3 = phi_r2 * (np.cos(K3 * (r3 - r2)) + a2 * np.sin(K3 * (r3 - r2)))
    phi_r4 = phi_r3 * (np.cosh(K4 * (r4 - r3)) + a3 * np.sinh(K4 * (r4 - r3)))

    phi = np.empty(r.shape, dtype=complex)
    dphi = np.empty(r.shape, dtype=complex)

    m = r <= r1
    if k == 0:
        phi[m], dphi[m] = r[m], 1.0
    else:
        phi[m], dphi[m] = np.sin(k * r[m]) / k, np.cos(k * r[m])
    m = (r > r1) & (r <= r2)
    x = K2 * (r[m] - r1)
    phi[m] = phi_r1 * (np.cosh(x) + a1 * np.sinh(x))
    dphi[m] = phi_r1 * K2 * (np.sinh(x) + a1 * np.cosh(x))
    m = (r > r2) & (r <= r3)
    x = K3 * (r[m] - r2)
    phi[m] = phi_r2 * (np.cos(x) + a2 * np.sin(x))
    dphi[m] = phi_r2 * K3 * (-np.sin(x) + a2 * np.cos(x))
    m = (r > r3) & (r <= r4)
    x = K4 * (r[m] - r3)
    phi[m] = phi_r3 * (np.cosh(x) + a3 * np.sinh(x))
    dphi[m] = phi_r3 * K4 * (np.sinh(x) + a3 * np.cosh(x))
    m = r > r4
    if np.any(m):
        if k == 0:
            raise ChainSingularity("alpha4", k)
        x = k * (r[m] - r4)
        phi[m] = phi_r4 * (np.cos(x) + a4 * np.sin(x))
        dphi[m] = phi_r4 * k * (-np.sin(x) + a4 * np.cos(x))

    phi, dphi = _unpack(phi), _unpack(dphi)
    return (phi, dphi) if with_derivative else phi


def asymptotic_coefficients(profile: PotentialProfile, k):
    """(outgoing, incoming) amplitudes of phi beyond r4.

    phi(k, r) = out * exp(ik(r - r4)) + inc * exp(-ik(r - r4)) for r >= r4.
    """
    chain = log_deriv_chain(profile, k)
    phi_r4 = regular_solution(profile, k, profile.r4)
    a4 = chain.alpha4
    return 0.5 * phi_r4 * (1 - 1j * a4), 0.5 * phi_r4 * (1 + 1j * a4)


def _taylor_1d(fun, z0, rho, n):
    """Taylor coefficients a_0..a_{n-1} of ``fun`` about z0 from n samples on |z - z0| = rho."""
    for attempt in range(4):
        offset = attempt * np.pi / n
        theta = 2 * np.pi * np.arange(n) / n + offset
        vals = fun(z0 + rho * np.exp(1j * theta))
        if np.all(np.isfinite(vals)):
            coeffs = np.fft.fft(vals) / n
            m = np.arange(n)
            return coeffs * np.exp(-1j * m * offset) / rho**m, np.max(np.abs(vals))
    raise ChainSingularity("contour", z0)


def _taylor_2d(fun, z0, w0, rz, rw, n):
    """Coefficients a[m, p] of (z - z0)^m (w - w0)^p from an n x n torus of samples."""
    for attempt in range(4):
        offset = attempt * np.pi / n
        theta = 2 * np.pi * np.arange(n) / n + offset
        zz = z0 + rz * np.exp(1j * theta)[:, None]
        ww = w0 + rw * np.exp(1j * theta)[None, :]
        vals = fun(zz, ww)
        if np.all(np.isfinite(vals)):
            coeffs = np.fft.fft2(vals) / n**2
            m = np.arange(n)
            phase = np.exp(-1j * m * offset)
            return coeffs * (phase / rz**m)[:, None] * (phase / rw**m)[None, :]
    raise ChainSingularity("contour", z0)


_K_RADIUS = 0.1
_P_RADIUS = 0.05
_NODES = 32


def _k_derivs(profile, k, max_order, rho=_K_RADIUS, n=_NODES):
    c = profile.control
    coeffs, fmax = _taylor_1d(lambda z: jost_values(profile.fixed, z, c.d, c.v3), complex(k), rho, n)
    return [factorial(m) * coeffs[m] for m in range(1, max_order + 1)], fmax


def jost_k_derivatives(profile: PotentialProfile, k, max_order: int = 3):
    """[f', f'', f'''] (up to ``max_order``) with respect to k.

    Derivatives come from Cauchy's integral formula, evaluated by FFT on
    two concentric circles; disagreement between the two radii beyond
    1e-8 of the natural scale raises DerivativePrecision.
    """
    if max_order not in (1, 2, 3):
        raise ValueError("max_order must be 1, 2 or 3")
    coarse, fmax = _k_derivs(profile, k, max_order, _K_RADIUS)
    fine, _ = _k_derivs(profile, k, max_order, _K_RADIUS / 2)
    for m, (a, b) in enumerate(zip(coarse, fine), start=1):
        scale = fmax * factorial(m) / _K_RADIUS**m
        err = abs(a - b)
        if not err <= 1e-8 * scale:
            raise DerivativePrecision(f"order-{m} k-derivative unstable", err / scale)
    return coarse


def jost_param_derivatives(profile: PotentialProfile, k):
    """(df/dd, df/dv3, d2f/dd dk, d2f/dv3 dk) at fixed k."""
    fixed, c = profile.fixed, profile.control
    k = complex(k)
    n = 16
    ad = _taylor_2d(lambda z, w: jost_values(fixed, z, w, c.v3), k, c.d, _K_RADIUS, _P_RADIUS, n)
    av = _taylor_2d(lambda z, w: jost_values(fixed, z, c.d, w), k, c.v3, _K_RADIUS, _P_RADIUS, n)
    return complex(ad[0, 1]), complex(av[0, 1]), complex(ad[1, 1]), complex(av[1, 1])


def s_matrix(profile: PotentialProfile, k):
    """S(k) and the phase shift delta(k) = arg(S)/2 for real k > 0.

    ``jost_function(k)`` is the incoming-wave coefficient, whose complex
    conjugate for real k is the same expression at -k. S is therefore
    formed as f(-k)/f(k) without conjugating, so that unitarity is a
    genuine numerical property rather than an identity.
    """
    k = float(k)
    if not k > 0:
        raise ValueError("s_matrix requires real k > 0")
    f_plus = jost_function(profile, k)
    if f_plus == 0:
        raise PoleOnAxis(f"Jost function vanishes on the real axis at k={k}")
    f_minus = jost_function(profile, -k)
    S = f_minus / f_plus
    return S, 0.5 * np.angle(S)


def phase_shift_sweep(profile: PotentialProfile, ks):
    """Continuous phase shift along an increasing grid of real k."""
    ks = np.asarray(ks, dtype=float)
    vals = jost_values(profile, ks)
    return np.unwrap(-np.angle(vals))


def zero_threshold(profile: PotentialProfile, k, tau_abs=TAU_ABS, tau_rel=TAU_REL, radius=1e-2):
    """Scale-aware bound below which |f(k)| counts as zero."""
    theta = 2 * np.pi * np.arange(16) / 16
    ring = jost_values(profile, complex(k) + radius * np.exp(1j * theta))
    return tau_abs + tau_rel * float(np.median(np.abs(ring)))


def is_zero(profile: PotentialProfile, k, **kw) -> bool:
    return abs(jost_function(profile, k)) < zero_threshold(profile, k, **kw)
