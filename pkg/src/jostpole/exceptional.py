"""Locating the exceptional point where two Jost zeros merge.

The degeneracy conditions f = 0 and df/dk = 0 are two complex equations
in the four real unknowns (Re k, Im k, d, v3), solved by damped Newton.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .jost import _k_derivs, jost_function, jost_k_derivatives, jost_param_derivatives, zero_threshold
from .potential import ControlPoint, PotentialProfile
from .rootfind import Doublet, KWindow, NonConvergence, count_zeros, track_doublet

log = logging.getLogger(__name__)

__all__ = ["SingularJacobian", "ExceptionalPoint", "EPReport", "locate_ep", "close_doublet", "verify_ep", "degeneracy_residual"]


class SingularJacobian(ArithmeticError):
    pass


@dataclass(frozen=True)
class ExceptionalPoint:
    profile: PotentialProfile
    k_d: complex
    residuals: tuple
    second_deriv: complex
    iterations: int = 0
    trace: tuple = field(default=(), repr=False)

    @property
    def control_star(self) -> ControlPoint:
        return self.profile.control

    @property
    def d_star(self):
        return self.profile.control.d

    @property
    def v3_star(self):
        return self.profile.control.v3

    @property
    def E_d(self):
        return self.k_d**2


def degeneracy_residual(profile: PotentialProfile, k):
    """(f, f') at k."""
    (d1,), _ = _k_derivs(profile, k, 1)
    return jost_function(profile, k), d1


def _system(profile, x):
    k = complex(x[0], x[1])
    prof = profile.with_control(ControlPoint(x[2], x[3]))
    f = jost_function(prof, k)
    (f1, f2), _ = _k_derivs(prof, k, 2)
    res = np.array([f.real, f.imag, f1.real, f1.imag])
    return res, prof, k, f, f1, f2


def _jacobian(prof, k, f1, f2):
    fd, fv, fdk, fvk = jost_param_derivatives(prof, k)
    cols = [
        (f1, f2),
        (1j * f1, 1j * f2),
        (fd, fdk),
        (fv, fvk),
    ]
    J = np.empty((4, 4))
    for j, (a, b) in enumerate(cols):
        J[:, j] = [a.real, a.imag, b.real, b.imag]
    return J


def _zero_velocity(prof, k):
    """dk/dd and dk/dv3 of a simple zero, by implicit differentiation."""
    (f1,), _ = _k_derivs(prof, k, 1)
    fd, fv, _, _ = jost_param_derivatives(prof, k)
    return -fd / f1, -fv / f1


def close_doublet(initial: Doublet, gap_tol=1e-4, max_iter=60, max_halvings=12, max_step=0.2):
    """Drive the doublet towards coalescence by Newton on D = (k1 - k2)^2.

    D is analytic in (d, v3) and vanishes linearly at the exceptional
    point, so this converges from much further away than the full
    four-dimensional system. Every trial point is reached by continuation,
    which keeps the two zeros' identities.
    """
    cur = initial
    for _ in range(max_iter):
        if cur.gap < gap_tol:
            return cur
        prof = cur.profile
        D = (cur.k1 - cur.k2) ** 2
        v1 = _zero_velocity(prof, cur.k1)
        v2 = _zero_velocity(prof, cur.k2)
        grad = [2 * (cur.k1 - cur.k2) * (a - b) for a, b in zip(v1, v2)]
        J = np.array([[g.real for g in grad], [g.imag for g in grad]])
        step = np.linalg.solve(J, [-D.real, -D.imag])
        c = cur.control
        lam = min(1.0, max_step / np.linalg.norm(step))
        for _ in range(max_halvings):
            if c.d + lam * step[0] > 0:
                target = ControlPoint(c.d + lam * step[0], c.v3 + lam * step[1])
                try:
                    trial = track_doublet(initial.profile, [c, target], cur)[-1]
                except (NonConvergence, ArithmeticError):
                    trial = None
                if trial is not None and abs((trial.k1 - trial.k2) ** 2) < abs(D):
                    break
            lam /= 2
        else:
            raise NonConvergence("discriminant continuation stalled", cur.control, abs(D))
        cur = trial
        log.debug("discriminant stage: control=%s gap=%.3e", cur.control, cur.gap)
    return cur


def locate_ep(initial: Doublet, tol=1e-10, max_iter=60, max_halvings=8, presolve=True) -> ExceptionalPoint:
    """Damped Newton for f = f' = 0 started from the doublet midpoint.

    When the doublet is still well split, ``presolve`` first brings it
    close to coalescence with :func:`close_doublet`. Converged when both
    the residual norm and the step norm fall below ``tol``. Raises
    NonConvergence (with the iteration trace) or SingularJacobian.
    """
    if presolve and initial.gap > 1e-4:
        initial = close_doublet(initial)
    base = initial.profile
    kmid = 0.5 * (initial.k1 + initial.k2)
    x = np.array([kmid.real, kmid.imag, initial.control.d, initial.control.v3])
    res, prof, k, f, f1, f2 = _system(base, x)
    trace = [(x.copy(), float(np.linalg.norm(res)))]
    for it in range(1, max_iter + 1):
        J = _jacobian(prof, k, f1, f2)
        if np.linalg.cond(J) > 1e14:
            raise SingularJacobian(f"degeneracy Jacobian is singular at {x}; doublet may not be isolated")
        step = np.linalg.solve(J, -res)
        norm0 = np.linalg.norm(res)
        lam = 1.0
        for _ in range(max_halvings + 1):
            trial = x + lam * step
            if trial[2] > 0:
                try:
                    out = _system(base, trial)
                except ArithmeticError:
                    out = None
                if out is not None and np.linalg.norm(out[0]) < norm0:
                    break
            lam /= 2
        else:
            # no decrease: accept the full step if we are already at the rounding floor
            if norm0 < tol and np.linalg.norm(step) < tol:
                break
            trial = x + step
            out = _system(base, trial)
        x = trial
        res, prof, k, f, f1, f2 = out
        snorm = np.linalg.norm(lam * step)
        trace.append((x.copy(), float(np.linalg.norm(res))))
        log.debug("EP newton %d: |res|=%.3e |step|=%.3e lam=%g", it, trace[-1][1], snorm, lam)
        if np.linalg.norm(res) < tol and snorm < tol:
            break
    else:
        raise NonConvergence("exceptional-point Newton did not converge", x, float(np.linalg.norm(res)), trace)
    return ExceptionalPoint(
        profile=prof,
        k_d=k,
        residuals=(abs(f), abs(f1)),
        second_deriv=f2,
        iterations=it,
        trace=tuple(trace),
    )


@dataclass(frozen=True)
class EPReport:
    f_abs: float
    fprime_abs: float
    fsecond_abs: float
    zero_threshold: float
    zero_count: int
    precision: float
    is_ep: bool

    def as_dict(self):
        return {
            "abs_f": self.f_abs,
            "abs_fprime": self.fprime_abs,
            "abs_fsecond": self.fsecond_abs,
            "zero_threshold": self.zero_threshold,
            "zero_count": self.zero_count,
            "precision": self.precision,
            "status": "EP" if self.is_ep else "NOT_EP",
        }


def verify_ep(ep: ExceptionalPoint, radius=1e-2) -> EPReport:
    """Check a candidate exceptional point.

    ``precision`` is |k1 - k2| / |k_d| for the two roots of the local
    quadratic model of f at k_d, i.e. how far the doublet is from exact
    coalescence at the returned parameters.
    """
    prof, k = ep.profile, ep.k_d
    f = jost_function(prof, k)
    f1, f2, _ = jost_k_derivatives(prof, k, 3)
    thresh = zero_threshold(prof, k)
    box = KWindow(k.real - radius, k.real + radius, k.imag - radius, k.imag + radius)
    count = count_zeros(prof, box)
    gap = 2 * abs(np.sqrt(complex(f1 * f1 - 2 * f * f2))) / abs(f2)
    precision = gap / abs(k)
    is_ep = abs(f) < thresh and abs(f1) < thresh and abs(f2) > 1e-6 and count == 2
    return EPReport(abs(f), abs(f1), abs(f2), thresh, count, precision, is_ep)
