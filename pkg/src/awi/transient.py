"""Time-domain density-matrix integration used as an oracle for the closed forms.

Equations of motion (interaction picture, hbar = 1, non-degenerate levels)::

    dr31/dt = i gp (r1 - r3) - (G31 - i dp) r31 - i g r32
    dr32/dt = i gp r21* - i g* r31 - [G23 - i (dp - d)] r32
    dr21/dt = i g (r1 - r2) - (G21 - i d) r21 - i gp r32*
    dr3/dt  = 2 Im(gp* r31) - G3 r3 + w23 r2
    dr2/dt  = 2 Im(g* r21)  - G2 r2 + w32 r3
    r1 = 1 - r2 - r3

These follow from the commutator with ``H = -dp|3><3| - d|2><2| -
(gp|3><1| + g|2><1| + h.c.)``.  Note the probe Rabi frequency ``gp`` (not
``g``) in the ``r21*`` and ``r32*`` source terms, and that the weak-probe
steady state is ``r21 = +i g (r1 - r2)/(G21 - i d)``; with these signs the
steady ``r31`` reproduces the closed-form susceptibility exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import DOP853

from .rates import DriveField, RateSet
from .steady import NonConvergenceError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DensityState:
    r31: complex
    r32: complex
    r21: complex
    r2: float
    r3: float

    @property
    def r1(self) -> float:
        return 1.0 - self.r2 - self.r3

    @classmethod
    def ground(cls) -> "DensityState":
        return cls(0j, 0j, 0j, 0.0, 0.0)

    def to_vector(self) -> np.ndarray:
        return np.array([self.r31.real, self.r31.imag, self.r32.real, self.r32.imag,
                         self.r21.real, self.r21.imag, self.r2, self.r3])

    @classmethod
    def from_vector(cls, y) -> "DensityState":
        return cls(complex(y[0], y[1]), complex(y[2], y[3]), complex(y[4], y[5]), float(y[6]), float(y[7]))

    def physicality_excess(self) -> float:
        """Largest violation of |r_ij|^2 <= r_i r_j (<= 0 when physical)."""
        r1, r2, r3 = self.r1, self.r2, self.r3
        return max(abs(self.r31) ** 2 - r3 * r1, abs(self.r32) ** 2 - r3 * r2, abs(self.r21) ** 2 - r2 * r1)


def rhs(state: DensityState, g_p: complex, drive: DriveField, delta_p: float, rates: RateSet) -> DensityState:
    """Time derivative of ``state``; the returned object holds derivatives."""
    g, d = drive.g, drive.delta
    r1 = state.r1
    r31, r32, r21 = state.r31, state.r32, state.r21
    d31 = 1j * g_p * (r1 - state.r3) - (rates.Gamma31 - 1j * delta_p) * r31 - 1j * g * r32
    d32 = (1j * g_p * r21.conjugate() - 1j * np.conj(g) * r31
           - (rates.Gamma32 - 1j * (delta_p - d)) * r32)
    d21 = 1j * g * (r1 - state.r2) - (rates.Gamma21 - 1j * d) * r21 - 1j * g_p * r32.conjugate()
    d3 = 2.0 * (np.conj(g_p) * r31).imag - rates.Gamma3 * state.r3 + rates.w23 * state.r2
    d2 = 2.0 * (np.conj(g) * r21).imag - rates.Gamma2 * state.r2 + rates.w32 * state.r3
    return DensityState(complex(d31), complex(d32), complex(d21), float(d2), float(d3))


def ground_rate(state: DensityState, g_p: complex, drive: DriveField, rates: RateSet) -> float:
    """dr1/dt written out independently of the closure relation."""
    return (-2.0 * (np.conj(g_p) * state.r31).imag - 2.0 * (np.conj(drive.g) * state.r21).imag
            + rates.A21 * state.r2 + rates.A31 * state.r3)


def _vector_field(g_p, drive, delta_p, rates):
    g, d = complex(drive.g), drive.delta
    gp = complex(g_p)
    G31, G32, G21 = rates.Gamma31, rates.Gamma32, rates.Gamma21
    G2, G3, w23, w32 = rates.Gamma2, rates.Gamma3, rates.w23, rates.w32
    c31 = G31 - 1j * delta_p
    c32 = G32 - 1j * (delta_p - d)
    c21 = G21 - 1j * d

    def fun(t, y):
        r31 = y[0] + 1j * y[1]
        r32 = y[2] + 1j * y[3]
        r21 = y[4] + 1j * y[5]
        r2, r3 = y[6], y[7]
        r1 = 1.0 - r2 - r3
        d31 = 1j * gp * (r1 - r3) - c31 * r31 - 1j * g * r32
        d32 = 1j * gp * r21.conjugate() - 1j * g.conjugate() * r31 - c32 * r32
        d21 = 1j * g * (r1 - r2) - c21 * r21 - 1j * gp * r32.conjugate()
        d3 = 2.0 * (gp.conjugate() * r31).imag - G3 * r3 + w23 * r2
        d2 = 2.0 * (g.conjugate() * r21).imag - G2 * r2 + w32 * r3
        return np.array([d31.real, d31.imag, d32.real, d32.imag, d21.real, d21.imag, d2, d3])

    return fun


@dataclass(frozen=True)
class ConvergenceReport:
    converged: bool
    steps: int
    time: float
    last_change: float
    max_physicality_excess: float
    max_trace_defect: float


def _min_rate(rates: RateSet) -> float:
    return min(r for r in (rates.A21, rates.A31, rates.Gamma2, rates.Gamma3,
                           rates.Gamma21, rates.Gamma31, rates.Gamma32) if r > 0)


def integrate_to_steady(initial: DensityState, g_p: complex, drive: DriveField, delta_p: float,
                        rates: RateSet, tol: float = 1e-11, max_steps: int = 10**7,
                        horizon: float | None = None, rtol: float = 1e-12):
    """Integrate from ``initial`` until the state stops changing.

    Convergence is declared when, over one characteristic time ``1/min-rate``,
    no component changes by more than ``tol`` relative to its size (probe
    coherences and drive-side quantities are scaled separately, since the
    former are proportional to ``g_p``).  Returns ``(state, report)``.
    """
    if not 1e-14 < tol < 1e-3:
        raise ValueError(f"tol must lie in (1e-14, 1e-3), got {tol}")
    tau = 1.0 / _min_rate(rates)
    if horizon is None:
        horizon = 50.0 / min(rates.A21, rates.A31)
    probe_scale = abs(g_p) / rates.Gamma31 if g_p else 1.0
    atol = np.full(8, 1e-15)
    atol[:4] *= probe_scale
    fun = _vector_field(g_p, drive, delta_p, rates)
    y0 = initial.to_vector()

    solver = DOP853(fun, 0.0, y0, horizon, rtol=rtol, atol=atol)
    checkpoint, y_prev = tau, y0.copy()
    steps = 0
    change = np.inf
    phys = -np.inf
    trace = 0.0
    if np.all(fun(0.0, y0) == 0.0):
        change = 0.0
    while change != 0.0:
        if steps >= max_steps:
            raise NonConvergenceError(f"no steady state after {steps} steps (t={solver.t:.3g} s)")
        if solver.status != "running":
            if solver.status == "failed":
                raise NonConvergenceError(f"integrator failed: {solver.message}")
            raise NonConvergenceError(
                f"no steady state within horizon {horizon:.3g} s (last relative change {change:.3g})"
            )
        solver.step()
        steps += 1
        y = solver.y
        r2, r3 = y[6], y[7]
        r1 = 1.0 - r2 - r3
        if min(r1, r2, r3) < -1e-9 or max(r1, r2, r3) > 1 + 1e-9:
            raise NonConvergenceError(f"population left [0, 1] at t={solver.t:.3g}: {(r1, r2, r3)}")
        if solver.t >= checkpoint:
            state = DensityState.from_vector(y)
            phys = max(phys, state.physicality_excess())
            trace = max(trace, _trace_defect(state, g_p, drive, delta_p, rates))
            change = _relative_change(y, y_prev)
            if change < tol:
                break
            y_prev = y.copy()
            checkpoint = solver.t + tau
    state = DensityState.from_vector(solver.y)
    phys = max(phys, state.physicality_excess())
    report = ConvergenceReport(True, steps, solver.t, change, phys, trace)
    log.debug("steady state after %d steps, t=%.3g s", steps, solver.t)
    return state, report


def _relative_change(y, y_prev) -> float:
    out = 0.0
    for idx in (slice(0, 4), slice(4, 8)):
        cur, prev = y[idx], y_prev[idx]
        scale = np.max(np.abs(cur))
        if scale == 0.0:
            continue
        floor = 1e-6 * scale
        out = max(out, float(np.max(np.abs(cur - prev) / np.maximum(np.abs(cur), floor))))
    return out


def _trace_defect(state, g_p, drive, delta_p, rates) -> float:
    """|d(r1 + r2 + r3)/dt| relative to the size of the individual rate terms."""
    der = rhs(state, g_p, drive, delta_p, rates)
    d1 = ground_rate(state, g_p, drive, rates)
    total = d1 + der.r2 + der.r3
    scale = (abs(2.0 * (np.conj(g_p) * state.r31).imag) + abs(2.0 * (np.conj(drive.g) * state.r21).imag)
             + (rates.Gamma2 + rates.A21 + rates.w23) * abs(state.r2)
             + (rates.Gamma3 + rates.A31 + rates.w32) * abs(state.r3))
    return abs(total) / scale if scale else 0.0


def steady_populations(drive: DriveField, rates: RateSet, tol: float = 1e-11, **kwargs):
    """Steady (r1, r2, r3) of the drive-only system, by time integration."""
    state, report = integrate_to_steady(DensityState.ground(), 0.0, drive, 0.0, rates, tol=tol, **kwargs)
    return (state.r1, state.r2, state.r3), report


def linear_response_f(delta_p: float, drive: DriveField, rates: RateSet, eps: float = 1e-6,
                      tol: float = 1e-11, initial: DensityState | None = None, **kwargs) -> complex:
    """Weak-probe susceptibility from the time-integrated probe coherence.

    The probe Rabi frequency is ``eps * G31`` and the result is
    ``G31 r31 / g_p``, directly comparable with
    :func:`awi.steady.susceptibility` for non-degenerate populations.
    """
    g_p = eps * rates.Gamma31
    state, _ = integrate_to_steady(initial or DensityState.ground(), g_p, drive, delta_p, rates,
                                   tol=tol, **kwargs)
    return rates.Gamma31 * state.r31 / g_p
