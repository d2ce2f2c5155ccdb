"""Threshold curves, their pressure minima and optimal-gain operating points.

Everything here uses the degenerate-level population model with the drive
on resonance (``delta = delta_p = 0`` for thresholds) and expresses drive
strength through the collisionless saturation parameter
``kappa0 = 4|g|^2 / A21^2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize
from scipy.constants import k as k_B

from .rates import DriveField, RateSet, build_rate_set, mean_relative_speed, saturation_kappa
from .species import AtomSystem, BathConditions, pressure_to_pascal
from .steady import PopulationState, populations_degenerate, susceptibility

log = logging.getLogger(__name__)

KAPPA0_BRACKET = (1e-6, 1e12)
KINDS = ("inversion", "awi")


class NoMinimumError(RuntimeError):
    pass


class NoGainError(RuntimeError):
    pass


@dataclass(frozen=True)
class ThresholdCurve:
    pressures: np.ndarray  # Torr
    kappa0: np.ndarray  # nan where no threshold exists
    kind: str
    species: str

    @property
    def present(self) -> np.ndarray:
        return np.isfinite(self.kappa0)


@dataclass(frozen=True)
class OperatingPoint:
    pressure: float
    kappa0: float
    g: float
    peak_gain: float  # -min Im f, scaled to the drive-off peak
    pop_diff_13: float  # R1/g1 - R3/g3
    delta_p_at_peak: float
    populations: PopulationState


@dataclass(frozen=True)
class CriticalDensity:
    density: float  # cm^-3
    pressure: float  # Torr


def operating_state(atom: AtomSystem, bath: BathConditions, kappa0: float, delta: float = 0.0,
                    chi_raman: float = 0.0) -> tuple[RateSet, DriveField, PopulationState]:
    rates = build_rate_set(atom, bath, chi_raman)
    drive = DriveField.from_kappa0(kappa0, atom.A21, delta)
    pops = populations_degenerate(saturation_kappa(drive, rates), rates, atom.degeneracies)
    return rates, drive, pops


def inversion_residual(kappa0, atom, bath, chi_raman=0.0) -> float:
    """Per-sublevel probe difference R1/g1 - R3/g3 (root = inversion threshold)."""
    _, _, pops = operating_state(atom, bath, kappa0, 0.0, chi_raman)
    return pops.diff_13


def awi_residual(kappa0, atom, bath, chi_raman=0.0) -> float:
    """Resonant probe absorption Im f(0) (root = AWI threshold)."""
    rates, drive, pops = operating_state(atom, bath, kappa0, 0.0, chi_raman)
    return susceptibility(0.0, drive, rates, pops).imag


def _log_bisect(fn: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-13) -> float | None:
    """Root of ``fn`` in log10 space, or None when the endpoints share a sign."""
    a, b = math.log10(lo), math.log10(hi)
    fa, fb = fn(10**a), fn(10**b)
    if fa == 0:
        return lo
    if fb == 0:
        return hi
    if (fa > 0) == (fb > 0):
        return None
    root = optimize.bisect(lambda x: fn(10**x), a, b, xtol=xtol, maxiter=200)
    return 10**root


def inversion_threshold(P: float, atom: AtomSystem, bath_template: BathConditions,
                        chi_raman: float = 0.0, bracket=KAPPA0_BRACKET) -> float | None:
    """kappa0 at which the probe transition inverts, or None below the critical density."""
    bath = bath_template.at_pressure(P)
    return _log_bisect(lambda k0: inversion_residual(k0, atom, bath, chi_raman), *bracket)


def awi_threshold(P: float, atom: AtomSystem, bath_template: BathConditions,
                  chi_raman: float = 0.0, bracket=KAPPA0_BRACKET) -> float | None:
    """kappa0 at which resonant probe absorption changes sign, or None."""
    bath = bath_template.at_pressure(P)
    return _log_bisect(lambda k0: awi_residual(k0, atom, bath, chi_raman), *bracket)


_THRESHOLD = {"inversion": inversion_threshold, "awi": awi_threshold}


def threshold(kind: str, P: float, atom, bath_template, chi_raman=0.0) -> float | None:
    try:
        fn = _THRESHOLD[kind]
    except KeyError:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}") from None
    return fn(P, atom, bath_template, chi_raman)


def threshold_curve(kind: str, atom: AtomSystem, bath_template: BathConditions, pressures,
                    chi_raman: float = 0.0) -> ThresholdCurve:
    pressures = np.asarray(pressures, dtype=float)
    values = [threshold(kind, float(P), atom, bath_template, chi_raman) for P in pressures]
    kappa0 = np.array([np.nan if v is None else v for v in values])
    return ThresholdCurve(pressures, kappa0, kind, atom.name)


def minimize_threshold(kind: str, atom: AtomSystem, bath_template: BathConditions,
                       P_range=(0.1, 1e4), n_grid: int = 64, chi_raman: float = 0.0,
                       rtol: float = 1e-3) -> tuple[float, float]:
    """Minimum of a threshold curve over pressure: ``(kappa0_min, P_min)``.

    A log-spaced grid locates the basin, then a bounded scalar search in
    ``ln P`` between the neighbouring grid points refines it to ``rtol``.
    """
    lo, hi = P_range
    if not (0 < lo < hi and math.isfinite(hi)):
        raise ValueError(f"invalid pressure range {P_range}")
    grid = np.geomspace(lo, hi, n_grid)
    curve = threshold_curve(kind, atom, bath_template, grid, chi_raman)
    if not curve.present.any():
        raise NoMinimumError(f"no {kind} threshold for {atom.name} in {P_range} Torr")
    i = int(np.nanargmin(curve.kappa0))
    a = math.log(grid[max(i - 1, 0)])
    b = math.log(grid[min(i + 1, n_grid - 1)])

    def objective(lnP):
        value = threshold(kind, math.exp(lnP), atom, bath_template, chi_raman)
        return math.log(value) if value is not None else math.inf

    res = optimize.minimize_scalar(objective, bounds=(a, b), method="bounded", options={"xatol": rtol})
    best_k, best_P = curve.kappa0[i], grid[i]
    if res.fun < math.log(best_k):
        best_k, best_P = math.exp(res.fun), math.exp(res.x)
    return float(best_k), float(best_P)


def critical_density(atom: AtomSystem, bath_template: BathConditions) -> CriticalDensity | None:
    """Buffer density above which the probe transition can be inverted.

    ``N_crit = g3 A31 / (vbar (g2 sigma_23 - g3 sigma_32))``; None when
    ``g2 sigma_23 <= g3 sigma_32`` (no finite critical density).
    """
    excess = atom.g2 * atom.sigma_23 - atom.g3 * atom.sigma_32
    if not excess > 0:
        return None
    T = bath_template.temperature
    vbar = mean_relative_speed(atom.mass, bath_template.buffer_mass, T)
    N = atom.g3 * atom.A31 / (vbar * excess)
    P = N * 1e6 * k_B * T / pressure_to_pascal(1.0)
    return CriticalDensity(N, P)


# --------------------------------------------------------------------------
# optimal gain


def peak_gain(drive: DriveField, rates: RateSet, pops: PopulationState, span: float = 20.0) -> tuple[float, float]:
    """Largest probe gain ``-min Im f`` and the detuning where it occurs.

    Searches a coarse grid over ``|delta_p| <= span G31`` plus a fine grid on
    the Raman resonance, then polishes the best sample with a bounded search.
    """
    G31 = rates.Gamma31
    coarse = np.linspace(-span * G31, span * G31, 801)
    width = rates.Gamma32 + drive.g2 / G31
    fine = drive.delta + width * np.linspace(-20.0, 20.0, 401)
    extra = np.array([0.0, drive.delta, abs(drive.g), -abs(drive.g)])
    grid = np.unique(np.concatenate([coarse, fine, extra]))
    im = susceptibility(grid, drive, rates, pops).imag
    j = int(np.argmin(im))
    best_x, best = grid[j], im[j]
    lo = grid[max(j - 1, 0)]
    hi = grid[min(j + 1, grid.size - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(lambda x: susceptibility(x, drive, rates, pops).imag,
                                       bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-6 * width})
        if res.fun < best:
            best_x, best = float(res.x), float(res.fun)
    return -float(best), float(best_x)


def _gain_at(atom, bath, kappa0, chi_raman):
    rates, drive, pops = operating_state(atom, bath, kappa0, 0.0, chi_raman)
    gain, x = peak_gain(drive, rates, pops)
    return gain, x, drive, pops


def _best_kappa0(atom, bath, k_lo, k_hi, min_pop_diff, chi_raman, n_kappa):
    """Best gain over kappa0 at fixed pressure, keeping R1/g1 - R3/g3 >= min_pop_diff."""
    fn = lambda k0: inversion_residual(k0, atom, bath, chi_raman) - min_pop_diff  # noqa: E731
    if fn(k_lo) < 0:
        return None
    k_bound = _log_bisect(fn, k_lo, k_hi) or k_hi
    logs = np.linspace(math.log10(k_lo), math.log10(k_bound), n_kappa)
    gains = np.array([_gain_at(atom, bath, 10**x, chi_raman)[0] for x in logs])
    j = int(np.argmax(gains))
    best_log, best = logs[j], gains[j]
    if 0 < j < n_kappa - 1:
        res = optimize.minimize_scalar(lambda x: -_gain_at(atom, bath, 10**x, chi_raman)[0],
                                       bounds=(logs[j - 1], logs[j + 1]), method="bounded",
                                       options={"xatol": 1e-4})
        if -res.fun > best:
            best_log, best = float(res.x), -float(res.fun)
    return best, 10**best_log


def optimize_gain(atom: AtomSystem, bath_template: BathConditions, P_range=(1.0, 1e4),
                  kappa0_range=(1.0, 1e7), min_pop_diff: float = 1e-4, chi_raman: float = 0.0,
                  n_pressures: int = 40, n_kappa: int = 24) -> OperatingPoint:
    """Operating point with the largest gain without population inversion.

    Nested search at resonant drive: for each pressure on a log grid, the
    gain ``-min Im f`` is maximized over ``kappa0`` subject to a per-sublevel
    probe difference of at least ``min_pop_diff``; the best pressure is then
    polished with a bounded search in ``ln P``.
    """
    k_lo, k_hi = kappa0_range
    pressures = np.geomspace(*P_range, n_pressures)
    scores = []
    for P in pressures:
        r = _best_kappa0(atom, bath_template.at_pressure(P), k_lo, k_hi, min_pop_diff, chi_raman, n_kappa)
        scores.append((-math.inf, math.nan) if r is None else r)
    gains = np.array([s[0] for s in scores])
    i = int(np.argmax(gains))
    if not gains[i] > 0:
        raise NoGainError(f"no probe gain for {atom.name} in P={P_range}, kappa0={kappa0_range}")
    best_P, (best_gain, best_k) = pressures[i], scores[i]
    if 0 < i < n_pressures - 1:
        def objective(lnP):
            r = _best_kappa0(atom, bath_template.at_pressure(math.exp(lnP)), k_lo, k_hi,
                             min_pop_diff, chi_raman, n_kappa)
            return math.inf if r is None else -r[0]

        res = optimize.minimize_scalar(objective, bounds=(math.log(pressures[i - 1]), math.log(pressures[i + 1])),
                                       method="bounded", options={"xatol": 1e-3})
        if -res.fun > best_gain:
            best_P = math.exp(res.x)
            best_gain, best_k = _best_kappa0(atom, bath_template.at_pressure(best_P), k_lo, k_hi,
                                             min_pop_diff, chi_raman, n_kappa)
    gain, x, drive, pops = _gain_at(atom, bath_template.at_pressure(best_P), best_k, chi_raman)
    log.info("%s optimum: P=%.4g Torr kappa0=%.4g gain=%.3g", atom.name, best_P, best_k, gain)
    return OperatingPoint(float(best_P), float(best_k), float(abs(drive.g)), gain, pops.diff_13, x, pops)
