"""Steady-state populations and the weak-probe susceptibility of the V-scheme.

The probe line shape ``f(delta_p)`` is normalized so that the drive-off
resonance of an atom entirely in its ground level has ``Im f(0) = 1``.
For degenerate levels the probe sees per-sublevel populations ``R_i/g_i``;
the normalization then multiplies them by ``g1`` (drive-off ground sublevel
population is ``1/g1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np
from scipy import integrate

from .rates import DriveField, RateSet, kappa_prime, saturation_kappa

ZERO_TOL = 1e-10


class SingularSystemError(np.linalg.LinAlgError):
    pass


class NonConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class PopulationState:
    """Level populations ``(r1, r2, r3)``; for degenerate levels these are the
    level totals ``R_i`` and ``degeneracies`` holds ``(g1, g2, g3)``."""

    r1: float
    r2: float
    r3: float
    degeneracies: tuple[int, int, int] = (1, 1, 1)

    def __post_init__(self):
        total = self.r1 + self.r2 + self.r3
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"populations sum to {total!r}, not 1")
        for r in (self.r1, self.r2, self.r3):
            if not -1e-12 <= r <= 1 + 1e-12:
                raise ValueError(f"population {r!r} outside [0, 1]")

    @classmethod
    def ground(cls, degeneracies=(1, 1, 1)) -> "PopulationState":
        return cls(1.0, 0.0, 0.0, tuple(degeneracies))

    def __iter__(self) -> Iterator[float]:
        return iter((self.r1, self.r2, self.r3))

    @property
    def per_sublevel(self) -> tuple[float, float, float]:
        g1, g2, g3 = self.degeneracies
        return self.r1 / g1, self.r2 / g2, self.r3 / g3

    @property
    def diff_12(self) -> float:
        """Per-sublevel difference on the drive transition, R1/g1 - R2/g2."""
        p1, p2, _ = self.per_sublevel
        return p1 - p2

    @property
    def diff_13(self) -> float:
        """Per-sublevel difference on the probe transition, R1/g1 - R3/g3."""
        p1, _, p3 = self.per_sublevel
        return p1 - p3

    @property
    def probe_weights(self) -> tuple[float, float]:
        """(diff_13, diff_12) scaled so the drive-off ground state gives (1, 1)."""
        g1 = self.degeneracies[0]
        return g1 * self.diff_13, g1 * self.diff_12


# --------------------------------------------------------------------------
# population solutions


def populations_nondegenerate(kprime: float, rates: RateSet) -> PopulationState:
    if kprime < 0:
        raise ValueError(f"kappa' must be >= 0, got {kprime}")
    r2 = rates.Gamma3 / (2.0 * rates.Gamma3 + rates.w23) * kprime / (1.0 + kprime)
    r3 = rates.w23 / rates.Gamma3 * r2
    return PopulationState(1.0 - r2 - r3, r2, r3)


def high_pressure_coefficient(x: float) -> float:
    """Slope (1 - e^-x)/(1 + 2 e^-x) of the collision-thermalized probe difference."""
    e = math.exp(-x)
    return (1.0 - e) / (1.0 + 2.0 * e)


def populations_high_pressure(drive: DriveField, Gamma21: float, A21: float, x: float):
    """Probe difference r1 - r3 and kappa' when collisions thermalize |2>, |3>.

    ``x`` is the fine-structure Boltzmann exponent dE/(k_B T).
    Returns ``(r1_minus_r3, kprime)``.
    """
    if not x > 0:
        raise ValueError(f"x must be > 0, got {x}")
    e = math.exp(-x)
    kp = (1.0 + 2.0 * e) / (1.0 + e) * 2.0 * drive.g2 * Gamma21 / A21 / (Gamma21**2 + drive.delta**2)
    r13 = (1.0 - kp * high_pressure_coefficient(x)) / (1.0 + kp)
    return r13, kp


def degenerate_kappa_prime(kappa: float, rates: RateSet, degeneracies) -> float:
    """kappa' that puts the degenerate steady state in the closed form.

    Matching the direct solution gives
    ``kappa' = kappa (1 + (g2/g1)(1 + w23/G3)) / (1 - w32 w23/(G3 G2))``,
    which reduces to the non-degenerate expression when all g_i are 1.
    """
    g1, g2, _ = degeneracies
    u = rates.w23 / rates.Gamma3
    D = 1.0 - rates.w32 * rates.w23 / (rates.Gamma3 * rates.Gamma2)
    if not D > 0:
        raise ZeroDivisionError(f"1 - w32 w23/(G3 G2) = {D:g} <= 0")
    return kappa * (1.0 + g2 / g1 * (1.0 + u)) / D


def degenerate_matrix(kappa: float, rates: RateSet, degeneracies) -> tuple[np.ndarray, np.ndarray]:
    """Linear system for (R1, R2, R3); rows scaled by G2, G3 and 1."""
    g1, g2, _ = degeneracies
    a = g2 / g1
    M = np.array([
        [kappa * a, -(1.0 + kappa), rates.w32 / rates.Gamma2],
        [0.0, rates.w23 / rates.Gamma3, -1.0],
        [1.0, 1.0, 1.0],
    ])
    return M, np.array([0.0, 0.0, 1.0])


def populations_degenerate(kappa: float, rates: RateSet, degeneracies=(2, 4, 2)) -> PopulationState:
    """Level populations of degenerate levels by direct 3x3 solve.

    Balance of |2>: drive exchange ``G2 kappa (g2/g1 R1 - R2)`` and feeding
    ``w32 R3`` against loss ``G2 R2``; |3> fed by ``w23 R2``, lost at ``G3``.
    """
    if kappa < 0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    if min(degeneracies) < 1:
        raise ValueError(f"degeneracies must be positive, got {degeneracies}")
    M, b = degenerate_matrix(kappa, rates, degeneracies)
    if np.linalg.cond(M) > 1e13:
        raise SingularSystemError(f"population system is singular (cond={np.linalg.cond(M):.3g})")
    R1, R2, R3 = np.linalg.solve(M, b)
    R1 = 1.0 - R2 - R3
    return PopulationState(float(R1), float(R2), float(R3), tuple(degeneracies))


def populations_degenerate_closed(kappa: float, rates: RateSet, degeneracies=(2, 4, 2)) -> PopulationState:
    """Closed-form counterpart of :func:`populations_degenerate`."""
    g1, g2, _ = degeneracies
    a = g2 / g1
    u = rates.w23 / rates.Gamma3
    C = 1.0 + a * (1.0 + u)
    kp = degenerate_kappa_prime(kappa, rates, degeneracies)
    R2 = a / C * kp / (1.0 + kp)
    R3 = R2 * u
    R1 = (1.0 + kp / C) / (1.0 + kp)
    return PopulationState(R1, R2, R3, tuple(degeneracies))


def degenerate_differences(kappa: float, rates: RateSet, degeneracies=(2, 4, 2)) -> tuple[float, float]:
    """Closed-form per-sublevel differences (R1/g1 - R2/g2, R1/g1 - R3/g3)."""
    g1, g2, g3 = degeneracies
    u = rates.w23 / rates.Gamma3
    C = 1.0 + g2 / g1 * (1.0 + u)
    kp = degenerate_kappa_prime(kappa, rates, degeneracies)
    d12 = 1.0 / g1 / (1.0 + kp)
    d13 = (1.0 + (1.0 - g2 * u / g3) * kp / C) / g1 / (1.0 + kp)
    return d12, d13


def solve_populations(drive: DriveField, rates: RateSet, degeneracies=(1, 1, 1)) -> PopulationState:
    """Steady populations under ``drive``: degenerate solve unless all g_i = 1."""
    kappa = saturation_kappa(drive, rates)
    if tuple(degeneracies) == (1, 1, 1):
        return populations_nondegenerate(kappa_prime(kappa, rates), rates)
    return populations_degenerate(kappa, rates, degeneracies)


# --------------------------------------------------------------------------
# probe response


def saturation_S(drive: DriveField, rates: RateSet) -> float:
    """Coherence-splitting parameter |g|^2 / (G21 G32)."""
    return drive.g2 / (rates.Gamma21 * rates.Gamma32)


def susceptibility(delta_p, drive: DriveField, rates: RateSet, pops: PopulationState, nief: bool = True):
    """Normalized complex probe susceptibility f(delta_p).

    ``Im f`` is the absorption (negative for gain), ``Re f`` the dispersion.
    ``nief=False`` drops the drive-coherence term, leaving only saturation
    and level splitting.  Accepts scalars or arrays of ``delta_p``.
    """
    n13, n12 = pops.probe_weights
    g2 = drive.g2
    dp = np.asarray(delta_p, dtype=float)
    a = rates.Gamma32 - 1j * (dp - drive.delta)
    b = rates.Gamma31 - 1j * dp
    num = a * n13
    if nief:
        num = num - g2 * n12 / (rates.Gamma21 + 1j * drive.delta)
    f = 1j * rates.Gamma31 * num / (a * b + g2)
    return f if f.ndim else complex(f)


def resonant_f(S: float, pops: PopulationState) -> float:
    """Line-centre value ((r1 - r3) - (r1 - r2) S)/(1 + S) for resonant drive."""
    if S < 0:
        raise ValueError(f"S must be >= 0, got {S}")
    n13, n12 = pops.probe_weights
    return (n13 - n12 * S) / (1.0 + S)


def _clean(x: float) -> float:
    return 0.0 if abs(x) <= ZERO_TOL else x


def awi_predicate(S: float, pops: PopulationState) -> bool:
    """True when the resonant probe shows gain: (r1 - r2) S > r1 - r3."""
    if S < 0:
        raise ValueError(f"S must be >= 0, got {S}")
    n13, n12 = pops.probe_weights
    return _clean(n12) * S > _clean(n13)


class SpectrumSample(NamedTuple):
    delta_p: float
    f: complex

    @property
    def absorption(self) -> float:
        return self.f.imag

    @property
    def dispersion(self) -> float:
        return self.f.real


@dataclass(frozen=True)
class Spectrum:
    """Probe spectrum sampled on an ordered detuning grid."""

    delta_p: np.ndarray
    f: np.ndarray

    def __len__(self) -> int:
        return len(self.delta_p)

    def __iter__(self) -> Iterator[SpectrumSample]:
        for dp, f in zip(self.delta_p, self.f):
            yield SpectrumSample(float(dp), complex(f))

    @property
    def absorption(self) -> np.ndarray:
        return self.f.imag

    @property
    def dispersion(self) -> np.ndarray:
        return self.f.real


def spectrum_scan(grid, drive: DriveField, rates: RateSet, pops: PopulationState) -> Spectrum:
    grid = np.asarray(grid, dtype=float)
    if grid.size and not np.all(np.isfinite(grid)):
        raise ValueError("detuning grid must be finite")
    if grid.size > 1 and np.any(np.diff(grid) < 0):
        raise ValueError("detuning grid must be sorted")
    if grid.size == 0:
        return Spectrum(grid, np.zeros(0, dtype=complex))
    return Spectrum(grid, np.asarray(susceptibility(grid, drive, rates, pops), dtype=complex).reshape(grid.shape))


# --------------------------------------------------------------------------
# sum rule


@dataclass(frozen=True)
class SumRuleResult:
    residual: float
    integral: float  # inner quadrature + tails
    expected: float
    tail: float
    dispersion_integral: float
    half_range: float


def _feature_points(drive: DriveField, rates: RateSet, L: float) -> list[float]:
    g = abs(drive.g)
    d = drive.delta
    pts = {0.0, d, g, -g, d + g, d - g, 0.5 * (d + math.sqrt(d * d + 4 * g * g)),
           0.5 * (d - math.sqrt(d * d + 4 * g * g))}
    for w in (rates.Gamma31, rates.Gamma32, rates.Gamma21):
        for m in (1.0, 10.0):
            pts.update({m * w, -m * w, d + m * w, d - m * w})
    inner = sorted(p for p in pts if -L < p < L)
    return [-L, *inner, L]


def sum_rule_residual(drive: DriveField, rates: RateSet, pops: PopulationState,
                      half_range_factor: float = 50.0, epsrel: float = 1e-10) -> SumRuleResult:
    """Compare the integrated absorption with ``pi G31 (r1 - r3)``.

    The line is integrated adaptively on ``|delta_p| <= L`` (``L`` is
    ``half_range_factor`` times the largest of G31, |g|, |delta|); the
    ``1/delta_p^2`` wings beyond ``L`` are added by integrating in
    ``t = 1/delta_p``, where the integrand is regular.
    """
    if half_range_factor < 50.0:
        raise ValueError("half_range_factor must be >= 50")
    L = half_range_factor * max(rates.Gamma31, abs(drive.g), abs(drive.delta))
    im = lambda x: susceptibility(x, drive, rates, pops).imag  # noqa: E731
    re = lambda x: susceptibility(x, drive, rates, pops).real  # noqa: E731
    edges = _feature_points(drive, rates, L)

    def quad(fn, lo, hi):
        val, err, info = integrate.quad(fn, lo, hi, epsabs=0.0, epsrel=epsrel, limit=400, full_output=1)[:3]
        return val, err

    inner = 0.0
    err_total = 0.0
    disp = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = quad(im, lo, hi)
        inner += v
        err_total += e
        disp += quad(re, lo, hi)[0]
    # wings: x = +-1/t
    right, e1 = quad(lambda t: im(1.0 / t) / (t * t), 0.0, 1.0 / L)
    left, e2 = quad(lambda t: im(-1.0 / t) / (t * t), 0.0, 1.0 / L)
    tail = right + left
    err_total += e1 + e2

    n13, _ = pops.probe_weights
    expected = math.pi * rates.Gamma31 * n13
    norm = math.pi * rates.Gamma31 * max(abs(n13), 1e-6)
    total = inner + tail
    if err_total > 1e-3 * norm:
        raise NonConvergenceError(f"sum-rule quadrature error estimate {err_total:.3g} too large")
    return SumRuleResult(abs(total - expected) / norm, total, expected, tail, disp, L)
