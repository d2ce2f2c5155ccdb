"""Collisional and radiative rates, drive-field parameters and saturation factors.

All rates are angular (rad/s, written s^-1).  Number densities are cm^-3 and
speeds cm/s so that ``N * v * sigma`` with ``sigma`` in cm^2 gives s^-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import c, h, k as k_B

from .species import AtomSystem, BathConditions, pressure_to_pascal


@dataclass(frozen=True)
class RateSet:
    """Relaxation constants of the three-level system.

    ``Gamma2``/``Gamma3`` are population decay rates of |2>, |3>;
    ``Gamma21``, ``Gamma31``, ``Gamma32`` are coherence decay rates;
    ``w23``/``w32`` are the collisional transfer rates |2>->|3> and |3>->|2>.
    """

    Gamma2: float
    Gamma3: float
    Gamma21: float
    Gamma31: float
    Gamma32: float
    w23: float
    w32: float
    A21: float
    A31: float

    def __post_init__(self):
        for key in ("Gamma2", "Gamma3", "w23", "w32", "A21", "A31"):
            if getattr(self, key) < 0:
                raise ValueError(f"{key} must be >= 0, got {getattr(self, key)}")
        for key in ("Gamma21", "Gamma31", "Gamma32"):
            if not getattr(self, key) > 0:
                raise ValueError(f"{key} must be > 0, got {getattr(self, key)}")

    @classmethod
    def from_components(cls, A21, A31, w23, w32, Gamma21, Gamma31, Gamma32=None) -> "RateSet":
        """Build a consistent set from radiative and transfer rates.

        ``Gamma2``/``Gamma3`` are always derived so the population identities
        hold exactly; ``Gamma32`` defaults to the mean population width.
        """
        Gamma2 = A21 + w23
        Gamma3 = A31 + w32
        if Gamma32 is None:
            Gamma32 = 0.5 * (Gamma2 + Gamma3)
        return cls(Gamma2, Gamma3, Gamma21, Gamma31, Gamma32, w23, w32, A21, A31)

    @property
    def Gamma23(self) -> float:
        return self.Gamma32

    def as_dict(self) -> dict[str, float]:
        return {key: getattr(self, key) for key in self.__dataclass_fields__}


@dataclass(frozen=True)
class DriveField:
    """Strong field on the |1>-|2> transition: Rabi frequency and detuning (rad/s)."""

    g: complex
    delta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(abs(self.g)):
            raise ValueError("Rabi frequency must be finite")

    @property
    def g2(self) -> float:
        """|g|^2."""
        return abs(self.g) ** 2

    @classmethod
    def from_kappa0(cls, kappa0: float, A21: float, delta: float = 0.0) -> "DriveField":
        if kappa0 < 0:
            raise ValueError(f"kappa0 must be >= 0, got {kappa0}")
        return cls(0.5 * A21 * math.sqrt(kappa0), delta)

    def shifted(self, delta: float) -> "DriveField":
        return DriveField(self.g, delta)


def number_density(bath: BathConditions) -> float:
    """Ideal-gas buffer density in cm^-3."""
    return pressure_to_pascal(bath.pressure) / (k_B * bath.temperature) * 1e-6


def mean_relative_speed(m_a: float, m_b: float, T: float) -> float:
    """Maxwell mean relative speed sqrt(8 k T / (pi mu)) in cm/s."""
    mu = m_a * m_b / (m_a + m_b)
    return math.sqrt(8.0 * k_B * T / (math.pi * mu)) * 100.0


def transfer_rates(N: float, vbar: float, atom: AtomSystem) -> tuple[float, float]:
    """Fine-structure transfer rates (w23, w32) in s^-1."""
    return N * vbar * atom.sigma_23, N * vbar * atom.sigma_32


def collision_frequency(atom: AtomSystem, bath: BathConditions) -> float:
    """Return N * vbar (cm^-2 s^-1 per cm^2 of cross-section)."""
    return number_density(bath) * mean_relative_speed(atom.mass, bath.buffer_mass, bath.temperature)


def build_rate_set(atom: AtomSystem, bath: BathConditions, chi_raman: float = 0.0) -> RateSet:
    """Assemble all relaxation rates for an atom in a buffer-gas bath.

    Coherence widths are half the sum of the population widths of the two
    levels plus collisional broadening ``N vbar sigma_b``.  The Raman
    coherence |3>-|2> gets the mean population width plus an optional pure
    dephasing ``chi_raman * N vbar (sigma_b21 + sigma_b31) / 2``.
    """
    if chi_raman < 0:
        raise ValueError(f"chi_raman must be >= 0, got {chi_raman}")
    Nv = collision_frequency(atom, bath)
    w23, w32 = Nv * atom.sigma_23, Nv * atom.sigma_32
    Gamma2 = atom.A21 + w23
    Gamma3 = atom.A31 + w32
    Gamma21 = 0.5 * Gamma2 + Nv * atom.sigma_b21
    Gamma31 = 0.5 * Gamma3 + Nv * atom.sigma_b31
    Gamma32 = 0.5 * (Gamma2 + Gamma3) + chi_raman * Nv * 0.5 * (atom.sigma_b21 + atom.sigma_b31)
    return RateSet(Gamma2, Gamma3, Gamma21, Gamma31, Gamma32, w23, w32, atom.A21, atom.A31)


def detailed_balance(atom: AtomSystem, temperature: float) -> tuple[float, float]:
    """Return (w32/w23 from the cross-sections, (g2/g3) exp(-dE/kT)).

    Purely diagnostic: the catalog cross-sections are measured values and
    need not satisfy detailed balance exactly.
    """
    ratio = atom.sigma_32 / atom.sigma_23
    thermal = atom.g2 / atom.g3 * math.exp(-atom.boltzmann_exponent(temperature))
    return ratio, thermal


def saturation_kappa(drive: DriveField, rates: RateSet) -> float:
    """Drive-transition saturation parameter 2 G21 |g|^2 / (G2 (G21^2 + delta^2))."""
    G = rates.Gamma21
    return 2.0 * G * drive.g2 / (rates.Gamma2 * (G * G + drive.delta**2))


def kappa_prime(kappa: float, rates: RateSet) -> float:
    """Effective saturation parameter of the non-degenerate population solution."""
    denom = 1.0 - rates.w32 * rates.w23 / (rates.Gamma3 * rates.Gamma2)
    if not denom > 0:
        raise ZeroDivisionError(
            f"degenerate kappa' denominator 1 - w32 w23/(G3 G2) = {denom:g} <= 0"
        )
    return kappa * (2.0 + rates.w23 / rates.Gamma3) / denom


def kappa0_collisionless(g: float, A21: float) -> float:
    """Resonant collisionless saturation parameter 4|g|^2/A21^2."""
    if not A21 > 0:
        raise ValueError("A21 must be > 0")
    return 4.0 * abs(g) ** 2 / A21**2


def saturation_intensity(atom: AtomSystem) -> float:
    """Two-level saturation intensity of the drive transition in W/m^2."""
    return math.pi * h * c * atom.A21 / (3.0 * atom.lambda_drive**3)


def rabi_from_intensity(I: float, atom: AtomSystem) -> float:
    """Drive Rabi frequency |g| (rad/s) for an intensity in W/cm^2.

    Uses the cycling-transition saturation intensity, so that
    ``I/I_sat = 8 |g|^2 / A21^2``.
    """
    if I < 0:
        raise ValueError(f"intensity must be >= 0, got {I}")
    I_si = I * 1e4
    return 0.5 * atom.A21 * math.sqrt(I_si / (2.0 * saturation_intensity(atom)))

