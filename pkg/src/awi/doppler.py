"""Maxwell-Boltzmann velocity averaging of the probe line shape."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.constants import k as k_B
from scipy.special import roots_hermite

from .rates import DriveField, RateSet, saturation_kappa
from .species import AtomSystem, BathConditions
from .steady import Spectrum, degenerate_kappa_prime

LN2 = math.log(2.0)
MIN_NODES = 8
DEFAULT_MIN_NODES = 64
MAX_AUTO_NODES = 20000


class QuadratureError(ValueError):
    """Velocity quadrature too coarse to resolve the homogeneous line."""


def doppler_halfwidth(atom: AtomSystem, T: float, wavelength: float) -> float:
    """Doppler HWHM (rad/s) of a transition at ``wavelength`` (m)."""
    if not (T > 0 and wavelength > 0):
        raise ValueError("temperature and wavelength must be > 0")
    return 2.0 * math.pi / wavelength * math.sqrt(2.0 * LN2 * k_B * T / atom.mass)


@dataclass(frozen=True)
class DopplerConfig:
    """Velocity-averaging settings.

    ``halfwidth`` is the Doppler HWHM of the probe transition; ``k_ratio`` is
    ``k_probe / k_drive``.  ``n_nodes=None`` picks a node count that resolves
    the homogeneous width (see :func:`velocity_nodes`).
    """

    halfwidth: float
    n_nodes: int | None = None
    copropagating: bool = True
    k_ratio: float = 1.0
    rule: str = "gauss-hermite"

    def __post_init__(self):
        if self.halfwidth < 0:
            raise ValueError(f"halfwidth must be >= 0, got {self.halfwidth}")
        if self.n_nodes is not None and self.n_nodes < MIN_NODES:
            raise ValueError(f"n_nodes must be >= {MIN_NODES}, got {self.n_nodes}")
        if not self.k_ratio > 0:
            raise ValueError(f"k_ratio must be > 0, got {self.k_ratio}")
        if self.rule not in ("gauss-hermite", "trapezoid"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")

    @classmethod
    def for_atom(cls, atom: AtomSystem, temperature: float, **kwargs) -> "DopplerConfig":
        return cls(
            halfwidth=doppler_halfwidth(atom, temperature, atom.lambda_probe),
            k_ratio=atom.lambda_drive / atom.lambda_probe,
            **kwargs,
        )

    @property
    def sigma(self) -> float:
        """Standard deviation of the probe Doppler shift k_p v."""
        return self.halfwidth / math.sqrt(2.0 * LN2)


@lru_cache(maxsize=32)
def _hermite(n: int):
    x, w = roots_hermite(n)
    return x, w


def _central_spacing(u: np.ndarray, sigma: float) -> float:
    core = np.sort(u[np.abs(u) <= 3.0 * sigma])
    if core.size < 2:
        return np.inf
    return float(np.max(np.diff(core)))


def auto_node_count(config: DopplerConfig, width: float) -> int:
    """Smallest node count whose central spacing is about ``width / 2``."""
    if config.halfwidth == 0:
        return DEFAULT_MIN_NODES
    if config.rule == "trapezoid":
        n = math.ceil(12.0 * config.sigma / (0.5 * width)) + 1
    else:
        n = math.ceil((2.0 * math.pi * config.sigma / width) ** 2)
    n = max(DEFAULT_MIN_NODES, n)
    if n > MAX_AUTO_NODES:
        warnings.warn(f"velocity quadrature capped at {MAX_AUTO_NODES} nodes (wanted {n})", stacklevel=3)
        n = MAX_AUTO_NODES
    return n


def velocity_nodes(config: DopplerConfig, homogeneous_width: float | None = None):
    """Probe Doppler shifts ``u = k_p v`` and normalized weights.

    With an explicit ``n_nodes``, raises :class:`QuadratureError` when the
    node spacing in the core of the distribution exceeds
    ``homogeneous_width``.
    """
    n = config.n_nodes
    if n is None:
        n = auto_node_count(config, homogeneous_width) if homogeneous_width else DEFAULT_MIN_NODES
    if config.halfwidth == 0:
        return np.zeros(1), np.ones(1)
    sigma = config.sigma
    if config.rule == "gauss-hermite":
        x, w = _hermite(n)
        u = math.sqrt(2.0) * sigma * x
        w = w / w.sum()
    else:
        u = np.linspace(-6.0 * sigma, 6.0 * sigma, n)
        w = np.exp(-0.5 * (u / sigma) ** 2)
        w = w / w.sum()
    if homogeneous_width is not None and config.n_nodes is not None:
        spacing = _central_spacing(u, sigma)
        if spacing > homogeneous_width:
            raise QuadratureError(
                f"{n} nodes give spacing {spacing:.3g} rad/s > homogeneous width "
                f"{homogeneous_width:.3g} rad/s; increase n_nodes"
            )
    return u, w


def gaussian_average(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted sum over the last axis (velocity nodes)."""
    return np.sum(values * weights, axis=-1)


def _shifted_response(delta_p, u, drive: DriveField, rates: RateSet, degeneracies, config: DopplerConfig):
    """f(delta_p, v) on a (grid, node) mesh with populations solved per node."""
    s = 1.0 if config.copropagating else -1.0
    delta_v = drive.delta - s * u / config.k_ratio
    G21 = rates.Gamma21
    kappa = 2.0 * G21 * drive.g2 / (rates.Gamma2 * (G21 * G21 + delta_v**2))
    g1, g2, g3 = degeneracies
    kp = degenerate_kappa_prime(1.0, rates, degeneracies) * kappa
    u23 = rates.w23 / rates.Gamma3
    C = 1.0 + g2 / g1 * (1.0 + u23)
    n12 = 1.0 / (1.0 + kp)
    n13 = (1.0 + (1.0 - g2 * u23 / g3) * kp / C) / (1.0 + kp)

    dp = np.asarray(delta_p, dtype=float)[:, None] - u[None, :]
    a = rates.Gamma32 - 1j * (dp - delta_v[None, :])
    b = rates.Gamma31 - 1j * dp
    num = a * n13[None, :] - drive.g2 * n12[None, :] / (G21 + 1j * delta_v[None, :])
    return 1j * rates.Gamma31 * num / (a * b + drive.g2)


def velocity_average(delta_p_grid, drive: DriveField, rates: RateSet, atom: AtomSystem,
                     bath: BathConditions | None, config: DopplerConfig, chunk: int = 256) -> Spectrum:
    """Velocity-averaged probe spectrum, scaled to the drive-off averaged peak.

    Each velocity class sees the probe at ``delta_p - k_p v`` and the drive
    at ``delta -+ k v`` (upper sign copropagating); populations are
    re-solved per class because saturation depends on the shifted drive
    detuning.  ``bath`` is accepted for symmetry with the other entry points;
    the Doppler width is carried by ``config``.
    """
    grid = np.asarray(delta_p_grid, dtype=float)
    width = min(rates.Gamma31, rates.Gamma21)
    u, w = velocity_nodes(config, width)
    degeneracies = atom.degeneracies
    out = np.empty(grid.shape, dtype=complex)
    for start in range(0, grid.size, chunk):
        sl = slice(start, start + chunk)
        out[sl] = gaussian_average(_shifted_response(grid[sl], u, drive, rates, degeneracies, config), w)
    reference = drive_off_peak(u, w, rates)
    return Spectrum(grid, out / reference)


def drive_off_peak(u: np.ndarray, w: np.ndarray, rates: RateSet) -> float:
    """Averaged drive-off absorption at line centre (the Voigt maximum)."""
    G = rates.Gamma31
    return float(np.sum(w * G * G / (G * G + u * u)))
