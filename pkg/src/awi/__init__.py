"""Amplification without inversion in collision-driven three-level alkali vapours.

Submodules: ``species`` (catalog and units), ``rates`` (relaxation rates and
saturation parameters), ``steady`` (populations and probe susceptibility),
``transient`` (time-domain oracle), ``doppler`` (velocity averaging),
``thresholds`` (threshold curves and optimal gain), ``cli``.
"""

__version__ = "0.1.0"

from .rates import DriveField, RateSet, build_rate_set, saturation_kappa  # noqa: E402
from .species import AtomSystem, BathConditions, SpeciesCatalog, load_catalog  # noqa: E402
from .steady import PopulationState, Spectrum, populations_degenerate, spectrum_scan, susceptibility  # noqa: E402

__all__ = [
    "AtomSystem", "BathConditions", "SpeciesCatalog", "load_catalog",
    "RateSet", "DriveField", "build_rate_set", "saturation_kappa",
    "PopulationState", "Spectrum", "populations_degenerate", "spectrum_scan", "susceptibility",
]
