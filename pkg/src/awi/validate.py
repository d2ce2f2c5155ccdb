"""Oracle suite: independent cross-checks of the closed-form model.

Each check returns a :class:`CheckResult` with the worst residual it saw;
failures are reported, not raised.  The suite is what ``awi validate`` runs.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .rates import DriveField, RateSet, build_rate_set, kappa_prime, saturation_kappa
from .species import SpeciesCatalog, load_catalog
from .steady import (
    PopulationState,
    populations_degenerate,
    populations_degenerate_closed,
    populations_nondegenerate,
    sum_rule_residual,
    susceptibility,
)
from .thresholds import awi_threshold, critical_density, inversion_threshold
from .transient import linear_response_f, steady_populations

log = logging.getLogger(__name__)

SPECIES = ("Na", "K", "Rb")


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    limit: float
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<38s} worst={self.residual:.3e} limit={self.limit:.1e}  {self.detail}"


@dataclass(frozen=True)
class Draw:
    """One randomized operating point."""

    species: str
    pressure: float
    temperature: float
    kappa0: float
    delta: float  # rad/s
    rates: RateSet = field(repr=False)
    drive: DriveField = field(repr=False)


def random_draw(rng: np.random.Generator, catalog: SpeciesCatalog, P_range=(0.1, 1000.0),
                kappa0_range=(1e-2, 1e5), chi_raman: float = 0.0, buffer: str = "He") -> Draw:
    """Log-uniform pressure and kappa0, uniform T and drive detuning within 3 G21."""
    species = SPECIES[int(rng.integers(len(SPECIES)))]
    atom = catalog.atom(species)
    P = float(10 ** rng.uniform(*np.log10(P_range)))
    T = float(rng.uniform(400.0, 700.0))
    k0 = float(10 ** rng.uniform(*np.log10(kappa0_range)))
    rates = build_rate_set(atom, catalog.bath(buffer, P, T), chi_raman)
    delta = float(rng.uniform(-3.0, 3.0) * rates.Gamma21)
    return Draw(species, P, T, k0, delta, rates, DriveField.from_kappa0(k0, atom.A21, delta))


def nondegenerate_pops(drive: DriveField, rates: RateSet) -> PopulationState:
    return populations_nondegenerate(kappa_prime(saturation_kappa(drive, rates), rates), rates)


def _relerr(a, b) -> float:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


# --------------------------------------------------------------------------
# individual checks


def check_sum_rule_lorentzian(catalog) -> tuple[float, str]:
    rates = build_rate_set(catalog.atom("K"), catalog.bath("He", 16.0, 550.0))
    res = sum_rule_residual(DriveField(0.0), rates, PopulationState(1.0, 0.0, 0.0))
    return res.residual, ""


def check_sum_rule_random(catalog, n=100, seed=11, chi_raman=0.0) -> tuple[float, str]:
    rng = np.random.default_rng(seed)
    worst, disp = 0.0, 0.0
    for _ in range(n):
        d = random_draw(rng, catalog, chi_raman=chi_raman)
        atom = catalog.atom(d.species)
        pops = populations_degenerate(saturation_kappa(d.drive, d.rates), d.rates, atom.degeneracies)
        res = sum_rule_residual(d.drive, d.rates, pops)
        worst = max(worst, res.residual)
        disp = max(disp, abs(res.dispersion_integral) / (math.pi * d.rates.Gamma31))
    return worst, f"{n} draws, max |int Re f|/(pi G31)={disp:.2e}"


def check_transient_populations(catalog, n=5, seed=5) -> tuple[float, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        d = random_draw(rng, catalog, P_range=(0.5, 100.0), kappa0_range=(1e-1, 1e4))
        pops, _ = steady_populations(d.drive, d.rates)
        ref = nondegenerate_pops(d.drive, d.rates)
        worst = max(worst, _relerr(pops, tuple(ref)))
    return worst, f"{n} draws"


def check_linear_response(catalog, n=20, seed=7) -> tuple[float, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        d = random_draw(rng, catalog, P_range=(0.5, 100.0), kappa0_range=(1e-1, 1e4))
        dp = float(rng.uniform(-3.0, 3.0) * d.rates.Gamma31)
        f = linear_response_f(dp, d.drive, d.rates)
        ref = susceptibility(dp, d.drive, d.rates, nondegenerate_pops(d.drive, d.rates))
        worst = max(worst, _relerr(f, ref))
    return worst, f"{n} draws"


def check_degenerate_closed_form(catalog, n=200, seed=3) -> tuple[float, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        d = random_draw(rng, catalog)
        atom = catalog.atom(d.species)
        kappa = saturation_kappa(d.drive, d.rates)
        a = populations_degenerate(kappa, d.rates, atom.degeneracies)
        b = populations_degenerate_closed(kappa, d.rates, atom.degeneracies)
        worst = max(worst, _relerr(tuple(b), tuple(a)))
    return worst, f"{n} draws"


def check_critical_bracketing(catalog, T=550.0) -> tuple[float, str]:
    """Inversion threshold absent at 0.9 P_crit, present at 1.1 P_crit (0 = consistent)."""
    bad, notes = 0, []
    for name in SPECIES:
        atom = catalog.atom(name)
        bath = catalog.bath("He", 1.0, T)
        crit = critical_density(atom, bath)
        if crit is None:
            notes.append(f"{name}: none")
            continue
        below = inversion_threshold(0.9 * crit.pressure, atom, bath)
        above = inversion_threshold(1.1 * crit.pressure, atom, bath)
        ok = below is None and above is not None
        bad += not ok
        notes.append(f"{name}: Pc={crit.pressure:.4g} Torr")
    return float(bad), ", ".join(notes)


def check_threshold_ordering(catalog, T=550.0, n_pressures=24) -> tuple[float, str]:
    """Largest log10(kappa_awi / kappa_inv) over pressures where both exist (<= 0 expected)."""
    worst = -math.inf
    count = 0
    for name in SPECIES:
        atom = catalog.atom(name)
        bath = catalog.bath("He", 1.0, T)
        for P in np.geomspace(0.3, 3e4, n_pressures):
            inv = inversion_threshold(P, atom, bath)
            awi = awi_threshold(P, atom, bath)
            if inv is not None and awi is not None:
                worst = max(worst, math.log10(awi / inv))
                count += 1
    return worst, f"{count} pressure points"


@dataclass(frozen=True)
class Check:
    name: str
    fn: Callable
    limit: float
    kwargs: dict = field(default_factory=dict)
    inclusive: bool = False


def default_checks(quick: bool = False) -> list[Check]:
    n_sum = 20 if quick else 100
    return [
        Check("sum rule, Lorentzian", check_sum_rule_lorentzian, 1e-6),
        Check("sum rule, random draws", check_sum_rule_random, 1e-2, {"n": n_sum}),
        Check("sum rule, chi_raman = 1e3", check_sum_rule_random, 1e-2, {"n": n_sum // 5, "chi_raman": 1e3}),
        Check("transient vs closed-form populations", check_transient_populations, 1e-8),
        Check("transient linear response vs f", check_linear_response, 1e-5, {"n": 5 if quick else 20}),
        Check("degenerate closed form vs linear solve", check_degenerate_closed_form, 1e-12),
        Check("critical pressure brackets inversion", check_critical_bracketing, 0.0, inclusive=True),
        Check("AWI threshold <= inversion threshold", check_threshold_ordering, 0.0, inclusive=True),
    ]


def run_checks(catalog: SpeciesCatalog | None = None, checks: list[Check] | None = None,
               quick: bool = False) -> list[CheckResult]:
    catalog = catalog or load_catalog()
    results = []
    for chk in checks or default_checks(quick):
        t0 = time.perf_counter()
        try:
            value, detail = chk.fn(catalog, **chk.kwargs)
            passed = value <= chk.limit if chk.inclusive else value < chk.limit
        except Exception as exc:  # reported, not thrown
            value, detail, passed = math.nan, f"{type(exc).__name__}: {exc}", False
        results.append(CheckResult(chk.name, bool(passed), float(value), chk.limit, detail,
                                   time.perf_counter() - t0))
        log.info(results[-1].line())
    return results
