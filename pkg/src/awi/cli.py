"""Command-line front end.

Subcommands write a self-describing CSV (and optionally an SVG plot) into
``--out``.  Exit status: 0 success, 1 configuration error, 2 numerical
non-convergence, 3 validation failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import warnings
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .doppler import DopplerConfig, QuadratureError, auto_node_count, velocity_average
from .rates import DriveField, build_rate_set, kappa0_collisionless, kappa_prime, rabi_from_intensity, saturation_kappa
from .report import rates_section, write_table
from .species import AtomSystem, CatalogError, load_catalog
from .steady import (
    NonConvergenceError,
    SingularSystemError,
    degenerate_kappa_prime,
    populations_degenerate,
    populations_high_pressure,
    populations_nondegenerate,
    saturation_S,
    spectrum_scan,
)
from .thresholds import NoMinimumError, minimize_threshold, threshold_curve

log = logging.getLogger("awi")

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_VALIDATION = 0, 1, 2, 3
DELTA_UNITS = ("rad/s", "Gamma21", "doppler")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    species: str = "K"
    buffer: str = "He"
    pressure: float = 16.0  # Torr
    temperature: float = 550.0  # K
    kappa0: float | None = None
    rabi: float | None = None  # rad/s
    intensity: float | None = None  # W/cm^2
    delta: float = 0.0
    delta_unit: str = "rad/s"
    scan_min: float = -10.0  # units of Gamma31
    scan_max: float = 10.0
    scan_n: int = 401
    doppler: bool = False
    nodes: int | None = None
    doppler_width: float | None = None  # rad/s, overrides the thermal HWHM
    chi_raman: float = 0.0
    catalog: str | None = None
    out: str = "."
    plot: bool = False

    def check(self, need_drive: bool = True) -> None:
        given = [k for k in ("kappa0", "rabi", "intensity") if getattr(self, k) is not None]
        if need_drive and len(given) != 1:
            raise ConfigError(f"exactly one of --kappa0/--rabi/--intensity is required (got {given or 'none'})")
        for key in given:
            if not (math.isfinite(getattr(self, key)) and getattr(self, key) >= 0):
                raise ConfigError(f"{key} must be finite and >= 0")
        if not (math.isfinite(self.pressure) and self.pressure >= 0):
            raise ConfigError(f"pressure must be finite and >= 0, got {self.pressure}")
        if not (math.isfinite(self.temperature) and self.temperature > 0):
            raise ConfigError(f"temperature must be finite and > 0, got {self.temperature}")
        if not (math.isfinite(self.scan_min) and math.isfinite(self.scan_max) and self.scan_min < self.scan_max):
            raise ConfigError(f"scan range must be finite with scan_min < scan_max, got ({self.scan_min}, {self.scan_max})")
        if self.scan_n < 2:
            raise ConfigError(f"scan_n must be >= 2, got {self.scan_n}")
        if not math.isfinite(self.delta):
            raise ConfigError("delta must be finite")
        if self.delta_unit not in DELTA_UNITS:
            raise ConfigError(f"delta_unit must be one of {DELTA_UNITS}")
        if self.doppler_width is not None and not (math.isfinite(self.doppler_width) and self.doppler_width >= 0):
            raise ConfigError(f"doppler_width must be finite and >= 0, got {self.doppler_width}")
        if self.nodes is not None and self.nodes < 8:
            raise ConfigError(f"nodes must be >= 8, got {self.nodes}")
        if not (math.isfinite(self.chi_raman) and self.chi_raman >= 0):
            raise ConfigError(f"chi_raman must be finite and >= 0, got {self.chi_raman}")

    def section(self) -> dict[str, object]:
        return {k: ("none" if v is None else (str(v) if isinstance(v, (str, bool)) else v))
                for k, v in asdict(self).items() if k not in ("out", "plot")}


class Context:
    """Resolved atom, bath, rates and drive for one configuration."""

    def __init__(self, cfg: RunConfig, need_drive: bool = True):
        cfg.check(need_drive)
        self.cfg = cfg
        try:
            self.catalog = load_catalog(cfg.catalog)
            self.atom: AtomSystem = self.catalog.atom(cfg.species)
            self.bath = self.catalog.bath(cfg.buffer, cfg.pressure, cfg.temperature)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0]) if exc.args else str(exc)) from None
        self.rates = build_rate_set(self.atom, self.bath, cfg.chi_raman)
        self.dcfg = DopplerConfig.for_atom(self.atom, cfg.temperature, n_nodes=cfg.nodes)
        if cfg.doppler_width is not None:
            self.dcfg = replace(self.dcfg, halfwidth=cfg.doppler_width)
        if need_drive:
            self.drive = DriveField(self._rabi(), self._delta())

    def _rabi(self) -> float:
        cfg, atom = self.cfg, self.atom
        if cfg.kappa0 is not None:
            return DriveField.from_kappa0(cfg.kappa0, atom.A21).g
        if cfg.rabi is not None:
            return cfg.rabi
        return rabi_from_intensity(cfg.intensity, atom)

    def _delta(self) -> float:
        scale = {"rad/s": 1.0, "Gamma21": self.rates.Gamma21, "doppler": self.dcfg.halfwidth}
        return self.cfg.delta * scale[self.cfg.delta_unit]

    def pops(self):
        return populations_degenerate(saturation_kappa(self.drive, self.rates), self.rates, self.atom.degeneracies)

    def drive_section(self) -> dict[str, float]:
        kappa = saturation_kappa(self.drive, self.rates)
        return {
            "g (rad/s)": abs(self.drive.g),
            "delta (rad/s)": self.drive.delta,
            "kappa0": kappa0_collisionless(abs(self.drive.g), self.atom.A21),
            "kappa": kappa,
            "kappa_prime": degenerate_kappa_prime(kappa, self.rates, self.atom.degeneracies),
            "S": saturation_S(self.drive, self.rates),
        }

    def pops_section(self, pops) -> dict[str, float]:
        return {"R1": pops.r1, "R2": pops.r2, "R3": pops.r3,
                "R1/g1-R2/g2": pops.diff_12, "R1/g1-R3/g3": pops.diff_13}

    def path(self, stem: str, suffix: str) -> Path:
        return Path(self.cfg.out) / f"{stem}_{self.cfg.species}.{suffix}"


SPECTRUM_COLUMNS = ["delta_p_over_Gamma31", "Im_f", "Re_f"]


def _grid(ctx: Context) -> np.ndarray:
    c = ctx.cfg
    return np.linspace(c.scan_min, c.scan_max, c.scan_n) * ctx.rates.Gamma31


def _emit_spectrum(ctx: Context, spectrum, stem: str, extra: dict) -> Path:
    G31 = ctx.rates.Gamma31
    x = spectrum.delta_p / G31
    pops = ctx.pops()
    sections = {
        "config": ctx.cfg.section(),
        "abscissa": {"delta_p unit": "Gamma31", "Gamma31 (s^-1)": G31},
        "rates": rates_section(ctx.rates),
        "drive": ctx.drive_section(),
        "populations (degenerate model, v = 0)": ctx.pops_section(pops),
        **extra,
    }
    rows = zip(x, spectrum.absorption, spectrum.dispersion)
    path = write_table(ctx.path(stem, "csv"), SPECTRUM_COLUMNS, rows, sections)
    if ctx.cfg.plot:
        from .plotting import plot_spectrum

        plot_spectrum(x, spectrum.absorption, spectrum.dispersion, ctx.path(stem, "svg"),
                      title=f"{ctx.cfg.species}-{ctx.cfg.buffer}, {ctx.cfg.pressure:g} Torr")
    im = spectrum.absorption
    if im.size:
        j = int(np.argmin(im))
        print(f"min Im f = {im[j]:.6e} at delta_p/Gamma31 = {x[j]:.4f}")
    print(f"wrote {path}")
    return path


def cmd_spectrum(cfg: RunConfig) -> int:
    ctx = Context(cfg)
    if cfg.doppler:
        return _doppler(ctx, "spectrum")
    spectrum = spectrum_scan(_grid(ctx), ctx.drive, ctx.rates, ctx.pops())
    _emit_spectrum(ctx, spectrum, "spectrum", {})
    return EXIT_OK


def _doppler(ctx: Context, stem: str) -> int:
    dcfg = ctx.dcfg
    if ctx.rates.Gamma21 >= dcfg.halfwidth:
        warnings.warn(f"Gamma21 = {ctx.rates.Gamma21:.3g} s^-1 is not below the Doppler halfwidth "
                      f"{dcfg.halfwidth:.3g} s^-1; averaging has little effect", stacklevel=2)
    spectrum = velocity_average(_grid(ctx), ctx.drive, ctx.rates, ctx.atom, ctx.bath, dcfg)
    width = min(ctx.rates.Gamma31, ctx.rates.Gamma21)
    nodes = dcfg.n_nodes or auto_node_count(dcfg, width)
    extra = {"doppler": {"halfwidth (rad/s)": dcfg.halfwidth, "nodes": nodes, "rule": dcfg.rule,
                         "copropagating": str(dcfg.copropagating), "k_ratio": dcfg.k_ratio}}
    _emit_spectrum(ctx, spectrum, stem, extra)
    return EXIT_OK


def cmd_doppler(cfg: RunConfig) -> int:
    return _doppler(Context(cfg), "doppler")


def population_models(ctx: Context):
    """Rows (model, R1, R2, R3, sum, d12, d13, kappa, kappa', S) for the three models."""
    rates, drive, atom = ctx.rates, ctx.drive, ctx.atom
    kappa = saturation_kappa(drive, rates)
    S = saturation_S(drive, rates)
    rows = []
    kp = kappa_prime(kappa, rates)
    p = populations_nondegenerate(kp, rates)
    rows.append(("nondegenerate", p.r1, p.r2, p.r3, p.r1 + p.r2 + p.r3, p.r1 - p.r2, p.r1 - p.r3, kappa, kp, S))
    # thermalized |2>,|3>: populations follow from the two differences and closure
    d13, kp_hp = populations_high_pressure(drive, rates.Gamma21, atom.A21, atom.boltzmann_exponent(ctx.bath.temperature))
    d12 = 1.0 / (1.0 + kp_hp)
    r1 = (1.0 + d12 + d13) / 3.0
    rows.append(("high_pressure", r1, r1 - d12, r1 - d13, 3.0 * r1 - d12 - d13, d12, d13, kappa, kp_hp, S))
    p = ctx.pops()
    kp = degenerate_kappa_prime(kappa, rates, atom.degeneracies)
    rows.append(("degenerate", p.r1, p.r2, p.r3, p.r1 + p.r2 + p.r3, p.diff_12, p.diff_13, kappa, kp, S))
    return rows


POP_COLUMNS = ["model", "R1", "R2", "R3", "sum", "diff_12", "diff_13", "kappa", "kappa_prime", "S"]


def cmd_populations(cfg: RunConfig) -> int:
    ctx = Context(cfg)
    rows = population_models(ctx)
    sections = {"config": cfg.section(), "rates": rates_section(ctx.rates), "drive": ctx.drive_section(),
                "note": {"diff columns": "per-sublevel for degenerate, plain level differences otherwise"}}
    path = write_table(ctx.path("populations", "csv"), POP_COLUMNS, rows, sections)
    print(f"{'model':<14s}" + "".join(f"{c:>13s}" for c in POP_COLUMNS[1:]))
    for row in rows:
        print(f"{row[0]:<14s}" + "".join(f"{v:13.6f}" if abs(v) < 1e5 else f"{v:13.4e}" for v in row[1:]))
    print(f"wrote {path}")
    return EXIT_OK


THRESHOLD_COLUMNS = ["pressure_torr", "kappa0_inversion", "kappa0_awi", "inversion_present", "awi_present"]


def cmd_thresholds(cfg: RunConfig, p_min: float, p_max: float, p_n: int) -> int:
    if not (0 < p_min < p_max and math.isfinite(p_max)):
        raise ConfigError(f"pressure range must satisfy 0 < p_min < p_max, got ({p_min}, {p_max})")
    if p_n < 2:
        raise ConfigError(f"p_n must be >= 2, got {p_n}")
    ctx = Context(cfg, need_drive=False)
    pressures = np.geomspace(p_min, p_max, p_n)
    inv = threshold_curve("inversion", ctx.atom, ctx.bath, pressures, cfg.chi_raman)
    awi = threshold_curve("awi", ctx.atom, ctx.bath, pressures, cfg.chi_raman)
    summary = {}
    for curve in (inv, awi):
        try:
            summary[curve.kind] = minimize_threshold(curve.kind, ctx.atom, ctx.bath, (p_min, p_max),
                                                     chi_raman=cfg.chi_raman)
        except NoMinimumError:
            summary[curve.kind] = None
    minima = {}
    for kind, val in summary.items():
        minima[f"{kind} kappa0_min"] = None if val is None else val[0]
        minima[f"{kind} P_min (Torr)"] = None if val is None else val[1]
    sections = {
        "config": {**cfg.section(), "p_min": p_min, "p_max": p_max, "p_n": p_n},
        "abscissa": {"pressure unit": "Torr", "drive": "resonant, delta = delta_p = 0, v = 0"},
        "rates at 1 Torr": rates_section(build_rate_set(ctx.atom, ctx.bath.at_pressure(1.0), cfg.chi_raman)),
        "minima": minima,
    }
    rows = zip(pressures, inv.kappa0, awi.kappa0, inv.present, awi.present)
    path = write_table(ctx.path("thresholds", "csv"), THRESHOLD_COLUMNS, rows, sections)
    if cfg.plot:
        from .plotting import plot_thresholds

        plot_thresholds(pressures, inv.kappa0, awi.kappa0, ctx.path("thresholds", "svg"),
                        title=f"{cfg.species}-{cfg.buffer}, {cfg.temperature:g} K",
                        minima={k: v for k, v in summary.items() if v is not None})
    for kind, val in summary.items():
        text = "absent in range" if val is None else f"kappa0_min = {val[0]:.6g} at P = {val[1]:.6g} Torr"
        print(f"{kind:>9s}: {text}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(cfg: RunConfig, quick: bool = False) -> int:
    from .species import load_catalog as _load
    from .validate import run_checks

    catalog = _load(cfg.catalog)  # corrupted catalog aborts here
    results = run_checks(catalog, quick=quick)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


# --------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser, drive: bool = True, scan: bool = True) -> None:
    p.add_argument("--species", default="K", help="atom name in the catalog (default K)")
    p.add_argument("--buffer", default="He", help="buffer gas (default He)")
    p.add_argument("--pressure-torr", type=float, default=16.0, dest="pressure")
    p.add_argument("--temperature-k", type=float, default=550.0, dest="temperature")
    p.add_argument("--chi-raman", type=float, default=0.0, help="extra Raman dephasing multiplier")
    p.add_argument("--catalog", default=None, help="species catalog file (default: packaged)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--plot", action="store_true", help="also write an SVG figure")
    if drive:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--kappa0", type=float, help="collisionless saturation parameter 4|g|^2/A21^2")
        g.add_argument("--rabi", type=float, help="drive Rabi frequency |g| in rad/s")
        g.add_argument("--intensity", type=float, help="drive intensity in W/cm^2")
        p.add_argument("--delta", type=float, default=0.0, help="drive detuning")
        p.add_argument("--delta-unit", choices=DELTA_UNITS, default="rad/s")
    if scan:
        p.add_argument("--scan-min", type=float, default=-10.0, help="probe detuning, units of Gamma31")
        p.add_argument("--scan-max", type=float, default=10.0)
        p.add_argument("--scan-n", type=int, default=401)
        p.add_argument("--doppler", action="store_true", help="velocity-average the spectrum")
        p.add_argument("--nodes", type=int, default=None, help="velocity nodes (default: automatic)")
        p.add_argument("--doppler-width", type=float, default=None,
                       help="Doppler HWHM in rad/s (default: thermal value of the probe line)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="awi", description="Inversionless gain in collisional alkali vapours.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("spectrum", help="probe line shape Im f, Re f vs delta_p/Gamma31"))
    _common(sub.add_parser("doppler", help="velocity-averaged probe line shape"))
    _common(sub.add_parser("populations", help="steady populations from the three models"), scan=False)
    p = sub.add_parser("thresholds", help="inversion and AWI threshold curves vs pressure")
    _common(p, drive=False, scan=False)
    p.add_argument("--p-min", type=float, default=0.1, help="lowest pressure (Torr)")
    p.add_argument("--p-max", type=float, default=1e4, help="highest pressure (Torr)")
    p.add_argument("--p-n", type=int, default=64, help="number of log-spaced pressures")
    p = sub.add_parser("validate", help="run the oracle suite")
    p.add_argument("--catalog", default=None)
    p.add_argument("--quick", action="store_true", help="fewer random draws")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in vars(args).items() if k in fields})


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "doppler":
            return cmd_doppler(cfg)
        if args.command == "populations":
            return cmd_populations(cfg)
        if args.command == "thresholds":
            return cmd_thresholds(cfg, args.p_min, args.p_max, args.p_n)
        return cmd_validate(cfg, args.quick)
    except (ConfigError, CatalogError, QuadratureError, FileNotFoundError) as exc:
        print(f"awi: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonConvergenceError, SingularSystemError, ZeroDivisionError) as exc:
        print(f"awi: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
