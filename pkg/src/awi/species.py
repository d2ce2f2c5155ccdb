"""Atomic and collision data for alkali V-schemes, plus unit conversions.

Quantities are kept in SI internally (m, kg, J, s^-1) with two exceptions
inherited from collision-physics practice: cross-sections are stored in cm^2
and number densities / speeds elsewhere in the package are in cm^-3 / cm/s.

The on-disk catalog is an INI file with one ``[atom:<name>]`` section per
species and one ``[buffer:<name>]`` section per buffer gas; see
``data/catalog.ini`` for the reference copy and the unit of every key.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from scipy.constants import atomic_mass, c, h, k as k_B

TORR_TO_PA = 101325.0 / 760.0
ANGSTROM2_TO_CM2 = 1e-16

DEFAULT_CATALOG = "catalog.ini"

# key -> (to-internal factor, is-integer); inverse applied on write
_ATOM_KEYS: dict[str, tuple[float, bool]] = {
    "lambda_probe": (1e-9, False),
    "lambda_drive": (1e-9, False),
    "A21": (1.0, False),
    "A31": (1.0, False),
    "delta_E": (None, False),  # handled by energy_from_wavenumber
    "mass": (atomic_mass, False),
    "g1": (1.0, True),
    "g2": (1.0, True),
    "g3": (1.0, True),
    "sigma_23": (ANGSTROM2_TO_CM2, False),
    "sigma_32": (ANGSTROM2_TO_CM2, False),
    "sigma_b21": (ANGSTROM2_TO_CM2, False),
    "sigma_b31": (ANGSTROM2_TO_CM2, False),
}


class CatalogError(ValueError):
    """Raised for unreadable, malformed or physically invalid catalog data."""


def energy_from_wavenumber(w: float) -> float:
    """Convert a wavenumber in cm^-1 to an energy in J."""
    if w < 0:
        raise ValueError(f"wavenumber must be >= 0, got {w}")
    return h * c * (w * 100.0)


def wavenumber_from_energy(E: float) -> float:
    return E / (h * c) / 100.0


def pressure_to_pascal(p: float) -> float:
    """Convert Torr to Pa."""
    if p < 0:
        raise ValueError(f"pressure must be >= 0, got {p}")
    return p * TORR_TO_PA


@dataclass(frozen=True)
class AtomSystem:
    """Three-level parameters of one alkali species.

    Level |1> is the S1/2 ground state, |2> the P3/2 level coupled by the
    drive (D2 line), |3> the P1/2 level probed on the D1 line.
    """

    name: str
    lambda_probe: float  # m
    lambda_drive: float  # m
    A21: float  # s^-1
    A31: float  # s^-1
    delta_E: float  # J, E2 - E3
    mass: float  # kg
    g1: int
    g2: int
    g3: int
    sigma_23: float  # cm^2
    sigma_32: float  # cm^2
    sigma_b21: float  # cm^2
    sigma_b31: float  # cm^2

    def __post_init__(self):
        for key in ("lambda_probe", "lambda_drive", "A21", "A31", "delta_E",
                    "mass", "sigma_23", "sigma_32", "sigma_b21", "sigma_b31"):
            value = getattr(self, key)
            if not value > 0:
                raise CatalogError(f"{self.name}: {key} must be > 0, got {value}")
        for key in ("g1", "g2", "g3"):
            value = getattr(self, key)
            if int(value) != value or value < 1:
                raise CatalogError(f"{self.name}: {key} must be a positive integer, got {value}")
        if not self.lambda_drive < self.lambda_probe:
            raise CatalogError(
                f"{self.name}: lambda_drive must be shorter than lambda_probe "
                f"({self.lambda_drive} >= {self.lambda_probe})"
            )

    @property
    def degeneracies(self) -> tuple[int, int, int]:
        return (self.g1, self.g2, self.g3)

    @property
    def k_probe(self) -> float:
        return 2 * 3.141592653589793 / self.lambda_probe

    @property
    def k_drive(self) -> float:
        return 2 * 3.141592653589793 / self.lambda_drive

    def boltzmann_exponent(self, temperature: float) -> float:
        """Return delta_E / (k_B T)."""
        return self.delta_E / (k_B * temperature)


@dataclass(frozen=True)
class BathConditions:
    buffer: str
    buffer_mass: float  # kg
    pressure: float  # Torr
    temperature: float  # K

    def __post_init__(self):
        if self.pressure < 0:
            raise ValueError(f"pressure must be >= 0, got {self.pressure}")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if not self.buffer_mass > 0:
            raise ValueError(f"buffer_mass must be > 0, got {self.buffer_mass}")

    def at_pressure(self, pressure: float) -> "BathConditions":
        return BathConditions(self.buffer, self.buffer_mass, pressure, self.temperature)


@dataclass(frozen=True)
class SpeciesCatalog:
    atoms: Mapping[str, AtomSystem]
    buffers: Mapping[str, float] = field(default_factory=dict)  # name -> kg

    def atom(self, name: str) -> AtomSystem:
        try:
            return self.atoms[name]
        except KeyError:
            raise KeyError(f"unknown species {name!r}; known: {sorted(self.atoms)}") from None

    def buffer_mass(self, name: str) -> float:
        try:
            return self.buffers[name]
        except KeyError:
            raise KeyError(f"unknown buffer gas {name!r}; known: {sorted(self.buffers)}") from None

    def bath(self, buffer: str, pressure: float, temperature: float) -> BathConditions:
        return BathConditions(buffer, self.buffer_mass(buffer), pressure, temperature)


def _line_index(text: str) -> dict[tuple[str, str], int]:
    """Map (section, key) to 1-based line numbers for error reporting."""
    index = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        m = re.match(r"\[(.+)\]$", stripped)
        if m:
            section = m.group(1).strip()
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", stripped)
        if m and section is not None:
            index[(section, m.group(1).strip())] = lineno
    return index


def parse_catalog(text: str, source: str = "<string>") -> SpeciesCatalog:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise CatalogError(f"{source}:{lineno}: cannot parse line {line.strip()!r}") from exc
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", "?")
        raise CatalogError(f"{source}:{lineno}: {exc.message}") from exc

    lines = _line_index(text)
    atoms: dict[str, AtomSystem] = {}
    buffers: dict[str, float] = {}
    for section in parser.sections():
        kind, _, name = section.partition(":")
        where = lambda key: f"{source}:{lines.get((section, key), '?')}"  # noqa: E731
        if kind == "atom" and name:
            missing = [key for key in _ATOM_KEYS if key not in parser[section]]
            if missing:
                raise CatalogError(f"{source}: [{section}] missing keys {missing}")
            unknown = [key for key in parser[section] if key not in _ATOM_KEYS]
            if unknown:
                raise CatalogError(f"{where(unknown[0])}: [{section}] unknown key {unknown[0]!r}")
            values = {}
            for key, (factor, integer) in _ATOM_KEYS.items():
                raw = parser[section][key]
                try:
                    number = int(raw) if integer else float(raw)
                except ValueError:
                    raise CatalogError(f"{where(key)}: {key} = {raw!r} is not a number") from None
                if key == "delta_E":
                    if number < 0:
                        raise CatalogError(f"{where(key)}: {name}: delta_E must be > 0, got {number}")
                    values[key] = energy_from_wavenumber(number)
                elif integer:
                    values[key] = number
                else:
                    values[key] = number * factor
            try:
                atoms[name] = AtomSystem(name=name, **values)
            except CatalogError as exc:
                raise CatalogError(f"{source}: {exc}") from None
        elif kind == "buffer" and name:
            raw = parser[section].get("mass")
            if raw is None:
                raise CatalogError(f"{source}: [{section}] missing key 'mass'")
            try:
                mass = float(raw)
            except ValueError:
                raise CatalogError(f"{where('mass')}: mass = {raw!r} is not a number") from None
            if not mass > 0:
                raise CatalogError(f"{where('mass')}: {name}: mass must be > 0, got {mass}")
            buffers[name] = mass * atomic_mass
        else:
            raise CatalogError(f"{source}: unrecognised section [{section}]")
    return SpeciesCatalog(atoms=atoms, buffers=buffers)


def load_catalog(path: str | Path | None = None) -> SpeciesCatalog:
    """Read a species catalog; ``None`` loads the reference file shipped with the package."""
    if path is None:
        text = resources.files("awi.data").joinpath(DEFAULT_CATALOG).read_text(encoding="utf-8")
        return parse_catalog(text, source=DEFAULT_CATALOG)
    path = Path(path)
    if not path.is_file():
        raise CatalogError(f"catalog file not found: {path}")
    return parse_catalog(path.read_text(encoding="utf-8"), source=str(path))


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def dump_catalog(catalog: SpeciesCatalog) -> str:
    """Serialize a catalog back to the INI text format (input units)."""
    out = []
    for name, atom in catalog.atoms.items():
        out.append(f"[atom:{name}]")
        for key, (factor, integer) in _ATOM_KEYS.items():
            value = getattr(atom, key)
            if key == "delta_E":
                text = _fmt(wavenumber_from_energy(value))
            elif integer:
                text = str(int(value))
            else:
                text = _fmt(value / factor)
            out.append(f"{key} = {text}")
        out.append("")
    for name, mass in catalog.buffers.items():
        out.append(f"[buffer:{name}]")
        out.append(f"mass = {_fmt(mass / atomic_mass)}")
        out.append("")
    return "\n".join(out)
