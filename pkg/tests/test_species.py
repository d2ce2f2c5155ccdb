import math
from importlib import resources

import pytest
from hypothesis import given, strategies as st

from awi.species import (
    ANGSTROM2_TO_CM2,
    CatalogError,
    dump_catalog,
    energy_from_wavenumber,
    load_catalog,
    parse_catalog,
    pressure_to_pascal,
    wavenumber_from_energy,
)

# hand values of h*c*100 and k_B (CODATA) kept separate from scipy
HC_PER_CM = 6.62607015e-34 * 299792458.0 * 100.0
KB = 1.380649e-23

# collision cross-section table (A^2): sigma_23, sigma_32, sigma_b21, sigma_b31
TABLE = {
    "Na": (41.1, 77, 159, 137),
    "K": (52.8, 84, 133, 100),
    "Rb": (0.12, 0.1, 145, 145),
}


def catalog_text():
    return resources.files("awi.data").joinpath("catalog.ini").read_text()


@pytest.mark.parametrize("name", sorted(TABLE))
def test_table_cross_sections_exact(catalog, name):
    atom = catalog.atom(name)
    got = (atom.sigma_23, atom.sigma_32, atom.sigma_b21, atom.sigma_b31)
    for value, expected in zip(got, TABLE[name]):
        assert value == expected * ANGSTROM2_TO_CM2


def test_table_values_verbatim_in_file():
    text = catalog_text()
    for line in ("sigma_23 = 41.1", "sigma_23 = 0.12", "sigma_32 = 0.1", "sigma_23 = 52.8"):
        assert line in text


def test_na_sigma23_in_cm2(catalog):
    assert catalog.atom("Na").sigma_23 == pytest.approx(41.1e-16, rel=1e-15)


def test_rb_sigma23(catalog):
    assert catalog.atom("Rb").sigma_23 / ANGSTROM2_TO_CM2 == pytest.approx(0.12, rel=1e-15)


def test_atom_invariants(catalog):
    for name in ("Na", "K", "Rb"):
        atom = catalog.atom(name)
        assert atom.degeneracies == (2, 4, 2)
        assert atom.lambda_drive < atom.lambda_probe
        assert atom.delta_E > 0
        assert atom.k_probe < atom.k_drive


def test_every_value_has_citation():
    lines = catalog_text().splitlines()
    for i, line in enumerate(lines):
        key = line.split("=")[0].strip()
        if "=" in line and key not in ("g1", "g2", "g3") and not line.startswith("#"):
            assert lines[i - 1].startswith("#"), f"no citation above {line!r}"


def test_unknown_names_fail(catalog):
    with pytest.raises(KeyError, match="Cs"):
        catalog.atom("Cs")
    with pytest.raises(KeyError, match="Xe"):
        catalog.buffer_mass("Xe")


def test_negative_cross_section_names_field():
    text = catalog_text().replace("sigma_23 = 41.1", "sigma_23 = -1", 1)
    with pytest.raises(CatalogError, match="sigma_23"):
        parse_catalog(text)


def test_parse_error_has_line_number():
    text = catalog_text()
    lines = text.splitlines()
    lines.insert(20, "this line is garbage")
    with pytest.raises(CatalogError, match=r":21"):
        parse_catalog("\n".join(lines), "bad.ini")


def test_bad_number_reports_line():
    text = catalog_text()
    lineno = text.splitlines().index("sigma_23 = 41.1") + 1
    with pytest.raises(CatalogError, match=rf":{lineno}:.*sigma_23"):
        parse_catalog(text.replace("sigma_23 = 41.1", "sigma_23 = 4x1", 1), "cat.ini")


def test_missing_file(tmp_path):
    with pytest.raises(CatalogError, match="not found"):
        load_catalog(tmp_path / "nope.ini")


def test_unknown_key_rejected():
    text = catalog_text().replace("g1 = 2", "g1 = 2\nspin = 3", 1)
    with pytest.raises(CatalogError, match="spin"):
        parse_catalog(text)


def test_load_from_path(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text(catalog_text())
    assert load_catalog(path).atom("K") == load_catalog().atom("K")


def test_round_trip_text_identical(catalog):
    first = dump_catalog(catalog)
    again = dump_catalog(parse_catalog(first))
    assert first == again
    assert parse_catalog(first).atom("Na") == catalog.atom("Na")


def test_energy_zero():
    assert energy_from_wavenumber(0.0) == 0.0


def test_energy_one_wavenumber():
    assert energy_from_wavenumber(1.0) == pytest.approx(1.986e-23, rel=1e-3)
    assert energy_from_wavenumber(1.0) == pytest.approx(HC_PER_CM, rel=1e-12)


def test_energy_negative_rejected():
    with pytest.raises(ValueError):
        energy_from_wavenumber(-1.0)


def test_na_boltzmann_exponent():
    # quoted estimate 4.3e-2 at 550 K for 17.2 cm^-1; hand value is 0.0450
    x = energy_from_wavenumber(17.2) / (KB * 550.0)
    assert x == pytest.approx(17.2 * HC_PER_CM / (KB * 550.0), rel=1e-12)
    assert x == pytest.approx(4.3e-2, rel=0.03)


@given(st.floats(0, 1e5), st.floats(0, 1e5))
def test_energy_linear(a, b):
    assert energy_from_wavenumber(a + b) == pytest.approx(
        energy_from_wavenumber(a) + energy_from_wavenumber(b), rel=1e-14, abs=1e-300)


@given(st.floats(0, 1e6))
def test_wavenumber_inverse(w):
    assert wavenumber_from_energy(energy_from_wavenumber(w)) == pytest.approx(w, rel=1e-14, abs=1e-300)


def test_pressure_conversions():
    assert pressure_to_pascal(0.0) == 0.0
    assert pressure_to_pascal(760.0) == pytest.approx(101325.0, rel=1e-4)
    assert pressure_to_pascal(1.0) == pytest.approx(133.322, rel=1e-5)
    with pytest.raises(ValueError):
        pressure_to_pascal(-1.0)


def test_bath_validation(catalog):
    with pytest.raises(ValueError):
        catalog.bath("He", -1.0, 300.0)
    with pytest.raises(ValueError):
        catalog.bath("He", 1.0, 0.0)
    bath = catalog.bath("He", 1.0, 300.0)
    assert bath.at_pressure(5.0).pressure == 5.0
    assert bath.buffer_mass == pytest.approx(4.002602 * 1.66053906660e-27, rel=1e-9)


def test_catalog_immutable(catalog):
    atom = catalog.atom("Na")
    with pytest.raises(Exception):
        atom.A21 = 1.0
    assert math.isfinite(atom.mass)
