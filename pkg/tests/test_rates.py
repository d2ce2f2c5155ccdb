import math
from types import SimpleNamespace

import pytest
from hypothesis import given, settings, strategies as st

from awi.rates import (
    DriveField,
    RateSet,
    build_rate_set,
    collision_frequency,
    detailed_balance,
    kappa0_collisionless,
    kappa_prime,
    mean_relative_speed,
    number_density,
    rabi_from_intensity,
    saturation_intensity,
    saturation_kappa,
    transfer_rates,
)
from awi.species import BathConditions
from awi.steady import populations_high_pressure

KB = 1.380649e-23
AMU = 1.66053906660e-27
TORR = 101325.0 / 760.0


def hand_density(P_torr, T):
    return P_torr * TORR / (KB * T) / 1e6


def hand_speed(m1_amu, m2_amu, T):
    mu = m1_amu * m2_amu / (m1_amu + m2_amu) * AMU
    return math.sqrt(8 * KB * T / (math.pi * mu)) * 100.0


# -- number density ---------------------------------------------------------


def test_density_zero(catalog):
    assert number_density(catalog.bath("He", 0.0, 550.0)) == 0.0


def test_density_atmosphere(catalog):
    assert number_density(catalog.bath("He", 760.0, 550.0)) == pytest.approx(1.33e19, rel=0.01)


def test_density_one_torr(catalog):
    assert number_density(catalog.bath("He", 1.0, 300.0)) == pytest.approx(3.22e16, rel=0.01)


# -- mean relative speed ----------------------------------------------------


def test_speed_symmetric():
    assert mean_relative_speed(3e-26, 7e-27, 400.0) == mean_relative_speed(7e-27, 3e-26, 400.0)


def test_speed_na_he(catalog):
    v = mean_relative_speed(catalog.atom("Na").mass, catalog.buffer_mass("He"), 550.0)
    assert v == pytest.approx(1.85e5, rel=0.02)
    assert v == pytest.approx(hand_speed(22.98977, 4.002602, 550.0), rel=1e-6)


def test_speed_zero_temperature():
    assert mean_relative_speed(3e-26, 7e-27, 0.0) == 0.0


# -- transfer rates ---------------------------------------------------------


def test_transfer_zero_cross_section(catalog):
    # transfer_rates only reads the two cross-sections
    zero = SimpleNamespace(sigma_23=0.0, sigma_32=0.0)
    assert transfer_rates(1e19, 1e5, zero) == (0.0, 0.0)
    assert transfer_rates(0.0, 1e5, catalog.atom("Na")) == (0.0, 0.0)


def test_transfer_na_quoted_estimate(catalog):
    from dataclasses import replace

    atom = replace(catalog.atom("Na"), sigma_23=4e-15)
    bath = catalog.bath("He", 760.0, 550.0)
    N = number_density(bath)
    v = mean_relative_speed(atom.mass, bath.buffer_mass, 550.0)
    w23, _ = transfer_rates(N, v, atom)
    assert 7.5e9 / 1.5 <= w23 <= 7.5e9 * 1.5


def test_transfer_k_hand(catalog):
    atom = catalog.atom("K")
    rates = build_rate_set(atom, catalog.bath("He", 16.0, 550.0))
    hand = hand_density(16.0, 550.0) * hand_speed(39.0983, 4.002602, 550.0) * 52.8e-16
    assert rates.w23 == pytest.approx(hand, rel=1e-9)
    assert rates.w32 == pytest.approx(hand * 84 / 52.8, rel=1e-9)


# -- rate set ---------------------------------------------------------------


@pytest.mark.parametrize("name", ["Na", "K", "Rb"])
def test_collisionless_limit(catalog, name):
    atom = catalog.atom(name)
    r = build_rate_set(atom, catalog.bath("He", 0.0, 550.0))
    assert (r.Gamma2, r.Gamma3) == (atom.A21, atom.A31)
    assert r.Gamma21 == atom.A21 / 2 and r.Gamma31 == atom.A31 / 2
    assert r.w23 == 0.0 and r.w32 == 0.0


def test_na_gamma21_estimate(catalog):
    r = build_rate_set(catalog.atom("Na"), catalog.bath("He", 760.0, 550.0))
    assert 5e10 / 1.5 <= r.Gamma21 <= 5e10 * 1.5


def test_na_gamma32_close_to_w23(catalog):
    r = build_rate_set(catalog.atom("Na"), catalog.bath("He", 760.0, 550.0))
    assert 1 / 1.3 <= r.Gamma32 / r.w23 <= 1.3


def test_chi_raman_adds_dephasing(catalog):
    atom, bath = catalog.atom("K"), catalog.bath("He", 16.0, 550.0)
    r0 = build_rate_set(atom, bath)
    r1 = build_rate_set(atom, bath, chi_raman=2.0)
    Nv = collision_frequency(atom, bath)
    assert r1.Gamma32 - r0.Gamma32 == pytest.approx(2.0 * Nv * (atom.sigma_b21 + atom.sigma_b31) / 2, rel=1e-12)
    with pytest.raises(ValueError):
        build_rate_set(atom, bath, chi_raman=-1.0)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["Na", "K", "Rb"]), st.floats(0.0, 5000.0), st.floats(200.0, 1000.0))
def test_population_identities_exact(name, P, T):
    from awi.species import load_catalog

    cat = load_catalog()
    r = build_rate_set(cat.atom(name), cat.bath("He", P, T))
    assert r.Gamma2 == r.A21 + r.w23
    assert r.Gamma3 == r.A31 + r.w32
    assert min(r.as_dict().values()) >= 0


@pytest.mark.parametrize("name", ["Na", "K", "Rb"])
def test_rates_linear_in_pressure(catalog, name):
    atom = catalog.atom(name)
    r1 = build_rate_set(atom, catalog.bath("He", 10.0, 550.0))
    r3 = build_rate_set(atom, catalog.bath("He", 30.0, 550.0))
    assert r3.w23 == pytest.approx(3 * r1.w23, rel=1e-12)
    assert r3.Gamma21 - atom.A21 / 2 == pytest.approx(3 * (r1.Gamma21 - atom.A21 / 2), rel=1e-12)
    assert r3.Gamma31 - atom.A31 / 2 == pytest.approx(3 * (r1.Gamma31 - atom.A31 / 2), rel=1e-12)


def test_rateset_validation():
    with pytest.raises(ValueError, match="Gamma21"):
        RateSet.from_components(1.0, 1.0, 0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError, match="w23"):
        RateSet.from_components(1.0, 1.0, -1.0, 0.0, 1.0, 1.0)
    r = RateSet.from_components(2.0, 3.0, 5.0, 7.0, 1.0, 1.0)
    assert r.Gamma32 == r.Gamma23 == 0.5 * (7.0 + 10.0)


# -- saturation parameters --------------------------------------------------


@pytest.fixture
def k_rates(catalog):
    return build_rate_set(catalog.atom("K"), catalog.bath("He", 16.0, 550.0))


def test_kappa_zero_drive(k_rates):
    assert saturation_kappa(DriveField(0.0), k_rates) == 0.0


def test_kappa_resonant(k_rates):
    g = 3e8
    assert saturation_kappa(DriveField(g), k_rates) == pytest.approx(
        2 * g * g / (k_rates.Gamma21 * k_rates.Gamma2), rel=1e-14)


def test_kappa_far_detuned(k_rates):
    d = 100 * k_rates.Gamma21
    a = saturation_kappa(DriveField(3e8, d), k_rates)
    b = saturation_kappa(DriveField(3e8, 2 * d), k_rates)
    assert a / b == pytest.approx(4.0, rel=0.01)


def test_kappa_prime_no_transfer():
    r = RateSet.from_components(6e7, 6e7, 0.0, 0.0, 3e7, 3e7)
    assert kappa_prime(1.7, r) == pytest.approx(3.4, rel=1e-15)
    assert kappa_prime(0.0, r) == 0.0


def test_kappa_prime_matches_high_pressure_form(catalog):
    atom = catalog.atom("Na")
    bath = catalog.bath("He", 760.0, 550.0)
    base = build_rate_set(atom, bath)
    x = atom.boltzmann_exponent(550.0)
    w32 = base.w23 * math.exp(-x)
    r = RateSet.from_components(atom.A21, atom.A31, base.w23, w32, base.Gamma21, base.Gamma31)
    drive = DriveField(2e10)
    kp16 = kappa_prime(saturation_kappa(drive, r), r)
    _, kp19 = populations_high_pressure(drive, r.Gamma21, atom.A21, x)
    assert kp16 == pytest.approx(kp19, rel=0.05)


def test_kappa_prime_degenerate_denominator():
    r = RateSet(Gamma2=1.0, Gamma3=1.0, Gamma21=1.0, Gamma31=1.0, Gamma32=1.0, w23=1.0, w32=1.0, A21=0.0, A31=0.0)
    with pytest.raises(ZeroDivisionError):
        kappa_prime(1.0, r)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1e6), st.floats(0, 1e10), st.floats(0, 1e10), st.floats(1e6, 1e11))
def test_kappa_prime_at_least_twice_kappa(kappa, w23, w32, G):
    r = RateSet.from_components(6e7, 6e7, w23, w32, G, G)
    kp = kappa_prime(kappa, r)
    assert kp >= 2 * kappa * (1 - 1e-15)


def test_kappa0_values(catalog):
    assert kappa0_collisionless(0.0, 6e7) == 0.0
    assert kappa0_collisionless(3e7, 6e7) == pytest.approx(1.0, rel=1e-15)
    k0 = kappa0_collisionless(3.7e8, catalog.atom("K").A21)
    assert 370 / 1.5 <= k0 <= 370 * 1.5
    with pytest.raises(ValueError):
        kappa0_collisionless(1.0, 0.0)


def test_drive_from_kappa0_round_trip():
    d = DriveField.from_kappa0(370.0, 3.79e7)
    assert kappa0_collisionless(d.g, 3.79e7) == pytest.approx(370.0, rel=1e-14)


# -- intensity ---------------------------------------------------------------


def test_rabi_zero_intensity(catalog):
    assert rabi_from_intensity(0.0, catalog.atom("Na")) == 0.0


def test_rabi_na_quoted_estimate(catalog):
    # 0.1 W into 1e-5 cm^2; the quoted 3.6 GHz is read as an ordinary frequency (x 2 pi)
    g = rabi_from_intensity(0.1 / 1e-5, catalog.atom("Na"))
    target = 2 * math.pi * 3.6e9
    assert target / 2 <= g <= target * 2


def test_rabi_square_root_law(catalog):
    atom = catalog.atom("K")
    assert rabi_from_intensity(4.0, atom) == pytest.approx(2 * rabi_from_intensity(1.0, atom), rel=1e-14)


def test_saturation_intensity_na(catalog):
    # about 6.26 mW/cm^2 for the cycling D2 transition
    assert saturation_intensity(catalog.atom("Na")) == pytest.approx(62.6, rel=0.01)


# -- detailed balance diagnostic --------------------------------------------


def test_detailed_balance_na(catalog):
    ratio, thermal = detailed_balance(catalog.atom("Na"), 550.0)
    assert 1 / ratio == pytest.approx(0.534, abs=1e-3)
    assert 1 / thermal == pytest.approx(0.523, abs=3e-3)
    assert ratio == pytest.approx(thermal, rel=0.05)


def test_bath_conditions_direct():
    b = BathConditions("He", 4.0 * AMU, 0.0, 300.0)
    assert number_density(b) == 0.0
