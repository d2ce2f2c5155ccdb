import numpy as np
import pytest

from awi.rates import DriveField, build_rate_set
from awi.steady import NonConvergenceError, susceptibility
from awi.transient import (
    DensityState,
    ground_rate,
    integrate_to_steady,
    linear_response_f,
    rhs,
    steady_populations,
)
from awi.validate import nondegenerate_pops


@pytest.fixture(scope="module")
def rates(catalog):
    return build_rate_set(catalog.atom("K"), catalog.bath("He", 16.0, 550.0))


def test_vector_round_trip():
    s = DensityState(1 + 2j, -3j, 0.5, 0.2, 0.1)
    assert DensityState.from_vector(s.to_vector()) == s
    assert s.r1 == pytest.approx(0.7)


def test_dark_equilibrium(rates):
    d = rhs(DensityState.ground(), 0.0, DriveField(0.0), 0.0, rates)
    assert d.to_vector().tolist() == [0.0] * 8


def test_probe_coherences_stay_dark(rates):
    d = rhs(DensityState.ground(), 0.0, DriveField(5e8, 1e8), 3e8, rates)
    assert d.r31 == 0 and d.r32 == 0
    assert d.r21 != 0


def test_trace_conservation_per_state(rates):
    rng = np.random.default_rng(4)
    for _ in range(50):
        r2, r3 = rng.dirichlet((1, 1, 1))[:2]
        c = rng.normal(size=6) * 0.1
        s = DensityState(complex(c[0], c[1]), complex(c[2], c[3]), complex(c[4], c[5]), r2, r3)
        drive = DriveField(float(rng.uniform(0, 1e9)), float(rng.normal() * 1e8))
        g_p = float(rng.uniform(0, 1e8))
        d = rhs(s, g_p, drive, float(rng.normal() * 1e9), rates)
        d1 = ground_rate(s, g_p, drive, rates)
        scale = rates.Gamma2 * r2 + rates.Gamma3 * r3 + 2e9
        assert abs(d1 + d.r2 + d.r3) / scale < 1e-14


def test_ground_stays_ground(rates):
    state, rep = integrate_to_steady(DensityState.ground(), 0.0, DriveField(0.0), 0.0, rates)
    assert rep.steps == 0 and rep.converged
    assert state == DensityState.ground()


@pytest.mark.parametrize("g,delta", [(3e8, 0.0), (1e9, 4e8), (3e9, -1e9)])
def test_populations_match_closed_form(rates, g, delta):
    drive = DriveField(g, delta)
    pops, rep = steady_populations(drive, rates)
    ref = nondegenerate_pops(drive, rates)
    assert np.allclose(pops, tuple(ref), rtol=1e-8, atol=0)
    assert rep.max_trace_defect < 1e-12
    assert rep.max_physicality_excess <= 1e-9


def test_strong_drive_physicality(rates):
    g = np.sqrt(10 * rates.Gamma21 * rates.Gamma32)
    state, rep = integrate_to_steady(DensityState.ground(), 1e-3 * rates.Gamma31, DriveField(g), 0.0, rates)
    assert rep.converged
    assert state.physicality_excess() <= 1e-9


def test_steady_state_independent_of_start(rates):
    drive = DriveField(8e8, 2e8)
    a, _ = integrate_to_steady(DensityState.ground(), 0.0, drive, 0.0, rates)
    b, _ = integrate_to_steady(DensityState(0j, 0j, 0j, 1 / 3, 1 / 3), 0.0, drive, 0.0, rates)
    assert np.allclose(a.to_vector(), b.to_vector(), rtol=1e-8, atol=1e-12)


def test_tol_validated(rates):
    with pytest.raises(ValueError):
        integrate_to_steady(DensityState.ground(), 0.0, DriveField(1e8), 0.0, rates, tol=1e-2)


def test_max_steps_reported(rates):
    with pytest.raises(NonConvergenceError):
        integrate_to_steady(DensityState.ground(), 0.0, DriveField(1e9), 0.0, rates, max_steps=5)


def test_lorentzian_linear_response(rates):
    G = rates.Gamma31
    for dp in (0.0, 0.7 * G, -2 * G):
        f = linear_response_f(dp, DriveField(0.0), rates)
        assert f == pytest.approx(1j * G / (G - 1j * dp), rel=1e-6)


@pytest.mark.parametrize("dp_scale", [0.0, 0.4, -1.5])
def test_linear_response_matches_closed_form(rates, dp_scale):
    drive = DriveField(6e8, 2e8)
    dp = dp_scale * rates.Gamma31
    f = linear_response_f(dp, drive, rates)
    ref = susceptibility(dp, drive, rates, nondegenerate_pops(drive, rates))
    assert abs(f - ref) / abs(ref) < 1e-5


def test_linear_response_independent_of_eps(rates):
    drive = DriveField(6e8, 2e8)
    dp = 0.3 * rates.Gamma31
    vals = [linear_response_f(dp, drive, rates, eps=e) for e in (1e-5, 1e-6, 1e-7)]
    for v in vals[1:]:
        assert abs(v - vals[0]) / abs(vals[0]) < 1e-4


def test_probe_coherence_linear_in_gp(rates):
    drive = DriveField(6e8)
    a, _ = integrate_to_steady(DensityState.ground(), 1e-6 * rates.Gamma31, drive, 0.0, rates)
    b, _ = integrate_to_steady(DensityState.ground(), 2e-6 * rates.Gamma31, drive, 0.0, rates)
    assert b.r31 / a.r31 == pytest.approx(2.0, rel=1e-5)
