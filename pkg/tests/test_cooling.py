import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cryodiamond.constants import HC, NM, STEFAN_BOLTZMANN
from cryodiamond.cooling import (
    BeamParams,
    CoolingDomainError,
    DefectSpecies,
    LoadKind,
    ParticleEnvironment,
    WarnFlag,
    cooling_power,
    effective_mean_wavelength,
    effective_mean_wavelength_from_kappa,
    equilibrium_delta_T,
    evaluate,
    saturation_intensity,
    sweep_delta_T,
)
from cryodiamond.spectra import Spectrum

# Frozen from a standalone math-module evaluation of the closed forms.
I_S_EXAMPLE = 217803333258184.5  # 760 nm, 1e-25 m^2, 8.333e7 /s
P_COOL_NV = 2.8663321776744403e-08
DELTA_T_NV_VACUUM = -3.917228262260191
WATER_TO_VACUUM = 0.16254637480156806

NV = DefectSpecies("NV-", gamma_rad=1 / 12e-9, lambda_F=721e-9, number_density=2.65e24)
BEAM = BeamParams(power=0.1, wavelength=760e-9, spot_radius=5e-6)
VACUUM = ParticleEnvironment(diameter=20e-6, ambient_T=295.0)
WATER = ParticleEnvironment(
    diameter=20e-6, ambient_T=295.0, load_kind=LoadKind.LIQUID_CONVECTIVE, h_conv=30.0
)
S_ABS, S_SE = 1e-25, 3e-24


# -- saturation intensity -----------------------------------------------------

def test_saturation_intensity_example():
    assert saturation_intensity(760e-9, 1e-25, 8.333e7) == pytest.approx(I_S_EXAMPLE, rel=1e-12)
    assert saturation_intensity(760e-9, 1e-25, 8.333e7) == pytest.approx(2.178e14, rel=1e-3)


def test_saturation_intensity_scaling():
    base = saturation_intensity(760e-9, 1e-25, 8e7)
    assert saturation_intensity(760e-9, 2e-25, 8e7) == pytest.approx(base / 2, rel=1e-14)
    assert saturation_intensity(760e-9, 1e-25, 3 * 8e7) == pytest.approx(3 * base, rel=1e-14)


def test_saturation_intensity_no_absorption():
    with pytest.raises(CoolingDomainError, match="no absorption"):
        saturation_intensity(760e-9, 0.0, 8e7)


# -- effective mean wavelength ------------------------------------------------

def test_effective_wavelength_values():
    assert effective_mean_wavelength(721e-9, 1.0) == 721e-9
    assert effective_mean_wavelength(721e-9, 0.75) == pytest.approx(1.5 * 721e-9, rel=1e-14)
    assert effective_mean_wavelength(721e-9, 0.5 + 1e-9) > 1e-1


@pytest.mark.parametrize("eta", [0.5, 0.3, 0.0, 1.2])
def test_effective_wavelength_domain(eta):
    with pytest.raises(CoolingDomainError):
        effective_mean_wavelength(721e-9, eta)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.5001, 1.0))
def test_kappa_form_matches_eta_form(eta):
    gamma_rad = 1 / 12e-9
    gamma_nrad = gamma_rad * (1 - eta) / eta
    kappa = gamma_nrad * HC / 721e-9
    assert effective_mean_wavelength_from_kappa(721e-9, kappa, gamma_rad) == pytest.approx(
        effective_mean_wavelength(721e-9, eta), rel=1e-12
    )
    assert effective_mean_wavelength(721e-9, eta) >= 721e-9


def test_kappa_limits():
    gamma_rad = 1 / 12e-9
    pole = HC * gamma_rad / 721e-9
    assert effective_mean_wavelength_from_kappa(721e-9, 0.0, gamma_rad) == pytest.approx(721e-9, rel=1e-15)
    assert effective_mean_wavelength_from_kappa(721e-9, pole / 2, gamma_rad) == pytest.approx(2 * 721e-9, rel=1e-12)
    with pytest.raises(CoolingDomainError):
        effective_mean_wavelength_from_kappa(721e-9, pole, gamma_rad)
    with pytest.raises(CoolingDomainError):
        effective_mean_wavelength_from_kappa(721e-9, -1.0, gamma_rad)


# -- cooling power and delta T ------------------------------------------------

def test_cooling_power_worked_example():
    assert cooling_power(NV, BEAM, VACUUM, S_ABS, S_SE) == pytest.approx(P_COOL_NV, rel=1e-9)
    assert P_COOL_NV == pytest.approx(2.87e-8, rel=2e-3)


def test_delta_T_worked_example():
    dt = equilibrium_delta_T(NV, BEAM, VACUUM, S_ABS, S_SE)
    assert dt == pytest.approx(DELTA_T_NV_VACUUM, rel=1e-9)
    load = math.pi * (20e-6) ** 2 * 4 * STEFAN_BOLTZMANN * 295.0**3
    assert dt == pytest.approx(-P_COOL_NV / load, rel=1e-9)


def test_zero_crossing_at_lambda_F_star():
    for eta in (1.0, 0.9):
        species = DefectSpecies("x", 1 / 12e-9, 721e-9, 2.65e24, quantum_efficiency=eta)
        beam = BeamParams(0.1, species.lambda_F_star, 5e-6)
        assert cooling_power(species, beam, VACUUM, S_ABS, S_SE) == 0.0
        assert equilibrium_delta_T(species, beam, VACUUM, S_ABS, S_SE) == 0.0


def test_convective_load_reduction():
    vac = equilibrium_delta_T(NV, BEAM, VACUUM, S_ABS, S_SE)
    wat = equilibrium_delta_T(NV, BEAM, WATER, S_ABS, S_SE)
    flux = 4 * STEFAN_BOLTZMANN * 295.0**3
    assert wat / vac == pytest.approx(flux / (flux + 30.0), rel=1e-12)
    assert wat / vac == pytest.approx(WATER_TO_VACUUM, rel=1e-10)


def test_saturation_limit():
    i_s = saturation_intensity(BEAM.wavelength, S_ABS, NV.gamma_rad)
    alpha = BEAM.effective_area
    limit = NV.number_density * VACUUM.length * alpha * i_s * S_ABS * (BEAM.wavelength / 721e-9 - 1) / (1 + S_SE / S_ABS)
    p_big = 1e3 * alpha * i_s
    p1 = cooling_power(NV, BeamParams(p_big, BEAM.wavelength, 5e-6), VACUUM, S_ABS, S_SE)
    p2 = cooling_power(NV, BeamParams(2 * p_big, BEAM.wavelength, 5e-6), VACUUM, S_ABS, S_SE)
    assert 0 < (limit - p1) / limit <= 1e-3
    assert abs(p2 - p1) / p1 < 0.01
    assert p1 < p2 < limit


def test_interaction_length_override():
    env = ParticleEnvironment(diameter=20e-6, interaction_length=10e-6)
    full_dt = equilibrium_delta_T(NV, BEAM, VACUUM, S_ABS, S_SE)
    full_p = cooling_power(NV, BEAM, VACUUM, S_ABS, S_SE)
    assert equilibrium_delta_T(NV, BEAM, env, S_ABS, S_SE) == pytest.approx(full_dt / 2, rel=1e-12)
    assert cooling_power(NV, BEAM, env, S_ABS, S_SE) == pytest.approx(full_p / 2, rel=1e-12)


def test_environment_validation():
    with pytest.raises(ValueError):
        ParticleEnvironment(diameter=20e-6, load_kind=LoadKind.LIQUID_CONVECTIVE)
    with pytest.raises(ValueError):
        ParticleEnvironment(diameter=20e-6, emissivity=0.0)
    with pytest.raises(ValueError):
        BeamParams(0.0, 760e-9, 5e-6)
    with pytest.raises(ValueError):
        DefectSpecies("x", 1.0, 721e-9, 1.0, quantum_efficiency=0.0)
    # representable, but rejected when evaluated
    low = DefectSpecies("x", 1.0, 721e-9, 1.0, quantum_efficiency=0.4)
    with pytest.raises(CoolingDomainError):
        cooling_power(low, BEAM, VACUUM, S_ABS, S_SE)


def test_linearization_flag():
    big = BeamParams(1e3, 760e-9, 5e-6)
    r = evaluate(NV, big, VACUUM, 1e-22, 1e-21)
    assert abs(r.delta_T) / 295 > 0.2
    assert r.warning is WarnFlag.LINEARIZATION
    assert evaluate(NV, BEAM, VACUUM, S_ABS, S_SE).warning is WarnFlag.NONE


# -- randomized properties ----------------------------------------------------

species_st = st.builds(
    DefectSpecies,
    name=st.just("x"),
    gamma_rad=st.floats(1e6, 1e10),
    lambda_F=st.floats(600e-9, 800e-9),
    number_density=st.floats(1e20, 1e26),
    quantum_efficiency=st.floats(0.55, 1.0),
)
beam_st = st.builds(
    BeamParams, power=st.floats(1e-6, 10.0), wavelength=st.floats(550e-9, 1000e-9), spot_radius=st.floats(1e-6, 50e-6)
)
env_st = st.one_of(
    st.builds(
        ParticleEnvironment,
        diameter=st.floats(1e-6, 500e-6),
        ambient_T=st.floats(50.0, 400.0),
        emissivity=st.floats(0.05, 1.0),
    ),
    st.builds(
        ParticleEnvironment,
        diameter=st.floats(1e-6, 500e-6),
        ambient_T=st.floats(50.0, 400.0),
        emissivity=st.floats(0.05, 1.0),
        load_kind=st.just(LoadKind.LIQUID_CONVECTIVE),
        h_conv=st.floats(1.0, 1e4),
    ),
)
sigma_st = st.floats(1e-28, 1e-18)


@settings(max_examples=300, deadline=None)
@given(species_st, beam_st, env_st, sigma_st, sigma_st)
def test_sign_law_and_load_consistency(species, beam, env, s_abs, s_se):
    lam_star = species.lambda_F_star
    p = cooling_power(species, beam, env, s_abs, s_se)
    dt = equilibrium_delta_T(species, beam, env, s_abs, s_se)
    assert dt * (beam.wavelength - lam_star) <= 0
    assert p * (beam.wavelength - lam_star) >= 0
    if p != 0:
        assert dt == pytest.approx(-p / env.load_coefficient, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(species_st, beam_st, env_st, sigma_st, sigma_st, st.floats(1.0, 100.0))
def test_delta_T_magnitude_nondecreasing_in_power(species, beam, env, s_abs, s_se, factor):
    more = BeamParams(beam.power * factor, beam.wavelength, beam.spot_radius)
    a = equilibrium_delta_T(species, beam, env, s_abs, s_se)
    b = equilibrium_delta_T(species, more, env, s_abs, s_se)
    assert abs(b) >= abs(a) * (1 - 1e-12)


@settings(max_examples=200, deadline=None)
@given(beam_st.filter(lambda b: b.wavelength > 722e-9), sigma_st, sigma_st, st.floats(0.51, 0.999))
def test_lower_efficiency_is_worse(beam, s_abs, s_se, eta):
    lower = DefectSpecies("x", NV.gamma_rad, 721e-9, 2.65e24, quantum_efficiency=eta)
    best = equilibrium_delta_T(NV, beam, VACUUM, s_abs, s_se)
    worse = equilibrium_delta_T(lower, beam, VACUUM, s_abs, s_se)
    assert worse > best


# -- sweeps -------------------------------------------------------------------

def _flat_spectra():
    grid = np.linspace(650e-9, 900e-9, 251)
    return Spectrum(grid, np.full(grid.size, S_ABS)), Spectrum(grid, np.full(grid.size, S_SE))


def test_sweep_sign_change_at_lambda_F():
    s_abs, s_se = _flat_spectra()
    grid = np.arange(700.0, 740.0 + 0.05, 0.1) * NM
    rows = sweep_delta_T(NV, VACUUM, 0.1, 5e-6, s_abs, s_se, grid)
    dt = np.array([r.delta_T for r in rows])
    assert dt[0] > 0 and dt[-1] < 0
    assert len(rows) == grid.size


def test_sweep_monotone_in_power():
    s_abs, s_se = _flat_spectra()
    grid = np.linspace(722e-9, 850e-9, 50)
    low = sweep_delta_T(NV, VACUUM, 0.01, 5e-6, s_abs, s_se, grid)
    high = sweep_delta_T(NV, VACUUM, 0.1, 5e-6, s_abs, s_se, grid)
    assert all(abs(h.delta_T) >= abs(l.delta_T) for l, h in zip(low, high))


def test_sweep_marks_failures():
    grid = np.linspace(650e-9, 900e-9, 251)
    vals = np.full(grid.size, S_ABS)
    vals[100] = 0.0
    s_abs = Spectrum(grid, vals)
    _, s_se = _flat_spectra()
    rows = sweep_delta_T(NV, VACUUM, 0.1, 5e-6, s_abs, s_se, grid)
    assert not rows[100].ok and "no absorption" in rows[100].error
    assert all(r.ok for i, r in enumerate(rows) if i != 100)
    low = DefectSpecies("x", NV.gamma_rad, 721e-9, 2.65e24, quantum_efficiency=0.5)
    assert not any(r.ok for r in sweep_delta_T(low, VACUUM, 0.1, 5e-6, s_abs, s_se, grid))


def test_sweep_argument_errors():
    s_abs, s_se = _flat_spectra()
    with pytest.raises(ValueError, match="empty"):
        sweep_delta_T(NV, VACUUM, 0.1, 5e-6, s_abs, s_se, [])
    with pytest.raises(ValueError):
        sweep_delta_T(NV, VACUUM, 0.1, 5e-6, s_abs, s_se, [950e-9])


def test_sweep_parallel_is_order_stable():
    s_abs, s_se = _flat_spectra()
    grid = np.linspace(700e-9, 850e-9, 301)
    serial = sweep_delta_T(NV, VACUUM, 0.1, 5e-6, s_abs, s_se, grid)
    parallel = sweep_delta_T(NV, VACUUM, 0.1, 5e-6, s_abs, s_se, grid, workers=4)
    assert serial == parallel


def test_water_sweep_carries_chi():
    from cryodiamond.brownian import D2O

    env = ParticleEnvironment(
        diameter=20e-6, load_kind=LoadKind.LIQUID_CONVECTIVE, h_conv=30.0, solvent=D2O
    )
    s_abs, s_se = _flat_spectra()
    rows = sweep_delta_T(NV, env, 1.0, 5e-6, s_abs, s_se, [760e-9])
    assert rows[0].delta_T < 0 and 0 < rows[0].chi < 1
