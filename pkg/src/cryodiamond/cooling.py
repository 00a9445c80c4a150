"""Two-level optical refrigeration of a doped particle.

A beam of area ``alpha_eff = pi r_s^2`` crosses a length ``L`` of the
particle (``L = D`` unless overridden). The cooling power balances against a
linearised thermal load ``pi D^2 (4 eps sigma_B T^3 [+ h_cv]) |dT|``, giving
the equilibrium temperature change. Non-radiative heating enters only
through the effective mean emission wavelength ``lambda_F*``, which replaces
``lambda_F`` everywhere.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import brownian
from .constants import HC, STEFAN_BOLTZMANN
from .spectra import SpectrumRangeError, interpolate

LINEARIZATION_WARN_THRESHOLD = 0.2


class CoolingDomainError(ValueError):
    """Inputs outside the domain where the cooling model is defined."""


class LoadKind(str, Enum):
    VACUUM_RADIATIVE = "vacuum-radiative"
    LIQUID_CONVECTIVE = "liquid-convective"


class WarnFlag(str, Enum):
    NONE = "none"
    LINEARIZATION = "linearization"
    EXPANSION = "expansion"


@dataclass(frozen=True)
class DefectSpecies:
    name: str
    gamma_rad: float  # s^-1
    lambda_F: float  # m
    number_density: float  # m^-3
    quantum_efficiency: float = 1.0
    levels: object = None  # DoubletStructure, optional

    def __post_init__(self):
        if not (self.gamma_rad > 0 and self.lambda_F > 0 and self.number_density > 0):
            raise ValueError("gamma_rad, lambda_F and number_density must be positive")
        if not 0 < self.quantum_efficiency <= 1:
            raise ValueError(f"quantum_efficiency must lie in (0, 1], got {self.quantum_efficiency}")

    @property
    def lambda_F_star(self):
        return effective_mean_wavelength(self.lambda_F, self.quantum_efficiency)


@dataclass(frozen=True)
class BeamParams:
    power: float  # W
    wavelength: float  # m
    spot_radius: float  # m

    def __post_init__(self):
        if not (self.power > 0 and self.wavelength > 0 and self.spot_radius > 0):
            raise ValueError("beam power, wavelength and spot radius must be positive")

    @property
    def effective_area(self):
        return math.pi * self.spot_radius**2


@dataclass(frozen=True)
class ParticleEnvironment:
    diameter: float  # m
    ambient_T: float = 295.0  # K
    emissivity: float = 1.0
    load_kind: LoadKind = LoadKind.VACUUM_RADIATIVE
    h_conv: float = None  # W m^-2 K^-1, convective load only
    solvent: object = None  # brownian.SolventModel
    interaction_length: float = None  # m, defaults to diameter

    def __post_init__(self):
        object.__setattr__(self, "load_kind", LoadKind(self.load_kind))
        if not self.diameter > 0:
            raise ValueError("diameter must be positive")
        if not self.ambient_T > 0:
            raise ValueError("ambient_T must be positive")
        if not 0 < self.emissivity <= 1:
            raise ValueError("emissivity must lie in (0, 1]")
        if self.load_kind is LoadKind.LIQUID_CONVECTIVE and not (self.h_conv is not None and self.h_conv > 0):
            raise ValueError("a liquid-convective environment needs h_conv > 0")
        if self.interaction_length is not None and not self.interaction_length > 0:
            raise ValueError("interaction_length must be positive")

    @property
    def length(self):
        return self.diameter if self.interaction_length is None else self.interaction_length

    @property
    def surface_area(self):
        return math.pi * self.diameter**2

    @property
    def load_flux_coefficient(self):
        """Thermal load per unit area per kelvin, W m^-2 K^-1."""
        radiative = 4.0 * self.emissivity * STEFAN_BOLTZMANN * self.ambient_T**3
        if self.load_kind is LoadKind.LIQUID_CONVECTIVE:
            return radiative + self.h_conv
        return radiative

    @property
    def load_coefficient(self):
        """Total load conductance ``A (4 eps sigma_B T^3 [+ h_cv])``, W/K."""
        return self.surface_area * self.load_flux_coefficient


@dataclass(frozen=True)
class CoolingResult:
    wavelength: float
    sigma_abs: float
    sigma_se: float
    saturation_intensity: float
    cooling_power: float
    delta_T: float
    lambda_F_star: float
    chi: float = None
    warning: WarnFlag = WarnFlag.NONE
    error: str = None

    @property
    def ok(self):
        return self.error is None


def saturation_intensity(wavelength, sigma_abs, gamma_rad):
    """``I_S = h c gamma_rad / (lambda sigma_abs)`` in W/m^2."""
    if sigma_abs == 0:
        raise CoolingDomainError(
            f"no absorption at {wavelength * 1e9:.6g} nm (sigma_abs = 0); saturation intensity undefined"
        )
    if not (wavelength > 0 and sigma_abs > 0 and gamma_rad > 0):
        raise CoolingDomainError("wavelength, sigma_abs and gamma_rad must be positive")
    return HC * gamma_rad / (wavelength * sigma_abs)


def effective_mean_wavelength(lambda_F, quantum_efficiency):
    """``lambda_F * eta / (2 eta - 1)``: every non-radiative decay deposits ``h c / lambda_F``.

    Defined for ``0.5 < eta <= 1`` only; at and below one half the
    heating outweighs any anti-Stokes gain at every wavelength.
    """
    eta = quantum_efficiency
    if not 0.5 < eta <= 1:
        raise CoolingDomainError(
            f"quantum efficiency {eta} outside (0.5, 1]: with all non-radiative decay heating "
            "the crystal, lambda_F* diverges and no wavelength can cool"
        )
    if eta == 1:
        return lambda_F
    return lambda_F * eta / (2.0 * eta - 1.0)


def effective_mean_wavelength_from_kappa(lambda_F, kappa, gamma_rad):
    """``[1/lambda_F - kappa/(h c gamma_rad)]^-1`` for a heating power ``kappa`` per defect."""
    if kappa < 0:
        raise CoolingDomainError(f"kappa must be non-negative, got {kappa}")
    inv = 1.0 / lambda_F - kappa / (HC * gamma_rad)
    if not inv > 0:
        raise CoolingDomainError(
            f"kappa = {kappa:.6g} W reaches h c gamma_rad / lambda_F; lambda_F* is unbounded"
        )
    return 1.0 / inv


def _saturation_denominator(beam, sigma_abs, sigma_se, i_s):
    return 1.0 + sigma_se / sigma_abs + beam.effective_area * i_s / beam.power


def cooling_power(species, beam, env, sigma_abs, sigma_se):
    """Net heat extracted from the particle, W. Positive means cooling."""
    lam_star = species.lambda_F_star
    i_s = saturation_intensity(beam.wavelength, sigma_abs, species.gamma_rad)
    num = species.number_density * env.length * beam.effective_area * i_s * sigma_abs
    return num * (beam.wavelength / lam_star - 1.0) / _saturation_denominator(beam, sigma_abs, sigma_se, i_s)


def equilibrium_delta_T(species, beam, env, sigma_abs, sigma_se):
    """Equilibrium ``T_particle - T_ambient`` in K under the environment's thermal load.

    Evaluated in closed form,
    ``N alpha I_S / (pi D (4 eps sigma_B T^3 [+ h_cv])) * sigma_abs (1 - lambda/lambda_F*) / (1 + ...)``,
    scaled by ``L / D`` when the interaction length is overridden.
    """
    lam_star = species.lambda_F_star
    i_s = saturation_intensity(beam.wavelength, sigma_abs, species.gamma_rad)
    prefactor = species.number_density * beam.effective_area * i_s / (
        math.pi * env.diameter * env.load_flux_coefficient
    )
    if env.interaction_length is not None:
        prefactor *= env.interaction_length / env.diameter
    shape = sigma_abs * (1.0 - beam.wavelength / lam_star) / _saturation_denominator(beam, sigma_abs, sigma_se, i_s)
    return prefactor * shape


def _flag(env, delta_T):
    if abs(delta_T) / env.ambient_T > LINEARIZATION_WARN_THRESHOLD:
        return WarnFlag.LINEARIZATION
    if env.solvent is not None and brownian.expansion_suspect(env.ambient_T, delta_T, env.solvent):
        return WarnFlag.EXPANSION
    return WarnFlag.NONE


def evaluate(species, beam, env, sigma_abs, sigma_se):
    """All cooling observables at one operating point, as a :class:`CoolingResult`."""
    lam_star = species.lambda_F_star
    i_s = saturation_intensity(beam.wavelength, sigma_abs, species.gamma_rad)
    p_cool = cooling_power(species, beam, env, sigma_abs, sigma_se)
    d_t = equilibrium_delta_T(species, beam, env, sigma_abs, sigma_se)
    warning = _flag(env, d_t)
    chi = None
    if env.load_kind is LoadKind.LIQUID_CONVECTIVE and env.solvent is not None:
        try:
            chi = brownian.diffusion_ratio(env.ambient_T, d_t, env.solvent)
        except brownian.BrownianDomainError:
            chi = math.nan
            if warning is WarnFlag.NONE:
                warning = WarnFlag.EXPANSION
    return CoolingResult(
        wavelength=beam.wavelength,
        sigma_abs=sigma_abs,
        sigma_se=sigma_se,
        saturation_intensity=i_s,
        cooling_power=p_cool,
        delta_T=d_t,
        lambda_F_star=lam_star,
        chi=chi,
        warning=warning,
    )


def failed_result(wavelength, message, sigma_abs=math.nan, sigma_se=math.nan):
    nan = math.nan
    return CoolingResult(wavelength, sigma_abs, sigma_se, nan, nan, nan, nan, error=message)


def evaluate_at(species, beam, env, sigma_abs_spectrum, sigma_se_spectrum):
    """Like :func:`evaluate`, reading the cross sections off spectra; failures become rows."""
    try:
        s_abs = interpolate(sigma_abs_spectrum, beam.wavelength)
        s_se = interpolate(sigma_se_spectrum, beam.wavelength)
    except SpectrumRangeError as exc:
        return failed_result(beam.wavelength, str(exc))
    try:
        return evaluate(species, beam, env, s_abs, s_se)
    except CoolingDomainError as exc:
        return failed_result(beam.wavelength, str(exc), s_abs, s_se)


def sweep_delta_T(species, env, power, spot_radius, sigma_abs, sigma_se, lambda_grid, workers=None):
    """One :class:`CoolingResult` per wavelength in ``lambda_grid``.

    Points where the model is undefined (``lambda_F*`` domain, zero
    absorption) come back with ``error`` set instead of aborting the sweep.
    Output order follows ``lambda_grid`` whatever ``workers`` is.
    """
    grid = np.asarray(lambda_grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("empty wavelength grid")
    for spectrum in (sigma_abs, sigma_se):
        interpolate(spectrum, [grid.min(), grid.max()])  # raises with the valid interval

    def point(lam):
        return evaluate_at(species, BeamParams(power, float(lam), spot_radius), env, sigma_abs, sigma_se)

    if workers is None or workers <= 1:
        return [point(lam) for lam in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(point, grid))


def with_quantum_efficiency(species, eta):
    return replace(species, quantum_efficiency=eta)
