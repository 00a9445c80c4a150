"""Hot/cold Brownian motion of a particle held at a different temperature than its solvent.

The observable is the diffusion-constant ratio ``chi = D_CBM / D_amb``. The
Stokes prefactor ``6 pi R`` cancels in the ratio, so nothing here takes a
particle radius except :func:`diffusion_constant`, kept for cross-checks.
"""

import math
from dataclasses import dataclass

from .constants import BOLTZMANN

# Coefficients of the quadratic expansion of eta_0 / eta_CBM in dT / (T_amb - T_VF).
LINEAR_COEFF = 193 / 486
QUADRATIC_LOG_COEFF = 56 / 243
QUADRATIC_LOG2_COEFF = 12563 / 118098

EXPANSION_WARN_THRESHOLD = 0.3


class BrownianDomainError(ValueError):
    pass


@dataclass(frozen=True)
class SolventModel:
    """Vogel-Fulcher viscosity law ``eta(T) = eta_infinity * exp(A_vogel / (T - T_VF))``."""

    name: str
    eta_infinity: float  # Pa s
    A_vogel: float  # K
    T_VF: float  # K

    def __post_init__(self):
        if not self.eta_infinity > 0:
            raise ValueError(f"eta_infinity must be positive, got {self.eta_infinity}")
        if not self.A_vogel > 0:
            raise ValueError(f"A_vogel must be positive, got {self.A_vogel}")
        if not self.T_VF > 0:
            raise ValueError(f"T_VF must be positive, got {self.T_VF}")


@dataclass(frozen=True)
class BrownianState:
    ambient_T: float  # K
    delta_T: float  # K
    particle_radius: float  # m

    def __post_init__(self):
        if not self.ambient_T > 0 or not self.ambient_T + self.delta_T > 0:
            raise ValueError("ambient and particle temperatures must be positive")
        if not self.particle_radius > 0:
            raise ValueError("particle_radius must be positive")

    def diffusion_constants(self, solvent):
        """(D_CBM, D_amb) in m^2/s from the component laws."""
        d_cbm = diffusion_constant(
            cbm_temperature(self.ambient_T, self.delta_T),
            cbm_viscosity(self.ambient_T, self.delta_T, solvent),
            self.particle_radius,
        )
        d_amb = diffusion_constant(self.ambient_T, solvent_viscosity(self.ambient_T, solvent), self.particle_radius)
        return d_cbm, d_amb


D2O = SolventModel("D2O", eta_infinity=3.456e-5, A_vogel=478.7, T_VF=160.0)


def solvent_viscosity(T, solvent):
    if not T > solvent.T_VF:
        raise BrownianDomainError(
            f"T = {T} K is at or below the Vogel temperature {solvent.T_VF} K of {solvent.name}"
        )
    return solvent.eta_infinity * math.exp(solvent.A_vogel / (T - solvent.T_VF))


def cbm_temperature(ambient_T, delta_T):
    """Effective Brownian temperature, ``T_amb + 5 dT / 12``."""
    t = ambient_T + 5.0 * delta_T / 12.0
    if not t > 0:
        raise BrownianDomainError(f"effective temperature {t} K is not positive")
    return t


def reduced_offset(ambient_T, delta_T, solvent):
    """``dT / (T_amb - T_VF)``, the expansion variable of :func:`viscosity_ratio`."""
    return delta_T / (ambient_T - solvent.T_VF)


def viscosity_ratio(ambient_T, delta_T, solvent):
    """``eta_0 / eta_CBM`` to second order in the reduced temperature offset."""
    eta0 = solvent_viscosity(ambient_T, solvent)
    log_ratio = math.log(eta0 / solvent.eta_infinity)
    x = reduced_offset(ambient_T, delta_T, solvent)
    quad = QUADRATIC_LOG_COEFF * log_ratio - QUADRATIC_LOG2_COEFF * log_ratio**2
    ratio = 1.0 + LINEAR_COEFF * log_ratio * x - quad * x * x
    if not ratio > 0:
        raise BrownianDomainError(
            f"viscosity ratio eta_0/eta_CBM = {ratio:.6g} is not positive "
            f"(dT = {delta_T} K lies far outside the expansion)"
        )
    return ratio


def cbm_viscosity(ambient_T, delta_T, solvent):
    return solvent_viscosity(ambient_T, solvent) / viscosity_ratio(ambient_T, delta_T, solvent)


def diffusion_ratio(ambient_T, delta_T, solvent):
    """chi = D_CBM / D_amb = (T_CBM / T_amb) * (eta_0 / eta_CBM)."""
    ratio = viscosity_ratio(ambient_T, delta_T, solvent)
    return cbm_temperature(ambient_T, delta_T) / ambient_T * ratio


def diffusion_constant(temperature, viscosity, radius):
    """Stokes-Einstein ``k_B T / (6 pi R eta)``."""
    return BOLTZMANN * temperature / (6.0 * math.pi * radius * viscosity)


def expansion_suspect(ambient_T, delta_T, solvent):
    return abs(reduced_offset(ambient_T, delta_T, solvent)) > EXPANSION_WARN_THRESHOLD
