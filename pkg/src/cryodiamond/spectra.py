"""Wavelength-indexed spectra and the cross-section transforms built on them.

All wavelengths are in metres internally; spectrum files store nanometres.
Integrals use the trapezoid rule on the native grid, which is exact for the
piecewise-linear interpolant used by :func:`interpolate`.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import BOLTZMANN, ELEMENTARY_CHARGE, HC, NM, SPEED_OF_LIGHT


class SpectrumError(ValueError):
    pass


class SpectrumRangeError(SpectrumError):
    """Query wavelength outside the sampled interval."""

    def __init__(self, wavelength, lo, hi):
        self.wavelength = wavelength
        self.interval = (lo, hi)
        super().__init__(
            f"wavelength {wavelength / NM:.6g} nm outside valid interval "
            f"[{lo / NM:.6g}, {hi / NM:.6g}] nm"
        )


class DegenerateSpectrumError(SpectrumError):
    pass


class CalibrationError(SpectrumError):
    pass


class SpectrumKind(str, Enum):
    CROSS_SECTION = "cross_section_m2"
    INTENSITY = "intensity_arb"


# Relative slack on range checks so endpoints computed as nm * 1e-9 still hit.
_RANGE_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Samples of a cross section (m^2) or an intensity (arbitrary units).

    Arrays are copied and made read-only on construction.
    """

    wavelengths: np.ndarray
    values: np.ndarray
    kind: SpectrumKind = SpectrumKind.CROSS_SECTION

    def __post_init__(self):
        wl = np.array(self.wavelengths, dtype=float)
        val = np.array(self.values, dtype=float)
        if wl.ndim != 1 or val.ndim != 1:
            raise SpectrumError("wavelengths and values must be 1-D")
        if wl.size != val.size:
            raise SpectrumError(
                f"length mismatch: {wl.size} wavelengths, {val.size} values"
            )
        if wl.size < 2:
            raise SpectrumError("a spectrum needs at least two samples")
        if not np.all(np.isfinite(wl)) or np.any(wl <= 0):
            raise SpectrumError("wavelengths must be finite and positive")
        if np.any(np.diff(wl) <= 0):
            raise SpectrumError("wavelengths must be strictly increasing")
        if not np.all(np.isfinite(val)) or np.any(val < 0):
            raise SpectrumError("values must be finite and non-negative")
        wl.flags.writeable = False
        val.flags.writeable = False
        object.__setattr__(self, "wavelengths", wl)
        object.__setattr__(self, "values", val)
        object.__setattr__(self, "kind", SpectrumKind(self.kind))

    @property
    def bounds(self):
        return float(self.wavelengths[0]), float(self.wavelengths[-1])

    def with_values(self, values, kind=None):
        return Spectrum(self.wavelengths, values, self.kind if kind is None else kind)

    def __len__(self):
        return self.wavelengths.size

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (
            self.kind == other.kind
            and np.array_equal(self.wavelengths, other.wavelengths)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def _check_range(wavelength, lo, hi):
    lam = np.asarray(wavelength, dtype=float)
    slack = _RANGE_SLACK * (hi - lo)
    bad = ~((lam >= lo - slack) & (lam <= hi + slack))
    if np.any(bad):
        raise SpectrumRangeError(float(lam[bad].flat[0]), lo, hi)
    return np.clip(lam, lo, hi)


def interpolate(s, wavelength):
    """Piecewise-linear value of ``s`` at ``wavelength`` (scalar or array).

    Raises :class:`SpectrumRangeError` outside the sampled interval; there is
    no extrapolation.
    """
    lam = _check_range(wavelength, *s.bounds)
    out = np.interp(lam, s.wavelengths, s.values)
    return float(out) if out.ndim == 0 else out


def integrate(s, weight=None):
    """Trapezoid integral of the values (optionally times ``weight``) over wavelength."""
    y = s.values if weight is None else s.values * weight
    return float(np.trapezoid(y, s.wavelengths))


def mean_fluorescence_wavelength(spectrum):
    """Spectrum-weighted mean wavelength, int(l*s dl) / int(s dl)."""
    total = integrate(spectrum)
    if not total > 0:
        raise DegenerateSpectrumError("spectrum has no positive weight")
    return integrate(spectrum, spectrum.wavelengths) / total


def fl_emission_cross_section(pl_intensity, tau_rad, n_refractive):
    """Emission cross section from a photoluminescence spectrum (Fuchtbauer-Ladenburg).

    Parameters
    ----------
    pl_intensity : Spectrum
        Intensity spectrum, arbitrary units.
    tau_rad : float
        Radiative lifetime [s].
    n_refractive : float
        Refractive index of the host.

    Returns
    -------
    Spectrum
        Cross section [m^2] on the input grid. The overall scale of the
        intensity cancels.
    """
    if pl_intensity.kind is not SpectrumKind.INTENSITY:
        raise SpectrumError("Fuchtbauer-Ladenburg input must be an intensity spectrum")
    if not tau_rad > 0:
        raise ValueError(f"tau_rad must be positive, got {tau_rad}")
    if not n_refractive >= 1:
        raise ValueError(f"refractive index must be >= 1, got {n_refractive}")
    lam_f = mean_fluorescence_wavelength(pl_intensity)
    total = integrate(pl_intensity)
    wl = pl_intensity.wavelengths
    sigma = wl**5 * pl_intensity.values / (
        8 * np.pi * n_refractive**2 * SPEED_OF_LIGHT * tau_rad * lam_f * total
    )
    return Spectrum(wl, sigma, SpectrumKind.CROSS_SECTION)


@dataclass(frozen=True)
class DoubletStructure:
    """Ground/excited manifold splittings of a defect.

    Each manifold is treated as ``d`` equally spaced levels of unit
    degeneracy with spacing ``deltaE``.
    """

    deltaE_lower: float  # eV
    deltaE_upper: float  # eV
    d_lower: int = 2
    d_upper: int = 2
    lambda_ZL: float = 738e-9  # m

    def __post_init__(self):
        if not (self.deltaE_lower > 0 and self.deltaE_upper > 0):
            raise ValueError("level splittings must be positive")
        if self.d_lower < 1 or self.d_upper < 1:
            raise ValueError("degeneracies must be >= 1")
        if not self.lambda_ZL > 0:
            raise ValueError("lambda_ZL must be positive")

    @property
    def zpl_energy(self):
        """Zero-phonon-line photon energy [J]."""
        return HC / self.lambda_ZL


SIV_LEVELS = DoubletStructure(deltaE_lower=0.2e-3, deltaE_upper=1.05e-3, d_lower=2, d_upper=2, lambda_ZL=738e-9)


def _reduced(deltaE_eV, T):
    return deltaE_eV * ELEMENTARY_CHARGE / (BOLTZMANN * T)


def partition_ratio(T, levels):
    """Lower-to-upper partition function ratio, closed (geometric-series) form."""
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    a_l = _reduced(levels.deltaE_lower, T)
    a_u = _reduced(levels.deltaE_upper, T)
    # 1 - exp(-x) == -expm1(-x); keeps precision in the high-T limit
    num = np.expm1(-a_u) * np.expm1(-levels.d_lower * a_l)
    den = np.expm1(-a_l) * np.expm1(-levels.d_upper * a_u)
    return float(num / den)


def ladder_partition_function(T, deltaE_eV, d):
    """Direct Boltzmann sum over ``d`` levels spaced by ``deltaE_eV``, ground at zero."""
    a = _reduced(deltaE_eV, T)
    return float(sum(np.exp(-k * a) for k in range(d)))


def partition_ratio_direct(T, levels):
    return ladder_partition_function(T, levels.deltaE_lower, levels.d_lower) / ladder_partition_function(
        T, levels.deltaE_upper, levels.d_upper
    )


def mccumber_ratio(wavelength, T, levels):
    """sigma_se / sigma_abs at ``wavelength`` (scalar or array) and temperature ``T``."""
    lam = np.asarray(wavelength, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("wavelength must be positive")
    z = partition_ratio(T, levels)
    out = z * np.exp((levels.zpl_energy - HC / lam) / (BOLTZMANN * T))
    return float(out) if out.ndim == 0 else out


def absorption_from_emission(sigma_se, T, levels):
    if sigma_se.kind is not SpectrumKind.CROSS_SECTION:
        raise SpectrumError("McCumber input must be a cross-section spectrum")
    ratio = mccumber_ratio(sigma_se.wavelengths, T, levels)
    return sigma_se.with_values(sigma_se.values / ratio)


@dataclass(frozen=True)
class CalibrationAnchor:
    """Reference point mapping a relative excitation signal to an absolute cross section."""

    ref_wavelength: float  # m
    ref_cross_section: float  # m^2
    ref_power: float  # W, excitation power of the reference measurement
    measurement_power: float  # W, excitation power of every other point

    def __post_init__(self):
        for name in ("ref_wavelength", "ref_cross_section", "ref_power", "measurement_power"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


NV_532_ANCHOR = CalibrationAnchor(
    ref_wavelength=532e-9, ref_cross_section=0.95e-20, ref_power=200e-6, measurement_power=200e-6
)


def calibrate_absorption(relative_signal, anchor):
    """Scale relative excitation signals to absolute absorption cross sections.

    Each sample is first divided by its excitation power (``ref_power`` for a
    sample sitting at the anchor wavelength, ``measurement_power`` otherwise),
    then the whole curve is scaled so the anchor wavelength maps onto
    ``anchor.ref_cross_section``.
    """
    wl = relative_signal.wavelengths
    lo, hi = relative_signal.bounds
    if not lo <= anchor.ref_wavelength <= hi:
        raise SpectrumRangeError(anchor.ref_wavelength, lo, hi)
    at_anchor = np.isclose(wl, anchor.ref_wavelength, rtol=1e-9, atol=0.0)
    power = np.where(at_anchor, anchor.ref_power, anchor.measurement_power)
    per_watt = relative_signal.with_values(relative_signal.values / power)
    ref_signal = interpolate(per_watt, anchor.ref_wavelength)
    if not ref_signal > 0:
        raise CalibrationError(
            f"signal at anchor wavelength {anchor.ref_wavelength / NM:g} nm is zero"
        )
    scaled = per_watt.values * (anchor.ref_cross_section / ref_signal)
    if np.any(at_anchor):
        # pin exactly, independent of rounding in the scale factor
        scaled[at_anchor] = anchor.ref_cross_section
    return Spectrum(wl, scaled, SpectrumKind.CROSS_SECTION)


NV_SPLICE_WAVELENGTH = 670e-9
_FIT_SCALE = 100e-9


@dataclass(frozen=True, eq=False)
class NVAbsorptionModel:
    """NV- absorption cross section spliced from two sources.

    Below ``splice`` the literature table is interpolated; from ``splice``
    upward the cross section is ``exp(p(u))`` with ``p`` a quartic in
    ``u = (lambda - splice) / 100 nm`` fitted to calibrated excitation
    measurements. The fit coefficients are a reconstruction, not published
    values.
    """

    table: Spectrum
    coefficients: tuple  # highest power first, as np.polyval expects
    splice: float = NV_SPLICE_WAVELENGTH
    valid_range: tuple = (500e-9, 850e-9)

    @classmethod
    def fit(cls, table, anchors, splice=NV_SPLICE_WAVELENGTH, valid_range=(500e-9, 850e-9), degree=4):
        """Fit the log-polynomial branch to the anchor samples at or above ``splice``."""
        keep = anchors.wavelengths >= splice * (1 - 1e-12)
        if keep.sum() <= degree:
            raise SpectrumError(f"need more than {degree} anchor points above the splice")
        u = (anchors.wavelengths[keep] - splice) / _FIT_SCALE
        coeffs = np.polyfit(u, np.log(anchors.values[keep]), degree)
        return cls(table=table, coefficients=tuple(float(c) for c in coeffs), splice=splice, valid_range=tuple(valid_range))

    def fitted_branch(self, wavelength):
        u = (np.asarray(wavelength, dtype=float) - self.splice) / _FIT_SCALE
        return np.exp(np.polyval(self.coefficients, u))

    def continuity_jump(self):
        """Relative mismatch of the two branches at the splice wavelength."""
        left = interpolate(self.table, self.splice)
        right = float(self.fitted_branch(self.splice))
        return abs(right - left) / left

    def __call__(self, wavelength):
        lam = _check_range(wavelength, *self.valid_range)
        below = lam < self.splice
        out = np.empty_like(lam)
        if np.any(below):
            out[below] = interpolate(self.table, lam[below])
        out[~below] = self.fitted_branch(lam[~below])
        return float(out) if out.ndim == 0 else out

    def to_spectrum(self, wavelengths):
        return Spectrum(wavelengths, self(np.asarray(wavelengths, dtype=float)), SpectrumKind.CROSS_SECTION)
