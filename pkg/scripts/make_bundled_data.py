#!/usr/bin/env python3
"""Regenerate the reconstructed spectra shipped in src/cryodiamond/data/.

The measured NV/SiV spectra are only available as plots, so the package ships
parametric stand-ins:

* nv_emission.csv - NV- emission cross section: a 637 nm zero-phonon line plus
  a Gaussian phonon-sideband mixture, converted to m^2 with the
  Fuchtbauer-Ladenburg relation (12 ns, n = 2.4); the sideband is shifted
  until the mean emission wavelength is 721 nm.
* siv_pl.csv - SiV- photoluminescence: a Lorentzian 738 nm zero-phonon line
  plus a weak sideband whose weight is tuned to a 741 nm mean wavelength.
* nv_absorption_literature.csv - NV- absorption band below 670 nm, a Gaussian
  in photon energy pinned to 0.95e-20 m^2 at 532 nm.
* nv_absorption_relative.csv - relative ZPL signal versus excitation
  wavelength (532 nm reference at 50 uW, 670-1000 nm at 200 uW) with 3 %
  fixed-seed scatter; calibrated and log-quartic fitted at load time.

Requires scipy (for root finding) in addition to the package itself.
"""

from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from cryodiamond.constants import ELEMENTARY_CHARGE, HC, NM
from cryodiamond.datafiles import format_spectrum
from cryodiamond.spectra import Spectrum, SpectrumKind, fl_emission_cross_section, mean_fluorescence_wavelength

OUT = Path(__file__).resolve().parents[1] / "src" / "cryodiamond" / "data"

NV_TARGET = 721e-9
SIV_TARGET = 741e-9


def gauss(x, mu, sd):
    return np.exp(-0.5 * ((x - mu) / sd) ** 2)


def lorentz(x, mu, hwhm):
    return hwhm**2 / ((x - mu) ** 2 + hwhm**2)


def nv_intensity(wl_nm, shift):
    zpl = 0.04 * gauss(wl_nm, 637.0, 1.5)
    psb = (
        0.20 * gauss(wl_nm, 655.0 + shift, 8.0)
        + 0.55 * gauss(wl_nm, 685.0 + shift, 16.0)
        + 0.75 * gauss(wl_nm, 715.0 + shift, 24.0)
        + 0.30 * gauss(wl_nm, 760.0 + shift, 34.0)
    )
    return zpl + psb


def nv_emission():
    wl_nm = np.round(np.linspace(600.0, 1000.0, 801), 6)

    def sigma(shift):
        pl = Spectrum(wl_nm * NM, nv_intensity(wl_nm, shift), SpectrumKind.INTENSITY)
        return fl_emission_cross_section(pl, tau_rad=12e-9, n_refractive=2.4)

    shift = brentq(lambda s: mean_fluorescence_wavelength(sigma(s)) - NV_TARGET, -40.0, 40.0, xtol=1e-10)
    return sigma(shift), shift


def siv_pl():
    wl_nm = np.round(np.linspace(700.0, 1000.0, 3001), 6)

    def spectrum(weight):
        vals = lorentz(wl_nm, 738.0, 2.5) + weight * (gauss(wl_nm, 757.0, 6.0) + 0.6 * gauss(wl_nm, 766.0, 9.0))
        return Spectrum(wl_nm * NM, vals, SpectrumKind.INTENSITY)

    weight = brentq(lambda w: mean_fluorescence_wavelength(spectrum(w)) - SIV_TARGET, 0.0, 1.0, xtol=1e-12)
    return spectrum(weight), weight


SIGMA_532 = 0.95e-20
SIGMA_670 = 1.2e-22
BAND_CENTER_EV = 2.21


def nv_absorption_literature():
    wl_nm = np.arange(500.0, 670.0 + 1e-9, 2.0)
    e_532 = HC / (532 * NM) / ELEMENTARY_CHARGE
    e_670 = HC / (670 * NM) / ELEMENTARY_CHARGE
    two_s2 = ((e_670 - BAND_CENTER_EV) ** 2 - (e_532 - BAND_CENTER_EV) ** 2) / np.log(SIGMA_532 / SIGMA_670)
    energy = HC / (wl_nm * NM) / ELEMENTARY_CHARGE
    vals = SIGMA_532 * np.exp(-((energy - BAND_CENTER_EV) ** 2 - (e_532 - BAND_CENTER_EV) ** 2) / two_s2)
    vals[wl_nm == 532.0] = SIGMA_532
    return Spectrum(wl_nm * NM, vals, SpectrumKind.CROSS_SECTION)


def nv_tail(wl_nm):
    """Smooth log-decay of the NV- absorption tail above 670 nm."""
    u = (wl_nm - 670.0) / 100.0
    return SIGMA_670 * np.exp(-6.587 * u + 0.906 * u**2)


def nv_absorption_relative():
    rng = np.random.default_rng(20160)
    tail_nm = np.arange(670.0, 1000.0 + 1e-9, 10.0)
    scatter = np.clip(rng.normal(1.0, 0.03, tail_nm.size), 0.9, 1.1)
    counts_per_m2_w = 1.0e5 / (SIGMA_532 * 50e-6)
    signal_tail = counts_per_m2_w * nv_tail(tail_nm) * 200e-6 * scatter
    wl_nm = np.concatenate([[532.0], tail_nm])
    vals = np.concatenate([[1.0e5], signal_tail])
    return Spectrum(wl_nm * NM, vals, SpectrumKind.INTENSITY)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    sig, shift = nv_emission()
    (OUT / "nv_emission.csv").write_text(
        format_spectrum(sig, [f"reconstruction: ZPL 637 nm + Gaussian sideband (shift {shift:+.4f} nm), FL with 12 ns, n=2.4"])
    )
    pl, weight = siv_pl()
    (OUT / "siv_pl.csv").write_text(
        format_spectrum(pl, [f"reconstruction: Lorentzian ZPL 738 nm (HWHM 2.5 nm) + sideband weight {weight:.6f}"])
    )
    (OUT / "nv_absorption_literature.csv").write_text(
        format_spectrum(nv_absorption_literature(), ["reconstruction: Gaussian-in-energy band, 0.95e-20 m^2 at 532 nm"])
    )
    (OUT / "nv_absorption_relative.csv").write_text(
        format_spectrum(
            nv_absorption_relative(),
            ["relative ZPL signal vs excitation wavelength; 532 nm at 50 uW, others at 200 uW (reconstruction)"],
        )
    )
    print(f"nv sideband shift {shift:+.4f} nm, siv sideband weight {weight:.6f}")


if __name__ == "__main__":
    main()
