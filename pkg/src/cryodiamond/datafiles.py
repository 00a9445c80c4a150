"""Spectrum and solvent file formats, bundled data, and the data search path.

Spectrum files::

    # kind=cross_section_m2
    600.0,1.2e-22
    600.5,1.3e-22

Further ``#`` lines and blank lines are ignored. Wavelengths are in nm.

A reference of the form ``bundled:<name>`` names a shipped dataset; any other
reference is a file path. Relative paths, and bundled file names, are first
looked up in the directories listed in ``CRYODIAMOND_PATH`` (``os.pathsep``
separated), so measured data can replace a bundled file without code changes.
"""

import functools
import os
from importlib import resources
from pathlib import Path

import numpy as np

from .constants import NM
from .spectra import (
    CalibrationAnchor,
    NVAbsorptionModel,
    Spectrum,
    SpectrumError,
    SpectrumKind,
    calibrate_absorption,
)

SEARCH_PATH_ENV = "CRYODIAMOND_PATH"

BUNDLED_FILES = {
    "nv-emission": "nv_emission.csv",
    "siv-pl": "siv_pl.csv",
    "nv-absorption-literature": "nv_absorption_literature.csv",
    "nv-absorption-relative": "nv_absorption_relative.csv",
}
# Materialised from NVAbsorptionModel rather than read from a single file.
DERIVED_BUNDLES = ("nv-absorption",)

# Excitation powers behind nv_absorption_relative.csv: the 532 nm reference
# was taken at reduced power, every other wavelength at 200 uW.
BUNDLED_NV_ANCHOR = CalibrationAnchor(
    ref_wavelength=532e-9, ref_cross_section=0.95e-20, ref_power=50e-6, measurement_power=200e-6
)
NV_ABSORPTION_GRID = np.round(np.linspace(500.0, 1000.0, 1001), 6) * NM


class SpectrumFormatError(SpectrumError):
    def __init__(self, source, line, message):
        self.source = source
        self.line = line
        super().__init__(f"{source}:{line}: {message}")


def search_dirs():
    raw = os.environ.get(SEARCH_PATH_ENV, "")
    return [Path(p) for p in raw.split(os.pathsep) if p]


def find_file(name):
    """Resolve a relative file name against the search path, then the CWD."""
    path = Path(name)
    if path.is_absolute():
        return path
    for d in search_dirs():
        if (d / path).is_file():
            return d / path
    return path


def _bundled_path(filename):
    for d in search_dirs():
        if (d / filename).is_file():
            return d / filename
    return resources.files("cryodiamond") / "data" / filename


def parse_spectrum(text, source="<string>"):
    kind = None
    wl, val = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if kind is None and not wl:
                if not body.startswith("kind="):
                    raise SpectrumFormatError(source, lineno, "expected header '# kind=<cross_section_m2|intensity_arb>'")
                try:
                    kind = SpectrumKind(body[len("kind="):].strip())
                except ValueError:
                    raise SpectrumFormatError(source, lineno, f"unknown spectrum kind {body[5:].strip()!r}") from None
            continue
        if kind is None:
            raise SpectrumFormatError(source, lineno, "data before the '# kind=...' header")
        parts = line.split(",")
        if len(parts) != 2:
            raise SpectrumFormatError(source, lineno, f"expected '<wavelength_nm>,<value>', got {line!r}")
        try:
            w, v = float(parts[0]), float(parts[1])
        except ValueError:
            raise SpectrumFormatError(source, lineno, f"non-numeric field in {line!r}") from None
        if not (np.isfinite(w) and w > 0):
            raise SpectrumFormatError(source, lineno, f"invalid wavelength {parts[0].strip()}")
        if not (np.isfinite(v) and v >= 0):
            raise SpectrumFormatError(source, lineno, f"invalid value {parts[1].strip()}")
        if wl and w <= wl[-1]:
            raise SpectrumFormatError(source, lineno, "wavelengths must be strictly increasing")
        wl.append(w)
        val.append(v)
    if kind is None:
        raise SpectrumFormatError(source, 1, "missing '# kind=...' header")
    if len(wl) < 2:
        raise SpectrumFormatError(source, max(1, len(text.splitlines())), "need at least two samples")
    return Spectrum(np.array(wl) * NM, np.array(val), kind)


def format_spectrum(spectrum, comments=()):
    lines = [f"# kind={spectrum.kind.value}"]
    lines += [f"# {c}" for c in comments]
    for w, v in zip(spectrum.wavelengths, spectrum.values):
        lines.append(f"{w / NM:.6f},{v:.10e}")
    return "\n".join(lines) + "\n"


def load_spectrum(path):
    path = find_file(path)
    return parse_spectrum(Path(path).read_text(), source=str(path))


def save_spectrum(spectrum, path, comments=()):
    Path(path).write_text(format_spectrum(spectrum, comments))


def _read_bundled(name):
    path = _bundled_path(BUNDLED_FILES[name])
    return parse_spectrum(path.read_text(), source=f"bundled:{name}")


@functools.lru_cache(maxsize=None)
def _cached_bundle(name, path_key):
    return _read_bundled(name)


def bundled_spectrum(name):
    if name == "nv-absorption":
        return bundled_nv_absorption_model(valid_range=(NV_ABSORPTION_GRID[0], NV_ABSORPTION_GRID[-1])).to_spectrum(
            NV_ABSORPTION_GRID
        )
    if name not in BUNDLED_FILES:
        valid = ", ".join(sorted(list(BUNDLED_FILES) + list(DERIVED_BUNDLES)))
        raise KeyError(f"unknown bundled spectrum {name!r}; valid names: {valid}")
    # cache keyed on the search path so overrides take effect
    return _cached_bundle(name, os.environ.get(SEARCH_PATH_ENV, ""))


def resolve_spectrum(ref):
    if ref.startswith("bundled:"):
        return bundled_spectrum(ref[len("bundled:"):])
    return load_spectrum(ref)


@functools.lru_cache(maxsize=None)
def _cached_model(valid_range, path_key):
    table = _read_bundled("nv-absorption-literature")
    anchors = calibrate_absorption(_read_bundled("nv-absorption-relative"), BUNDLED_NV_ANCHOR)
    return NVAbsorptionModel.fit(table, anchors, valid_range=valid_range)


def bundled_nv_absorption_model(valid_range=(500e-9, 850e-9)):
    """The NV- absorption model built from the bundled literature table and calibrated signals."""
    return _cached_model(tuple(float(x) for x in valid_range), os.environ.get(SEARCH_PATH_ENV, ""))


def nv_absorption_model(wavelength, valid_range=(500e-9, 850e-9)):
    """NV- absorption cross section [m^2] at ``wavelength`` [m]."""
    return bundled_nv_absorption_model(valid_range)(wavelength)


def parse_solvents(text, source="<string>"):
    """Parse ``name, eta_infinity_Pa_s, A_K, T_VF_K`` lines into SolventModels."""
    from .brownian import SolventModel

    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 4:
            raise SpectrumFormatError(source, lineno, "expected 'name, eta_infinity_Pa_s, A_K, T_VF_K'")
        try:
            solvent = SolventModel(parts[0], float(parts[1]), float(parts[2]), float(parts[3]))
        except ValueError as exc:
            raise SpectrumFormatError(source, lineno, str(exc)) from None
        out[solvent.name] = solvent
    return out


def load_solvents(path=None):
    if path is None:
        path = _bundled_path("solvents.csv")
        return parse_solvents(path.read_text(), source="bundled:solvents")
    path = find_file(path)
    return parse_solvents(Path(path).read_text(), source=str(path))
