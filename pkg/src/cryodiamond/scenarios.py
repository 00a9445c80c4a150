"""Named parameter bundles, their text format, and the sweep driver.

A scenario serialises to flat ``section.key = value`` lines. Every physical
quantity carries its unit in the key name, e.g. ``beam.power_W``. Optional
values are written as ``none``. Grids use ``start:stop:count`` with both
endpoints included; a bare number is a one-point grid.

Sweep axes are nested outermost-first as quantum efficiency, diameter,
power, wavelength. Axes absent from the scenario take the single default
value from the species, environment or beam.
"""

import functools
import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .brownian import D2O, SolventModel
from .constants import NM, as_dict
from .cooling import BeamParams, DefectSpecies, LoadKind, ParticleEnvironment, sweep_delta_T
from .datafiles import load_solvents, resolve_spectrum
from .spectra import SIV_LEVELS, DoubletStructure, SpectrumKind, absorption_from_emission, fl_emission_cross_section


class ScenarioError(ValueError):
    pass


# axis name -> (scenario key, multiplier from key units to SI)
AXES = {
    "quantum_efficiency": ("sweep.quantum_efficiency", 1.0),
    "diameter": ("sweep.diameter_m", 1.0),
    "power": ("sweep.power_W", 1.0),
    "wavelength": ("sweep.wavelength_nm", NM),
}
AXIS_ORDER = tuple(AXES)
KEY_TO_AXIS = {key: axis for axis, (key, _) in AXES.items()}

DIAMOND_REFRACTIVE_INDEX = 2.4


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ScenarioError(f"grid count must be >= 1, got {self.count}")
        if self.count == 1 and self.start != self.stop:
            raise ScenarioError("a one-point grid needs start == stop")
        if self.count > 1 and not self.stop > self.start:
            raise ScenarioError(f"grid must be strictly increasing, got {self.start}:{self.stop}")

    @classmethod
    def parse(cls, text):
        parts = str(text).strip().split(":")
        try:
            if len(parts) == 1:
                v = float(parts[0])
                return cls(v, v, 1)
            if len(parts) == 3:
                return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError:
            pass
        raise ScenarioError(f"bad grid {text!r}; expected start:stop:count or a single number")

    def values(self):
        return np.linspace(self.start, self.stop, self.count)

    def __str__(self):
        if self.count == 1:
            return _fmt(self.start)
        return f"{_fmt(self.start)}:{_fmt(self.stop)}:{self.count}"


@dataclass(frozen=True)
class SweepAxis:
    axis: str
    grid: Grid

    def __post_init__(self):
        if self.axis not in AXES:
            raise ScenarioError(f"unknown sweep axis {self.axis!r}; valid axes: {', '.join(AXES)}")

    def values_si(self):
        return self.grid.values() * AXES[self.axis][1]


@dataclass(frozen=True)
class Scenario:
    name: str
    species: DefectSpecies
    env: ParticleEnvironment
    beam_defaults: BeamParams
    sigma_abs_source: str
    sigma_se_source: str
    sweep_axes: tuple = field(default_factory=tuple)
    refractive_index: float = DIAMOND_REFRACTIVE_INDEX

    def __post_init__(self):
        axes = tuple(sorted(self.sweep_axes, key=lambda a: AXIS_ORDER.index(a.axis)))
        if len({a.axis for a in axes}) != len(axes):
            raise ScenarioError("each sweep axis may appear once")
        object.__setattr__(self, "sweep_axes", axes)

    @property
    def is_liquid(self):
        return self.env.load_kind is LoadKind.LIQUID_CONVECTIVE

    def axis(self, name):
        for a in self.sweep_axes:
            if a.axis == name:
                return a
        return None

    def to_dict(self):
        sp, env, beam = self.species, self.env, self.beam_defaults
        lv = sp.levels
        solvent = env.solvent
        d = {
            "scenario.name": self.name,
            "species.name": sp.name,
            "species.gamma_rad_per_s": _fmt(sp.gamma_rad),
            "species.lambda_F_m": _fmt(sp.lambda_F),
            "species.number_density_per_m3": _fmt(sp.number_density),
            "species.quantum_efficiency": _fmt(sp.quantum_efficiency),
            "species.deltaE_lower_eV": _fmt(lv.deltaE_lower if lv else None),
            "species.deltaE_upper_eV": _fmt(lv.deltaE_upper if lv else None),
            "species.d_lower": _fmt(lv.d_lower if lv else None),
            "species.d_upper": _fmt(lv.d_upper if lv else None),
            "species.lambda_ZL_m": _fmt(lv.lambda_ZL if lv else None),
            "env.diameter_m": _fmt(env.diameter),
            "env.interaction_length_m": _fmt(env.interaction_length),
            "env.emissivity": _fmt(env.emissivity),
            "env.ambient_T_K": _fmt(env.ambient_T),
            "env.load_kind": env.load_kind.value,
            "env.h_conv_W_per_m2K": _fmt(env.h_conv),
            "solvent.name": solvent.name if solvent else "none",
            "solvent.eta_infinity_Pa_s": _fmt(solvent.eta_infinity if solvent else None),
            "solvent.A_K": _fmt(solvent.A_vogel if solvent else None),
            "solvent.T_VF_K": _fmt(solvent.T_VF if solvent else None),
            "beam.power_W": _fmt(beam.power),
            "beam.wavelength_m": _fmt(beam.wavelength),
            "beam.spot_radius_m": _fmt(beam.spot_radius),
            "spectra.sigma_abs": self.sigma_abs_source,
            "spectra.sigma_se": self.sigma_se_source,
            "spectra.refractive_index": _fmt(self.refractive_index),
        }
        for axis in AXIS_ORDER:
            a = self.axis(axis)
            d[AXES[axis][0]] = str(a.grid) if a else "none"
        return d

    def to_text(self):
        return "".join(f"{k} = {v}\n" for k, v in self.to_dict().items())

    @classmethod
    def from_dict(cls, d):
        missing = [k for k in KEYS if k not in d]
        if missing:
            raise ScenarioError(f"missing scenario keys: {', '.join(missing)}")
        unknown = [k for k in d if k not in KEYS]
        if unknown:
            raise ScenarioError(f"unknown scenario key {unknown[0]!r}")
        try:
            return _build(d)
        except ScenarioError:
            raise
        except (ValueError, TypeError) as exc:
            raise ScenarioError(str(exc)) from None

    @classmethod
    def from_text(cls, text):
        return cls.from_dict(parse_key_values(text))


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _opt(d, key, conv=float):
    v = d[key].strip()
    return None if v.lower() == "none" else conv(v)


def _req(d, key, conv=float):
    v = _opt(d, key, conv)
    if v is None:
        raise ScenarioError(f"{key} may not be none")
    return v


def _build(d):
    levels = None
    if _opt(d, "species.deltaE_lower_eV") is not None:
        levels = DoubletStructure(
            deltaE_lower=_req(d, "species.deltaE_lower_eV"),
            deltaE_upper=_req(d, "species.deltaE_upper_eV"),
            d_lower=_req(d, "species.d_lower", int),
            d_upper=_req(d, "species.d_upper", int),
            lambda_ZL=_req(d, "species.lambda_ZL_m"),
        )
    species = DefectSpecies(
        name=d["species.name"].strip(),
        gamma_rad=_req(d, "species.gamma_rad_per_s"),
        lambda_F=_req(d, "species.lambda_F_m"),
        number_density=_req(d, "species.number_density_per_m3"),
        quantum_efficiency=_req(d, "species.quantum_efficiency"),
        levels=levels,
    )
    solvent = None
    solvent_name = d["solvent.name"].strip()
    if solvent_name.lower() != "none":
        params = [_opt(d, k) for k in ("solvent.eta_infinity_Pa_s", "solvent.A_K", "solvent.T_VF_K")]
        if any(p is None for p in params):
            solvent = builtin_solvent(solvent_name)
        else:
            solvent = SolventModel(solvent_name, *params)
    env = ParticleEnvironment(
        diameter=_req(d, "env.diameter_m"),
        ambient_T=_req(d, "env.ambient_T_K"),
        emissivity=_req(d, "env.emissivity"),
        load_kind=LoadKind(d["env.load_kind"].strip()),
        h_conv=_opt(d, "env.h_conv_W_per_m2K"),
        solvent=solvent,
        interaction_length=_opt(d, "env.interaction_length_m"),
    )
    beam = BeamParams(
        power=_req(d, "beam.power_W"),
        wavelength=_req(d, "beam.wavelength_m"),
        spot_radius=_req(d, "beam.spot_radius_m"),
    )
    axes = []
    for axis in AXIS_ORDER:
        raw = d[AXES[axis][0]].strip()
        if raw.lower() != "none":
            axes.append(SweepAxis(axis, Grid.parse(raw)))
    return Scenario(
        name=d["scenario.name"].strip(),
        species=species,
        env=env,
        beam_defaults=beam,
        sigma_abs_source=d["spectra.sigma_abs"].strip(),
        sigma_se_source=d["spectra.sigma_se"].strip(),
        sweep_axes=tuple(axes),
        refractive_index=_req(d, "spectra.refractive_index"),
    )


def parse_key_values(text):
    """``key = value`` lines; blank and ``#`` lines skipped.

    If any line starts with ``#|`` (a CSV header written by this package)
    only those lines are read, so an output table can be fed back in.
    """
    lines = text.splitlines()
    embedded = [ln[2:] for ln in lines if ln.startswith("#|")]
    if embedded:
        lines = embedded
    out = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key] = value
    return out


def builtin_solvent(name):
    solvents = load_solvents()
    if name not in solvents:
        raise ScenarioError(f"unknown solvent {name!r}; valid names: {', '.join(sorted(solvents))}")
    return solvents[name]


NV_SPECIES = DefectSpecies(name="NV-", gamma_rad=1 / 12e-9, lambda_F=721e-9, number_density=2.65e24)
SIV_SPECIES = DefectSpecies(
    name="SiV-", gamma_rad=1 / 1.2e-9, lambda_F=741e-9, number_density=2.65e23, levels=SIV_LEVELS
)
ROOM_TEMPERATURE = 295.0
WATER_H_CONV = 30.0


def _builtins():
    vacuum = ParticleEnvironment(diameter=20e-6, ambient_T=ROOM_TEMPERATURE, emissivity=1.0)
    water = ParticleEnvironment(
        diameter=20e-6,
        ambient_T=ROOM_TEMPERATURE,
        emissivity=1.0,
        load_kind=LoadKind.LIQUID_CONVECTIVE,
        h_conv=WATER_H_CONV,
        solvent=D2O,
    )
    nv_abs, nv_se = "bundled:nv-absorption", "bundled:nv-emission"
    return {
        "nv-vacuum": Scenario(
            "nv-vacuum", NV_SPECIES, vacuum, BeamParams(0.1, 760e-9, 5e-6), nv_abs, nv_se,
            (SweepAxis("wavelength", Grid(700.0, 850.0, 151)),),
        ),
        "nv-water": Scenario(
            "nv-water", NV_SPECIES, water, BeamParams(1.0, 760e-9, 5e-6), nv_abs, nv_se,
            (SweepAxis("wavelength", Grid(700.0, 850.0, 151)),),
        ),
        "siv-vacuum": Scenario(
            "siv-vacuum", SIV_SPECIES, vacuum, BeamParams(0.1e-3, 750e-9, 5e-6), "mccumber", "fl:bundled:siv-pl",
            (SweepAxis("wavelength", Grid(720.0, 800.0, 161)),),
        ),
    }


BUILTIN_NAMES = ("nv-vacuum", "nv-water", "siv-vacuum")
KEYS = tuple(_builtins()["nv-vacuum"].to_dict())


def builtin_scenario(name):
    scenarios = _builtins()
    if name not in scenarios:
        raise ScenarioError(f"unknown scenario {name!r}; valid names: {', '.join(BUILTIN_NAMES)}")
    return scenarios[name]


def apply_overrides(scenario, overrides):
    """New scenario with ``overrides`` (key -> value) applied on top of ``scenario``."""
    if not overrides:
        return scenario
    d = scenario.to_dict()
    for key, value in overrides.items():
        if key not in d:
            raise ScenarioError(f"invalid override key {key!r}")
        d[key] = value if isinstance(value, str) else _fmt(value)
    if "solvent.name" in overrides and not any(
        k in overrides for k in ("solvent.eta_infinity_Pa_s", "solvent.A_K", "solvent.T_VF_K")
    ):
        for k in ("solvent.eta_infinity_Pa_s", "solvent.A_K", "solvent.T_VF_K"):
            d[k] = "none"
    return Scenario.from_dict(d)


@functools.lru_cache(maxsize=32)
def _resolve(source, tau_rad, n_refractive):
    if source.startswith("fl:"):
        pl = resolve_spectrum(source[3:])
        return fl_emission_cross_section(pl, tau_rad, n_refractive)
    spectrum = resolve_spectrum(source)
    if spectrum.kind is not SpectrumKind.CROSS_SECTION:
        raise ScenarioError(f"{source} is an intensity spectrum; prefix it with 'fl:' to convert")
    return spectrum


def resolve_spectra(scenario):
    """(sigma_abs, sigma_se) spectra for a scenario.

    ``fl:<ref>`` converts a photoluminescence spectrum with the species
    radiative lifetime; ``mccumber`` derives absorption from the emission
    spectrum at the ambient temperature.
    """
    tau = 1.0 / scenario.species.gamma_rad
    n = scenario.refractive_index
    sigma_se = _resolve(scenario.sigma_se_source, tau, n)
    if scenario.sigma_abs_source == "mccumber":
        if scenario.species.levels is None:
            raise ScenarioError("'mccumber' absorption needs species level structure")
        sigma_abs = absorption_from_emission(sigma_se, scenario.env.ambient_T, scenario.species.levels)
    else:
        sigma_abs = _resolve(scenario.sigma_abs_source, tau, n)
    return sigma_abs, sigma_se


BASE_COLUMNS = (
    "lambda_nm",
    "power_W",
    "diameter_m",
    "quantum_efficiency",
    "sigma_abs_m2",
    "sigma_se_m2",
    "I_S_W_m2",
    "lambda_F_star_nm",
    "P_cool_W",
    "delta_T_K",
)


def _num(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{x:.10e}"


@dataclass(frozen=True)
class Row:
    power: float
    diameter: float
    quantum_efficiency: float
    result: object  # CoolingResult


@dataclass(frozen=True)
class ResultTable:
    scenario: Scenario
    rows: tuple

    @property
    def columns(self):
        extra = ("chi",) if self.scenario.is_liquid else ()
        return BASE_COLUMNS + extra + ("warn_flags", "status")

    def values(self, row):
        r = row.result
        out = [
            _num(r.wavelength / NM),
            _num(row.power),
            _num(row.diameter),
            _num(row.quantum_efficiency),
            _num(r.sigma_abs),
            _num(r.sigma_se),
            _num(r.saturation_intensity),
            _num(r.lambda_F_star / NM),
            _num(r.cooling_power),
            _num(r.delta_T),
        ]
        if self.scenario.is_liquid:
            out.append(_num(r.chi))
        out.append(r.warning.value)
        out.append("ok" if r.ok else "domain-error")
        return out

    def column(self, name):
        """Numeric column as a float array (errors read as NaN)."""
        i = self.columns.index(name)
        return np.array([float(self.values(r)[i]) for r in self.rows])

    def ok_rows(self):
        return [r for r in self.rows if r.result.ok]

    def summary(self):
        """The row with the lowest delta_T, or None when no row evaluated."""
        ok = self.ok_rows()
        if not ok:
            return None
        return min(ok, key=lambda r: r.result.delta_T)

    def summary_line(self):
        best = self.summary()
        if best is None:
            return "summary: no valid rows"
        r = best.result
        return (
            f"summary: min delta_T_K={_num(r.delta_T)} at lambda_nm={_num(r.wavelength / NM)} "
            f"(power_W={_num(best.power)}, diameter_m={_num(best.diameter)}, "
            f"quantum_efficiency={_num(best.quantum_efficiency)})"
        )

    def header_lines(self):
        s = self.scenario
        lines = [
            f"cryodiamond {__version__}",
            f"scenario: {s.name}",
            f"ambient temperature {s.env.ambient_T:g} K (room-temperature default 295 K)",
            "constants: " + " ".join(f"{k}={v!r}" for k, v in as_dict().items()),
            "resolved parameters follow; pass this file to --scenario to re-run",
        ]
        return [f"# {ln}" for ln in lines] + [f"#| {k} = {v}" for k, v in s.to_dict().items()]

    def to_csv(self):
        out = self.header_lines()
        out.append(",".join(self.columns))
        out.extend(",".join(self.values(r)) for r in self.rows)
        out.append(f"# {self.summary_line()}")
        return "\n".join(out) + "\n"


def _axis_values(scenario, name, default):
    a = scenario.axis(name)
    return a.values_si() if a else np.array([default])


def run_scenario(scenario, overrides=None, workers=None):
    """Evaluate the scenario over its sweep axes; returns a :class:`ResultTable`."""
    s = apply_overrides(scenario, overrides)
    sigma_abs, sigma_se = resolve_spectra(s)
    etas = _axis_values(s, "quantum_efficiency", s.species.quantum_efficiency)
    diameters = _axis_values(s, "diameter", s.env.diameter)
    powers = _axis_values(s, "power", s.beam_defaults.power)
    wavelengths = _axis_values(s, "wavelength", s.beam_defaults.wavelength)
    rows = []
    for eta, diameter, power in itertools.product(etas, diameters, powers):
        try:
            species = replace(s.species, quantum_efficiency=float(eta))
            env = replace(s.env, diameter=float(diameter))
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        results = sweep_delta_T(
            species, env, float(power), s.beam_defaults.spot_radius, sigma_abs, sigma_se, wavelengths, workers=workers
        )
        rows.extend(Row(float(power), float(diameter), float(eta), r) for r in results)
    return ResultTable(s, tuple(rows))


def load_scenario(ref):
    """A built-in name, or a path to a scenario file / CSV output with an embedded header."""
    if ref in BUILTIN_NAMES:
        return builtin_scenario(ref)
    from .datafiles import find_file

    path = find_file(ref)
    try:
        text = path.read_text()
    except OSError:
        raise ScenarioError(
            f"unknown scenario {ref!r}: not a built-in ({', '.join(BUILTIN_NAMES)}) or a readable file"
        ) from None
    return Scenario.from_text(text)


# figure name -> list of (curve label, scenario name, overrides)
_ETA_GRID = "0.55:1.0:46"
FIGURES = {
    "fig2a": [
        (f"P{p}W", "nv-vacuum", {"beam.power_W": p, "sweep.wavelength_nm": "700:850:301", "species.quantum_efficiency": 1.0})
        for p in ("0.01", "0.1", "1")
    ],
    "fig2b": [
        (f"lambda{lam}nm", "nv-vacuum", {
            "beam.power_W": "1", "beam.wavelength_m": f"{lam}e-9",
            "sweep.wavelength_nm": "none", "sweep.quantum_efficiency": _ETA_GRID,
        })
        for lam in ("740", "760", "780")
    ],
    "fig4a": [
        (f"P{p}W", "siv-vacuum", {"beam.power_W": p, "sweep.wavelength_nm": "720:800:321"})
        for p in ("1e-05", "0.0001", "0.001")
    ],
    "fig4b": [
        (f"lambda{lam}nm", "siv-vacuum", {
            "beam.power_W": "0.0001", "beam.wavelength_m": f"{lam}e-9",
            "sweep.wavelength_nm": "none", "sweep.quantum_efficiency": _ETA_GRID,
        })
        for lam in ("745", "750", "760")
    ],
    "fig6a": [
        ("grid", "nv-water", {
            "beam.power_W": "1", "sweep.wavelength_nm": "722:850:129", "sweep.diameter_m": "1e-05:0.00025:25",
        })
    ],
}
# Cooling-power panels share the delta_T tables (the CSVs carry both columns);
# the chi map shares the liquid grid.
FIGURES["fig2c"] = FIGURES["fig2a"]
FIGURES["fig2d"] = FIGURES["fig2b"]
FIGURES["fig6b"] = FIGURES["fig6a"]
FIGURE_NAMES = ("fig2a", "fig2b", "fig2c", "fig2d", "fig4a", "fig4b", "fig6a", "fig6b")


def run_figure(name, workers=None):
    """[(file name, ResultTable)] with one table per plotted curve."""
    if name not in FIGURES:
        raise ScenarioError(f"unknown figure {name!r}; valid names: {', '.join(FIGURE_NAMES)}")
    out = []
    for label, scenario_name, overrides in FIGURES[name]:
        table = run_scenario(builtin_scenario(scenario_name), overrides, workers=workers)
        out.append((f"{name}_{label}.csv", table))
    return out
