"""Command-line interface: ``cryodiamond {sweep,spectrum,figure,list}``.

Exit status is 0 on success, 1 when the model is undefined everywhere asked
(e.g. every row of a sweep fails), and 2 for bad arguments or input files.
"""

import argparse
import sys
from pathlib import Path

from . import __version__
from .brownian import BrownianDomainError
from .constants import NM
from .cooling import CoolingDomainError
from .datafiles import (
    BUNDLED_FILES,
    DERIVED_BUNDLES,
    SEARCH_PATH_ENV,
    format_spectrum,
    load_solvents,
    resolve_spectrum,
)
from .scenarios import (
    AXES,
    BUILTIN_NAMES,
    FIGURE_NAMES,
    ScenarioError,
    load_scenario,
    run_figure,
    run_scenario,
)
from .spectra import (
    CalibrationAnchor,
    DoubletStructure,
    SpectrumError,
    SpectrumKind,
    SpectrumRangeError,
    absorption_from_emission,
    calibrate_absorption,
    fl_emission_cross_section,
    mean_fluorescence_wavelength,
)

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2

# CLI flag -> (sweep axis, scalar override key, multiplier from flag units to key units)
AXIS_FLAGS = {
    "power": ("power", "beam.power_W", 1.0),
    "lam": ("wavelength", "beam.wavelength_m", NM),
    "diameter": ("diameter", "env.diameter_m", 1.0),
    "qe": ("quantum_efficiency", "species.quantum_efficiency", 1.0),
}


class UsageError(Exception):
    pass


def _float(text, what):
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{what}: expected a number, got {text!r}") from None


def sweep_overrides(args):
    """Translate axis flags and ``--set`` pairs into scenario overrides.

    A scalar flag fixes that quantity and drops it from the sweep. A grid
    flag (``start:stop:count``) sweeps it; when any grid flag is given, the
    scenario's own sweep axes are replaced by the flagged ones.
    """
    overrides = {}
    flagged = {name: getattr(args, name) for name in AXIS_FLAGS if getattr(args, name) is not None}
    any_grid = any(":" in v for v in flagged.values())
    if any_grid:
        for key, _ in AXES.values():
            overrides[key] = "none"
    for name, value in flagged.items():
        axis, scalar_key, scale = AXIS_FLAGS[name]
        if ":" in value:
            overrides[AXES[axis][0]] = value
        else:
            overrides[scalar_key] = repr(_float(value, f"--{name}") * scale)
            overrides[AXES[axis][0]] = "none"
    for item in args.set or ():
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        key, value = (p.strip() for p in item.split("=", 1))
        overrides[key] = value
    return overrides


def _write(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def cmd_sweep(args):
    scenario = load_scenario(args.scenario)
    table = run_scenario(scenario, sweep_overrides(args), workers=args.workers)
    if not table.ok_rows():
        first = table.rows[0].result.error if table.rows else "empty sweep"
        print(f"error: model undefined on the whole grid: {first}", file=sys.stderr)
        return EXIT_DOMAIN
    _write(table.to_csv(), args.output)
    print(table.summary_line(), file=sys.stderr)
    return EXIT_OK


def cmd_spectrum_mean(args):
    spectrum = resolve_spectrum(args.source)
    print(f"{mean_fluorescence_wavelength(spectrum) / NM:.3f} nm")
    return EXIT_OK


def cmd_spectrum_derive_siv(args):
    spectrum = resolve_spectrum(args.source)
    if spectrum.kind is SpectrumKind.INTENSITY:
        spectrum = fl_emission_cross_section(spectrum, args.tau, args.n)
    levels = DoubletStructure(args.dE_lower, args.dE_upper, args.d_lower, args.d_upper, args.zpl)
    sigma_abs = absorption_from_emission(spectrum, args.T, levels)
    comments = [
        f"McCumber absorption from {args.source} at T={args.T!r} K, lambda_ZL={args.zpl!r} m, "
        f"dE_lower={args.dE_lower!r} eV, dE_upper={args.dE_upper!r} eV, d=({args.d_lower},{args.d_upper}), "
        f"tau_rad={args.tau!r} s, n={args.n!r}"
    ]
    _write(format_spectrum(sigma_abs, comments), args.output)
    return EXIT_OK


def _anchor(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"--anchor expects <wavelength_m>:<cross_section_m2>, got {text!r}")
    return _float(parts[0], "--anchor wavelength"), _float(parts[1], "--anchor cross section")


def cmd_spectrum_calibrate(args):
    relative = resolve_spectrum(args.source)
    wavelength, cross_section = _anchor(args.anchor)
    ref_power = args.ref_power if args.ref_power is not None else args.measurement_power
    anchor = CalibrationAnchor(wavelength, cross_section, ref_power, args.measurement_power)
    out = calibrate_absorption(relative, anchor)
    comments = [
        f"calibrated from {args.source}: {cross_section!r} m^2 at {wavelength!r} m, "
        f"ref_power={ref_power!r} W, measurement_power={args.measurement_power!r} W"
    ]
    _write(format_spectrum(out, comments), args.output)
    return EXIT_OK


def cmd_figure(args):
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for filename, table in run_figure(args.name, workers=args.workers):
        (outdir / filename).write_text(table.to_csv())
        print(f"{outdir / filename}: {len(table.rows)} rows; {table.summary_line()}", file=sys.stderr)
    return EXIT_OK


def cmd_list(args):
    print("scenarios: " + ", ".join(BUILTIN_NAMES))
    print("figures: " + ", ".join(FIGURE_NAMES))
    print("bundled spectra: " + ", ".join(f"bundled:{n}" for n in sorted(list(BUNDLED_FILES) + list(DERIVED_BUNDLES))))
    print("solvents: " + ", ".join(sorted(load_solvents())))
    print(f"data search path variable: {SEARCH_PATH_ENV}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="cryodiamond", description="Optical cryocooling of doped diamond.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a scenario sweep and write a CSV table")
    p.add_argument("--scenario", required=True, help=f"built-in ({', '.join(BUILTIN_NAMES)}) or a scenario/CSV file")
    p.add_argument("--power", help="laser power [W], value or start:stop:count")
    p.add_argument("--lambda", dest="lam", help="wavelength [nm], value or start:stop:count")
    p.add_argument("--diameter", help="particle diameter [m], value or start:stop:count")
    p.add_argument("--qe", help="quantum efficiency, value or start:stop:count")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any scenario key")
    p.add_argument("-o", "--output", help="output CSV (default stdout)")
    p.add_argument("--workers", type=int, default=None, help="threads per sweep (output order is fixed)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrum", help="spectrum utilities")
    ssub = p.add_subparsers(dest="spectrum_command", required=True)
    q = ssub.add_parser("mean-lambda", help="print the mean emission wavelength")
    q.add_argument("source", help="spectrum file or bundled:<name>")
    q.set_defaults(func=cmd_spectrum_mean)

    q = ssub.add_parser("derive-siv-abs", help="McCumber absorption cross section from an emission/PL spectrum")
    q.add_argument("source", nargs="?", default="bundled:siv-pl")
    q.add_argument("--T", type=float, default=295.0, help="temperature [K]")
    q.add_argument("--zpl", type=float, default=738e-9, help="zero-phonon-line wavelength [m]")
    q.add_argument("--tau", type=float, default=1.2e-9, help="radiative lifetime [s] for PL input")
    q.add_argument("--n", type=float, default=2.4, help="refractive index for PL input")
    q.add_argument("--dE-lower", dest="dE_lower", type=float, default=0.2e-3, help="lower splitting [eV]")
    q.add_argument("--dE-upper", dest="dE_upper", type=float, default=1.05e-3, help="upper splitting [eV]")
    q.add_argument("--d-lower", dest="d_lower", type=int, default=2)
    q.add_argument("--d-upper", dest="d_upper", type=int, default=2)
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_spectrum_derive_siv)

    q = ssub.add_parser("calibrate-nv-abs", help="scale relative excitation signals to cross sections")
    q.add_argument("source", help="relative-signal spectrum file")
    q.add_argument("--anchor", default="532e-9:0.95e-20", help="<wavelength_m>:<cross_section_m2>")
    q.add_argument("--ref-power", dest="ref_power", type=float, help="power of the anchor measurement [W]")
    q.add_argument("--measurement-power", dest="measurement_power", type=float, default=200e-6, help="[W]")
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_spectrum_calibrate)

    p = sub.add_parser("figure", help="write one CSV per curve of a figure")
    p.add_argument("name", help=", ".join(FIGURE_NAMES))
    p.add_argument("--outdir", default=".")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("list", help="list built-in scenarios, figures and data")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ScenarioError, SpectrumRangeError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (CoolingDomainError, BrownianDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SpectrumError as exc:
        # format errors are bad input; degenerate/calibration failures are model-domain
        from .datafiles import SpectrumFormatError

        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, SpectrumFormatError) else EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
