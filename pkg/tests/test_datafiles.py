import numpy as np
import pytest

from cryodiamond import datafiles
from cryodiamond.constants import NM
from cryodiamond.datafiles import (
    SpectrumFormatError,
    bundled_spectrum,
    format_spectrum,
    load_solvents,
    load_spectrum,
    parse_solvents,
    parse_spectrum,
    resolve_spectrum,
    save_spectrum,
)
from cryodiamond.spectra import Spectrum, SpectrumKind


def test_round_trip(tmp_path):
    s = Spectrum(np.array([700.0, 700.5, 701.25]) * NM, [1.5e-22, 2e-22, 0.0])
    path = tmp_path / "s.csv"
    save_spectrum(s, path, comments=["test"])
    back = load_spectrum(path)
    np.testing.assert_allclose(back.wavelengths, s.wavelengths, rtol=1e-15)
    np.testing.assert_array_equal(back.values, s.values)
    assert back.kind is SpectrumKind.CROSS_SECTION


def test_nm_file_equals_metre_construction():
    text = "# kind=intensity_arb\n700,1\n710,3\n"
    s = parse_spectrum(text)
    assert s == Spectrum([700 * NM, 710 * NM], [1, 3], SpectrumKind.INTENSITY)


@pytest.mark.parametrize(
    "text, line",
    [
        ("700,1\n710,2\n", 1),
        ("# kind=bogus\n700,1\n", 1),
        ("# kind=intensity_arb\n700,1\n710\n", 3),
        ("# kind=intensity_arb\n700,1\n710,abc\n", 3),
        ("# kind=intensity_arb\n700,1\n\n690,2\n", 4),
        ("# kind=intensity_arb\n700,1\n710,-2\n", 3),
        ("# kind=intensity_arb\n700,1\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(SpectrumFormatError) as info:
        parse_spectrum(text, source="x.csv")
    assert info.value.line == line
    assert f"x.csv:{line}:" in str(info.value)


def test_format_is_parseable():
    s = bundled_spectrum("siv-pl")
    assert parse_spectrum(format_spectrum(s)) == parse_spectrum(format_spectrum(parse_spectrum(format_spectrum(s))))


def test_unknown_bundled_name():
    with pytest.raises(KeyError, match="valid names"):
        resolve_spectrum("bundled:nope")


def test_search_path_overrides_bundled(tmp_path, monkeypatch):
    (tmp_path / "siv_pl.csv").write_text("# kind=intensity_arb\n730,1\n750,1\n")
    monkeypatch.setenv(datafiles.SEARCH_PATH_ENV, str(tmp_path))
    s = resolve_spectrum("bundled:siv-pl")
    assert len(s) == 2
    (tmp_path / "mine.csv").write_text("# kind=cross_section_m2\n730,1e-22\n750,2e-22\n")
    assert resolve_spectrum("mine.csv").values[1] == 2e-22
    monkeypatch.delenv(datafiles.SEARCH_PATH_ENV)
    assert len(resolve_spectrum("bundled:siv-pl")) > 2


def test_bundled_solvents():
    solvents = load_solvents()
    d2o = solvents["D2O"]
    assert (d2o.eta_infinity, d2o.A_vogel, d2o.T_VF) == (3.456e-5, 478.7, 160.0)
    assert "H2O" in solvents


def test_solvent_file(tmp_path):
    p = tmp_path / "solv.csv"
    p.write_text("# comment\nglycerol, 1e-5, 2000, 120\n")
    assert load_solvents(p)["glycerol"].T_VF == 120.0
    with pytest.raises(SpectrumFormatError):
        parse_solvents("bad, 1, 2\n")
    with pytest.raises(SpectrumFormatError):
        parse_solvents("bad, -1, 2, 3\n")
