import numpy as np
import pytest

from fzspec.analysis import (
    CheckReport,
    conjecture_overlay,
    disk_inclusion_report,
    inclusion_sigma_in_pi,
    modulus_bound_report,
    square_bound_report,
    symmetry_report,
    table_report,
    verification_suite,
)
from fzspec.core import ComplexGrid, SpectralPointCloud
from fzspec.finite_spectra import sigma_n
from fzspec.periodic_spectra import pi_n
from fzspec.sierpinski import sierpinski_signs


def test_report_line():
    r = CheckReport.judge("x", 0.5, 1.0, "a b")
    assert r.passed and r.witness == "ab"
    assert r.line() == "x pass 5.000000e-01 1.0e+00 ab"
    assert not CheckReport.judge("x", 2, 1).passed


def test_symmetry_of_lonely_point_fails():
    r = symmetry_report(SpectralPointCloud([1 + 0.5j]), 1e-8)
    assert not r.passed and r.metric >= 1
    with pytest.raises(ValueError):
        symmetry_report(SpectralPointCloud([]), 1)


@pytest.mark.parametrize("n", range(1, 8))
def test_sigma_symmetric(n):
    assert symmetry_report(sigma_n(n), 1e-8).passed


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_pi_symmetric(n):
    assert symmetry_report(pi_n(n, 256), 1e-8).passed


def test_square_and_modulus_bounds():
    ok = square_bound_report(SpectralPointCloud([2 + 0j]))
    assert ok.passed and ok.metric == 0
    bad = square_bound_report(SpectralPointCloud([1.5 + 1.5j]))
    assert not bad.passed and bad.metric == pytest.approx(1.0)
    assert bad.witness == "1.5+1.5i"
    assert modulus_bound_report(SpectralPointCloud([1.2 + 1.2j])).passed
    assert not square_bound_report(SpectralPointCloud([1.2 + 1.2j])).passed
    assert not modulus_bound_report(SpectralPointCloud([3j])).passed


@pytest.mark.parametrize("n", [1, 2])
def test_inclusion(n):
    r = inclusion_sigma_in_pi(n, 256)
    assert r.passed, r.line()
    assert r.name == f"inclusion_sigma{n}_in_pi{2 * n + 2}"


def test_disk_inclusion():
    r = disk_inclusion_report(0.9, 5, 8, 1024)
    assert r.passed, r.line()
    with pytest.raises(ValueError):
        disk_inclusion_report(1.0)


def test_table_report_and_mutation():
    assert table_report(16).passed
    bad = sierpinski_signs(1, 17).copy()
    bad[6] = -bad[6]
    r = table_report(16, bad)
    assert not r.passed


def test_verification_suite_quick():
    reps = verification_suite(quick=True)
    assert all(r.passed for r in reps), [r.line() for r in reps if not r.passed]
    names = {r.name for r in reps}
    assert {"table_glyphs", "sign_column", "forced_sign", "pascal_parity", "eps_n_bounds"} <= names


def test_verification_suite_catches_flip():
    s = sierpinski_signs(1, 513).copy()
    s[6] = -s[6]
    failed = [r for r in verification_suite(quick=True, signs=s) if not r.passed]
    assert {r.name for r in failed} >= {"sign_column"}
    assert any(r.witness == "i=7" for r in failed)


def test_overlay(tmp_path):
    res = conjecture_overlay(4, 3, tmp_path, phi_samples=64)
    assert set(res.layers) == {"sigma", "pi", "unit_circle", "square"}
    assert len(res.layers["sigma"]) == len(sigma_n(4))
    names = sorted(p.name for p in res.files)
    assert names == ["overlay.svg", "overlay_pi.csv", "overlay_sigma.csv", "overlay_square.csv", "overlay_unit_circle.csv"]
    svg = (tmp_path / "overlay.svg").read_text()
    assert f'<g id="sigma" data-count="{len(res.layers["sigma"])}">' in svg
    lines = (tmp_path / "overlay_sigma.csv").read_text().splitlines()
    assert len(lines) == len(res.layers["sigma"]) + 1
    zoom = conjecture_overlay(4, 3, tmp_path, ComplexGrid(0, 2.2, 0, 2.2, 4, 4), 64, fmt="csv")
    assert np.all(zoom.layers["sigma"].real >= 0) and len(zoom.layers["sigma"]) < len(res.layers["sigma"])
    with pytest.raises(FileNotFoundError):
        conjecture_overlay(2, 2, tmp_path / "missing")
