import numpy as np
import pytest

from fzspec import __version__
from fzspec.cli import ENV_OUT, main
from fzspec.sierpinski import REFERENCE_GLYPHS


@pytest.fixture(autouse=True)
def no_env(monkeypatch):
    monkeypatch.delenv(ENV_OUT, raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(csv_text):
    return [ln.split(",") for ln in csv_text.splitlines()[1:]]


def test_sigma_small(capsys):
    code, out, _ = run(capsys, "sigma", "--n", "2")
    assert code == 0 and len(rows(out)) == 4
    code, out, _ = run(capsys, "sigma", "--n", "1")
    assert out.splitlines()[1].split(",")[:2] == ["0", "0"]


def test_sigma_svg_and_zoom(capsys):
    code, out, _ = run(capsys, "sigma", "--n", "3", "--format", "svg")
    assert code == 0 and 'data-count="5"' in out
    code, out, _ = run(capsys, "sigma", "--n", "3", "--zoom", "1+0i", "--window", "0.5")
    pts = [complex(float(a), float(b)) for a, b, *_ in rows(out)]
    assert pts == [2**0.5]


def test_sigma_eps_outputs(capsys):
    code, out, _ = run(capsys, "sigma", "--n", "3", "--eps", "0.1", "--grid-size", "9")
    assert code == 0 and out.startswith("re,im,value\n") and len(out.splitlines()) == 82


def test_sigma_eps_pgm(tmp_path, capsys):
    p = tmp_path / "s.pgm"
    code, _, _ = run(capsys, "sigma", "--n", "3", "--eps", "0.1", "--grid-size", "9", "--format", "pgm", "--out", str(p))
    data = p.read_bytes()
    assert code == 0 and data.startswith(b"P5\n9 9\n255\n") and len(data) == 11 + 81
    assert set(data[11:]) <= {0, 255} and 0 in data[11:]


def test_caps_refused(capsys):
    assert run(capsys, "sigma", "--n", "21")[0] == 2
    assert run(capsys, "sigma", "--n", "6", "--cap", "5")[0] == 2
    assert run(capsys, "pi", "--n", "15")[0] == 2
    assert run(capsys, "table", "--N", "5000")[0] == 2
    assert run(capsys, "sigma", "--n", "0")[0] == 2
    assert run(capsys, "pi", "--n", "2", "--phi-samples", "8")[0] == 2
    assert run(capsys, "sigma", "--n", "3", "--eps", "-1")[0] == 2
    assert run(capsys, "sigma", "--n", "3", "--format", "pgm")[0] == 2


def test_help_mentions_caps(capsys):
    with pytest.raises(SystemExit):
        main(["sigma", "--help"])
    out = capsys.readouterr().out
    assert "cap 20" in out
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "Exit codes" in capsys.readouterr().out
    with pytest.raises(SystemExit):
        main(["--version"])
    assert __version__ in capsys.readouterr().out


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--N", "16")
    assert code == 0 and out == REFERENCE_GLYPHS + "\n"
    code, out, _ = run(capsys, "table", "--N", "1")
    assert out == "1 + |+\n\n"


def test_epsn(capsys):
    code, out, _ = run(capsys, "epsn", "--n-max", "3")
    assert code == 0 and len(out.splitlines()) == 4
    assert run(capsys, "epsn", "--n-min", "4", "--n-max", "3")[0] == 2


def test_pi(capsys):
    code, out, _ = run(capsys, "pi", "--n", "1", "--phi-samples", "16")
    assert code == 0 and rows(out)[0][:2] == ["-2", "0"]
    code, out, _ = run(capsys, "pi", "--n", "2", "--phi-samples", "16", "--format", "svg")
    assert code == 0 and "<polyline" in out


def test_pseudo_and_nrange(capsys):
    code, out, _ = run(capsys, "pseudo", "--pattern", "+-", "--eps", "0.1", "--grid-size", "5", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 26
    code, out, _ = run(capsys, "nrange", "--pattern", "++", "--angles", "8")
    assert code == 0 and len(out.splitlines()) == 9
    assert run(capsys, "nrange", "--pattern", "++", "--angles", "4")[0] == 2
    with pytest.raises(SystemExit):
        main(["nrange", "--pattern", "+x"])


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--quick")
    assert code == 0
    assert all(" pass " in ln for ln in out.splitlines())


def test_verify_mutation(capsys, caplog):
    code, out, _ = run(capsys, "verify", "--quick", "--inject-sign-error", "7")
    assert code == 1
    assert "sign_column FAIL" in out and "i=7" in out
    assert "coefficient_escaped" in out
    assert "check failed" in caplog.text
    assert run(capsys, "verify", "--inject-sign-error", "0")[0] == 2


def test_missing_directory(tmp_path, capsys):
    assert run(capsys, "sigma", "--n", "2", "--out", str(tmp_path / "nope" / "x.csv"))[0] == 3
    assert run(capsys, "overlay", "--n-sigma", "2", "--n-pi", "2", "--out", str(tmp_path / "nope"))[0] == 3


def test_env_output_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(ENV_OUT, str(tmp_path))
    code, out, _ = run(capsys, "sigma", "--n", "2")
    assert code == 0 and out == ""
    assert len((tmp_path / "sigma2.csv").read_text().splitlines()) == 5
    monkeypatch.setenv(ENV_OUT, str(tmp_path / "nope"))
    assert run(capsys, "sigma", "--n", "2")[0] == 3


def test_overlay(tmp_path, capsys):
    code, out, _ = run(capsys, "overlay", "--n-sigma", "3", "--n-pi", "2", "--phi-samples", "32", "--out", str(tmp_path))
    assert code == 0
    counts = dict(ln.split() for ln in out.splitlines())
    assert counts["sigma"] == "5" and counts["unit_circle"] == "720"
    assert (tmp_path / "overlay.svg").exists() and (tmp_path / "overlay_pi.csv").exists()


def test_workers_do_not_change_output(capsys):
    a = run(capsys, "sigma", "--n", "8")[1]
    b = run(capsys, "sigma", "--n", "8", "--workers", "3")[1]
    assert a == b
    assert run(capsys, "sigma", "--n", "3", "--workers", "0")[0] == 2
