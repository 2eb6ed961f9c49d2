import numpy as np
import pytest

from fzspec.core import ComplexGrid
from fzspec.export import Layer, grid_csv, pgm_bytes, read_pgm, svg_text, write_grid_csv, write_pgm


def small_grid():
    g = ComplexGrid(0, 2, -1, 1, 3, 2)  # re 0,1,2 ; im -1,1
    return g.with_values(np.array([[0.0, 1.0, 2.0], [4.0, np.inf, -1.0]]))


def test_pgm_header_and_orientation():
    data = pgm_bytes(small_grid())
    assert data[:11] == b"P5\n3 2\n255\n"
    body = data[11:]
    # top image row is im = +1; vmax = 4 is the largest finite value
    assert list(body) == [255, 255, 0, 0, 64, 128]
    assert len(body) == 6


def test_pgm_explicit_vmax_and_round_trip(tmp_path):
    g = small_grid()
    path = write_pgm(g, tmp_path / "a.pgm", vmax=2.0)
    img = read_pgm(path)
    assert img.shape == (2, 3)
    assert img[1].tolist() == [0, 128, 255]
    with pytest.raises(ValueError):
        pgm_bytes(ComplexGrid(0, 1, 0, 1, 2, 2))


def test_grid_csv_order(tmp_path):
    text = grid_csv(small_grid())
    lines = text.splitlines()
    assert lines[0] == "re,im,value"
    assert lines[1] == "0,-1,0"
    assert lines[2] == "1,-1,1"
    assert lines[4] == "0,1,4"
    assert lines[5] == "1,1,inf"
    assert len(lines) == 7
    assert write_grid_csv(small_grid(), tmp_path / "g.csv").read_text() == text


def test_grid_csv_round_trips_floats():
    g = ComplexGrid(-0.1, 0.3, 0, 0.7, 3, 3)
    g = g.with_values(np.random.default_rng(0).random((3, 3)))
    rows = np.array([[float(x) for x in ln.split(",")] for ln in grid_csv(g).splitlines()[1:]])
    np.testing.assert_array_equal(rows[:, 2], g.values.ravel())
    np.testing.assert_array_equal(rows[:, 0] + 1j * rows[:, 1], g.nodes().ravel())


def test_svg_layers():
    text = svg_text([Layer("a", np.array([0, 1j])), Layer("b", np.array([2, 2j]), curves=[np.array([2, 2j])])], "t")
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert '<g id="a" data-count="2">' in text
    assert '<g id="b" data-count="2">' in text
    assert text.count("<circle") == 2 and text.count("<polyline") == 1
    # the origin sits in the middle of the 800x800 viewport
    assert 'cx="400.00" cy="400.00"' in text
