import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from crackforge.mask_core import (
    MaskError,
    PixelCoord,
    draw_line,
    line_pixels,
    load_mask,
    resize_nearest,
    saturation,
    save_mask,
)
from oracles import dda_line


def _write_gray(path, arr, mode="L"):
    Image.fromarray(np.asarray(arr, dtype=np.uint8), mode=mode).save(path)


@pytest.mark.parametrize("value,expected", [(0, 0), (255, 16), (127, 0), (128, 16)])
def test_load_threshold_is_strict(tmp_path, value, expected):
    p = tmp_path / "m.png"
    _write_gray(p, np.full((4, 4), value))
    assert np.count_nonzero(load_mask(p, 127)) == expected


def test_load_rgb_uses_luma(tmp_path):
    rgb = np.zeros((2, 2, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 255, 255)
    rgb[1, 1] = (0, 0, 255)  # luma ~29
    p = tmp_path / "c.png"
    Image.fromarray(rgb, mode="RGB").save(p)
    m = load_mask(p)
    assert m.tolist() == [[True, False], [False, False]]


def test_load_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_mask(tmp_path / "missing.png")
    p16 = tmp_path / "deep.png"
    Image.fromarray(np.full((3, 3), 40000, dtype=np.uint16)).save(p16)
    with pytest.raises(MaskError):
        load_mask(p16)
    with pytest.raises(MaskError):
        load_mask(p16, threshold=300)


@pytest.mark.parametrize("ext", [".png", ".pgm"])
def test_save_load_round_trip(tmp_path, ext):
    rng = np.random.default_rng(3)
    m = rng.random((17, 23)) < 0.3
    p = tmp_path / f"m{ext}"
    save_mask(m, p)
    assert np.array_equal(load_mask(p), m)
    raw = np.asarray(Image.open(p))
    assert set(np.unique(raw)) <= {0, 255}


def test_pgm_is_binary_p5(tmp_path):
    p = tmp_path / "m.pgm"
    save_mask(np.ones((2, 3), bool), p)
    assert p.read_bytes().startswith(b"P5")


def test_save_empty_and_single(tmp_path):
    p = tmp_path / "e.png"
    save_mask(np.zeros((5, 5), bool), p)
    assert not np.asarray(Image.open(p)).any()
    save_mask(np.ones((1, 1), bool), p)
    assert np.asarray(Image.open(p)).tolist() == [[255]]


def test_draw_line_axis_and_diagonal():
    m = np.zeros((6, 6), bool)
    h = draw_line(m, PixelCoord(0, 0), PixelCoord(4, 0))
    assert sorted(zip(*np.nonzero(h)[::-1])) == [(x, 0) for x in range(5)]
    d = draw_line(m, PixelCoord(0, 0), PixelCoord(3, 3))
    assert sorted(zip(*np.nonzero(d)[::-1])) == [(i, i) for i in range(4)]
    assert not m.any()  # input untouched


def test_draw_line_matches_dda_oracle():
    got = set(line_pixels((0, 0), (5, 2)))
    assert got == dda_line((0, 0), (5, 2))
    assert got == {(0, 0), (1, 0), (2, 1), (3, 1), (4, 2), (5, 2)}


def test_draw_line_out_of_bounds():
    with pytest.raises(MaskError):
        draw_line(np.zeros((3, 3), bool), (0, 0), (3, 0))


coords = st.tuples(st.integers(0, 19), st.integers(0, 19))


@settings(max_examples=200, deadline=None)
@given(coords, coords)
def test_line_symmetric_connected_and_exact_off_ties(a, b):
    fwd = set(line_pixels(a, b))
    assert fwd == set(line_pixels(b, a))
    assert a in fwd and b in fwd
    pts = line_pixels(a, b)
    assert all(max(abs(p[0] - q[0]), abs(p[1] - q[1])) == 1 for p, q in zip(pts, pts[1:]))
    dx, dy = b[0] - a[0], b[1] - a[1]
    n = max(abs(dx), abs(dy))
    minor = abs(dy) if abs(dx) >= abs(dy) else abs(dx)
    # away from exact half-pixel ties the digital line is unique
    if n and all((2 * k * minor) % (2 * n) != n for k in range(n + 1)):
        assert fwd == dda_line(a, b)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.data())
def test_draw_line_monotone(h, w, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 10**6)))
    m = rng.random((h, w)) < 0.4
    a = (data.draw(st.integers(0, w - 1)), data.draw(st.integers(0, h - 1)))
    b = (data.draw(st.integers(0, w - 1)), data.draw(st.integers(0, h - 1)))
    out = draw_line(m, a, b)
    assert (out >= m).all()


def test_saturation_values():
    assert saturation(np.zeros((8, 8), bool)) == 0.0
    m = np.zeros((5, 5), bool)
    m[1:4, 1:4] = True
    assert saturation(m) == pytest.approx(0.36, abs=0)
    perm = np.random.default_rng(0).permutation(m.ravel()).reshape(m.shape)
    assert saturation(perm) == saturation(m)


def test_resize_nearest_keeps_binary():
    m = np.zeros((4, 4), bool)
    m[0, 0] = True
    r = resize_nearest(m, 8, 8)
    assert r.dtype == bool and r.shape == (8, 8)
    assert r[:2, :2].all() and r.sum() == 4
