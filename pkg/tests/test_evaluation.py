import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crackforge.evaluation import (
    PSNR_CAP_DB,
    StageDeltaReport,
    gaussian_window,
    l1_distance,
    psnr,
    quality_report,
    ssim,
    stage_delta_report,
)
from crackforge.mask_core import MaskError
from crackforge.morphometry import stage_statistics

C1 = 0.01 ** 2


def rand_mask(seed, shape=(32, 32), p=0.3):
    return np.random.default_rng(seed).random(shape) < p


@pytest.mark.parametrize("seed", range(10))
def test_identities(seed):
    a = rand_mask(seed)
    assert ssim(a, a) == pytest.approx(1.0, abs=1e-12)
    assert l1_distance(a, a) == 0.0
    assert psnr(a, a) == PSNR_CAP_DB


def test_zero_vs_one_closed_form():
    z, o = np.zeros((16, 16), bool), np.ones((16, 16), bool)
    assert ssim(z, o) == pytest.approx(C1 / (1 + C1), abs=1e-12)
    assert l1_distance(z, o) == 1.0
    assert psnr(z, o) == 0.0


def test_psnr_and_l1_worked_values():
    a = np.zeros((16, 16), bool)
    b = a.copy()
    b[:8] = True  # half of the pixels differ
    assert psnr(a, b) == pytest.approx(10 * math.log10(2), abs=1e-12)
    c = a.copy()
    c[0] = True  # 16 / 256
    assert l1_distance(a, c) == 0.0625


def test_gaussian_window():
    g = gaussian_window()
    assert g.shape == (11,) and g.sum() == pytest.approx(1.0)
    assert np.allclose(g, g[::-1]) and g.argmax() == 5


def test_ssim_matches_skimage():
    metrics = pytest.importorskip("skimage.metrics")
    for seed in range(8):
        a = rand_mask(seed, (40, 33), 0.2 + 0.05 * seed).astype(float)
        b = rand_mask(100 + seed, (40, 33), 0.3).astype(float)
        ref = metrics.structural_similarity(a, b, gaussian_weights=True, sigma=1.5,
                                            use_sample_covariance=False, data_range=1.0)
        assert ssim(a, b) == pytest.approx(ref, abs=1e-9)


def test_shape_and_size_errors():
    with pytest.raises(MaskError):
        l1_distance(np.zeros((4, 4)), np.zeros((4, 5)))
    with pytest.raises(MaskError):
        ssim(np.zeros((10, 20)), np.zeros((10, 20)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_symmetry_and_bounds(seed, p):
    rng = np.random.default_rng(seed)
    a = rng.random((16, 16)) < p
    b = rng.random((16, 16)) < 0.5
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)
    assert l1_distance(a, b) == l1_distance(b, a)
    assert psnr(a, b) == psnr(b, a)
    assert 0 <= l1_distance(a, b) <= 1
    assert -1 - 1e-12 <= ssim(a, b) <= 1 + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_l1_triangle_inequality(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.random((12, 12)) < 0.4 for _ in range(3))
    assert l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12


def test_psnr_decreases_with_more_flips():
    a = rand_mask(3)
    order = np.random.default_rng(4).permutation(a.size)
    values = []
    for k in (1, 8, 64, 256, 1024):
        b = a.copy().ravel()
        b[order[:k]] ^= True
        values.append(psnr(a, b.reshape(a.shape)))
    assert values == sorted(values, reverse=True)


def test_quality_report_record():
    a, b = rand_mask(1), rand_mask(2)
    rec = quality_report(a, b).to_record()
    assert set(rec) == {"l1", "ssim", "psnr_db"}
    assert rec["l1"] == l1_distance(a, b)


def crack_like(seed):
    m = np.zeros((24, 24), bool)
    rng = np.random.default_rng(seed)
    y = int(rng.integers(4, 20))
    w = int(rng.integers(1, 4))
    m[y:y + w, 2:22] = True
    return m


def test_stage_delta_report():
    real = [crack_like(s) for s in range(5)]
    gen = [crack_like(s) for s in range(10, 16)]
    rep = stage_delta_report(real, gen, stage=1)
    rs, gs = stage_statistics(real, 1), stage_statistics(gen, 1)
    assert rep.delta_s == pytest.approx(abs(rs.sat_mean - gs.sat_mean))
    assert rep.delta_t == pytest.approx(abs(rs.thick_mean - gs.thick_mean))
    swapped = stage_delta_report(gen, real, stage=1)
    assert (swapped.delta_s, swapped.delta_t) == (rep.delta_s, rep.delta_t)
    same = stage_delta_report(real, real, stage=1)
    assert same.delta_s == 0 and same.delta_t == 0
    rows = rep.to_records()
    assert [r["case"] for r in rows] == ["Real", "Fake"]
    assert rows[0]["delta_s"] is None and rows[1]["delta_t"] == rep.delta_t
    assert isinstance(rep, StageDeltaReport)
    with pytest.raises(ValueError):
        stage_delta_report([], gen, 1)
