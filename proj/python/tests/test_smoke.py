import math

import numpy as np
import pytest

import gvfseg


def test_phantom_and_metrics():
    gt, obs, prob = gvfseg.make_phantom("disc", [48, 48], radius=12, noise_sigma=0.2, seed=1)
    assert gt.shape == (48, 48) and gt.dtype == np.uint8
    assert obs.shape == (48, 48) and obs.dtype == np.float32
    assert 0.0 <= prob.min() and prob.max() <= 1.0
    assert gvfseg.dsc(gt, gt) == 1.0
    assert gvfseg.assd(gt, gt) == 0.0


def test_perturb_is_seeded_and_identity_at_zero():
    gt, _, _ = gvfseg.make_phantom("disc", [32, 32], radius=9, seed=2)
    same = gvfseg.perturb_labels(gt, sigma=0.0)
    assert np.array_equal(same, gt)
    a = gvfseg.perturb_labels(gt, sigma=2.0, grid=[5, 5, 5], seed=7)
    b = gvfseg.perturb_labels(gt, sigma=2.0, grid=[5, 5, 5], seed=7)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, gt)
    assert gvfseg.dsc(a, gt) < 1.0


def test_segment_recovers_disc():
    gt, obs, prob = gvfseg.make_phantom("disc", [40, 40], radius=11, noise_sigma=0.2, seed=3)
    labels, energy = gvfseg.segment(obs, prob, gt, lam=0.3, alpha=0.1, beta=0.5)
    assert math.isfinite(energy)
    assert gvfseg.dsc(labels, gt) > 0.95


def test_solve_s_excess_inf_edge():
    objective, members = gvfseg.solve_s_excess([-10, 4], [(0, 1, None)])
    assert objective == -6
    assert members == [0, 1]
    objective, members = gvfseg.solve_s_excess([3, 7], [(0, 1, 2)])
    assert objective == 0
    assert members == []


def test_volume_roundtrip(tmp_path):
    gt, obs, _ = gvfseg.make_phantom("cshape", [48, 48], radius=15, inner_radius=9, seed=4)
    p = tmp_path / "gt.svol"
    gvfseg.write_volume(gt, str(p))
    back = gvfseg.read_volume(str(p))
    assert np.array_equal(back, gt)
    pf = tmp_path / "obs.svol"
    gvfseg.write_volume(obs, str(pf), spacing=[1.0, 2.0])
    assert np.allclose(gvfseg.read_volume(str(pf)), obs)


def test_sensitivity_rows():
    rows = gvfseg.run_sensitivity(
        "disc", [32, 32], radius=9, noise_sigma=0.2,
        sigmas=[0.0, 3.0], num_seeds=2, base_sigma=1.5, grid=[5, 5, 5],
    )
    assert len(rows) == 2
    for sigma, preseg_dsc, final_dsc, preseg_assd, final_assd in rows:
        assert 0.0 < preseg_dsc < 1.0
        assert 0.0 < final_dsc <= 1.0
        assert preseg_assd >= 0.0 and final_assd >= 0.0
    assert rows[1][1] < rows[0][1]


def test_errors_surface_as_exceptions():
    empty = np.zeros((8, 8), dtype=np.uint8)
    with pytest.raises(Exception):
        gvfseg.dsc(empty, empty)
    with pytest.raises(Exception):
        gvfseg.make_phantom("disc", [16, 16], radius=40)
