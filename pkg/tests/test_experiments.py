import numpy as np
import pytest

from eulercs.construct import build_binary_matrix
from eulercs.errors import InvalidInput, ShapeError
from eulercs.euler import euler_square
from eulercs.experiments import (MatrixSpec, SweepConfig, make_matrix,
                                 run_patch_reconstruction,
                                 run_phase_transition, run_sweep)
from eulercs.imaging import PatchGrid, haar_inverse, unpatchify


def small_sweep(seed=7, trials=25, levels=(1, 2, 3)):
    return SweepConfig(matrix=MatrixSpec(family="euler", n=11, k=5),
                       sparsity_levels=levels, trials=trials,
                       master_seed=seed)


def test_sweep_within_guarantee_is_perfect():
    report = run_sweep(small_sweep(levels=(1, 2)))
    assert all(row["success_pct"] == 100.0 for row in report.rows)


def test_sweep_deep_sparsity_fails():
    report = run_sweep(SweepConfig(matrix=MatrixSpec(family="euler", n=11, k=5),
                                   sparsity_levels=(55,), trials=25,
                                   master_seed=3))
    assert report.rows[0]["success_pct"] <= 5.0


def test_sweep_gaussian_baseline_runs():
    report = run_sweep(SweepConfig(
        matrix=MatrixSpec(family="gaussian", m=20, M=40, seed=1),
        sparsity_levels=(1, 2), trials=10, master_seed=0))
    assert len(report.rows) == 2
    assert all(0 <= row["success_pct"] <= 100 for row in report.rows)


def test_sweep_byte_identical_reports():
    a = run_sweep(small_sweep()).to_json()
    b = run_sweep(small_sweep()).to_json()
    assert a == b
    assert run_sweep(small_sweep(seed=8)).to_json() != a


def test_sweep_report_has_raw_counts():
    report = run_sweep(small_sweep(trials=10, levels=(1,)))
    row = report.rows[0]
    assert row["successes"] == 10 and row["trials"] == 10
    assert "success_pct,successes" not in report.to_csv().splitlines()[0]
    assert report.to_csv().splitlines()[0] == "k,successes,trials,success_pct"


def test_sweep_rejects_bad_level():
    with pytest.raises(InvalidInput):
        run_sweep(small_sweep(levels=(56,)))


def test_sweep_monotone_trend_with_tolerance():
    report = run_sweep(SweepConfig(
        matrix=MatrixSpec(family="euler", n=11, k=5),
        sparsity_levels=tuple(range(1, 41)), trials=100, master_seed=11))
    pcts = [row["success_pct"] for row in report.rows]
    # endpoints: perfect within the guarantee, hopeless near full density
    assert pcts[0] == 100.0
    assert pcts[-1] <= 10.0
    # any local inversion is sampling noise, bounded well below the trend
    inversions = [b - a for a, b in zip(pcts, pcts[1:]) if b > a]
    assert all(gap <= 10.0 for gap in inversions)
    # averaged over 3-level windows the curve is non-increasing
    smooth = [sum(pcts[i:i + 3]) / 3 for i in range(len(pcts) - 2)]
    assert all(b <= a + 5.0 for a, b in zip(smooth, smooth[1:]))


def test_solver_flag_basis_pursuit():
    # the splitting solver stops at its duality-gap tolerance (~80 dB), so
    # judge success against a threshold matched to that tolerance
    report = run_sweep(SweepConfig(matrix=MatrixSpec(family="euler", n=5, k=2),
                                   sparsity_levels=(1,), trials=5,
                                   solver="bp", threshold_db=60.0,
                                   master_seed=0))
    assert report.rows[0]["success_pct"] == 100.0


def test_make_matrix_families():
    assert make_matrix(MatrixSpec(family="euler", n=3, k=2)).shape == (6, 9)
    assert make_matrix(MatrixSpec(family="rows", row_size=12)).shape == (12, 16)
    assert make_matrix(MatrixSpec(family="extended", n=12)).shape == (24, 162)
    assert make_matrix(MatrixSpec(family="ternary", p=5, i=1, j=1)).shape == (20, 100)
    with pytest.raises(InvalidInput):
        make_matrix(MatrixSpec(family="unknown"))


def test_phase_transition_small():
    report = run_phase_transition(121, [22, 33], trials=20, master_seed=7)
    assert [row["m"] for row in report.rows] == [22, 33]
    assert report.rows[0]["delta"] == pytest.approx(22 / 121)
    ks = [row["k_star"] for row in report.rows]
    assert ks[0] <= ks[1]
    assert all(row["k_frac"] == pytest.approx(row["k_star"] / 121)
               for row in report.rows)


def test_phase_transition_deterministic():
    a = run_phase_transition(121, [33], trials=20, master_seed=5).to_json()
    b = run_phase_transition(121, [33], trials=20, master_seed=5).to_json()
    assert a == b


def test_phase_transition_single_trial_degenerate():
    report = run_phase_transition(121, [55], fraction=1.0, trials=1,
                                  master_seed=0)
    assert report.rows[0]["k_star"] >= 1


def test_phase_transition_rejects_bad_geometry():
    with pytest.raises(InvalidInput):
        run_phase_transition(120, [22], trials=1)
    with pytest.raises(InvalidInput):
        run_phase_transition(121, [23], trials=1)


def sparse_haar_image(n_patches_side, P, sparsity, seed):
    rng = np.random.default_rng(seed)
    patches = []
    for _ in range(n_patches_side ** 2):
        coeffs = np.zeros(P * P)
        idx = rng.choice(P * P, sparsity, replace=False)
        coeffs[idx] = rng.standard_normal(sparsity) * 10
        patches.append(haar_inverse(coeffs))
    side = n_patches_side * P
    return unpatchify(PatchGrid(side, side, P), np.stack(patches))


def test_patch_reconstruction_within_guarantee():
    # (8, 4) matrix: mu = 1/4, guarantee 2, down-sampling 64/32 = 2
    Phi = build_binary_matrix(euler_square(8, 4))
    image = sparse_haar_image(3, 8, 2, seed=1)
    recon, report = run_patch_reconstruction(image, Phi, 8)
    row = report.rows[0]
    assert row["downsampling_factor"] == pytest.approx(2.0)
    assert row["snr_db"] >= 100.0
    assert np.allclose(recon, image, atol=1e-6)


def test_patch_reconstruction_factor_echo():
    Phi = build_binary_matrix(euler_square(11, 5))
    with pytest.raises(ShapeError):
        # 121 columns cannot measure a 16x16 patch
        run_patch_reconstruction(np.zeros((16, 16)), Phi, 16)
    assert Phi.M / Phi.m == pytest.approx(2.2)
