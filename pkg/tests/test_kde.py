import numpy as np
import pytest

from multiplicity import kde_grid
from multiplicity.errors import DegenerateSpread, InputError


def _cluster(center, n=200, scale=0.01, seed=0):
    return np.asarray(center) + np.random.default_rng(seed).normal(0, scale, size=(n, 2))


def test_integral_near_one():
    pts = np.random.default_rng(1).normal(size=(150, 2)) * [0.02, 0.05] + [0.9, 0.8]
    for adjust in (0.5, 1.0):
        grid = kde_grid(pts, bw_adjust=adjust)
        assert abs(grid.integral() - 1.0) < 0.02


def test_two_symmetric_modes():
    base = _cluster([0, 0], seed=2)
    pts = np.vstack([base, [10, 10] - base])
    grid = kde_grid(pts, grid=(201, 201))
    # mirrored clusters: the reflection about (5, 5) swaps them and the grid
    np.testing.assert_allclose(grid.raw, grid.raw[::-1, ::-1], rtol=1e-9, atol=1e-12)
    left = grid.raw[:, :100].max()
    right = grid.raw[:, 101:].max()
    assert left == pytest.approx(right, rel=1e-9)
    assert grid.raw[100, 100] < 1e-6 * left


def test_unimodal_peak_at_mean():
    pts = _cluster([0.7, 0.4], n=400, seed=3)
    grid = kde_grid(pts)
    j, i = np.unravel_index(np.argmax(grid.raw), grid.raw.shape)
    step = (grid.x[1] - grid.x[0], grid.y[1] - grid.y[0])
    assert abs(grid.x[i] - pts[:, 0].mean()) < 3 * step[0] + 0.01
    assert abs(grid.y[j] - pts[:, 1].mean()) < 3 * step[1] + 0.01


def test_bandwidth_scott_times_adjust():
    pts = np.random.default_rng(4).normal(size=(64, 2))
    grid = kde_grid(pts, bw_adjust=0.5)
    expected = np.std(pts, axis=0, ddof=1) * 64 ** (-1 / 6) * 0.5
    np.testing.assert_allclose(grid.bandwidth, expected, rtol=1e-12)


def test_threshold_relative_and_absolute():
    pts = np.random.default_rng(5).normal(size=(50, 2))
    rel = kde_grid(pts, thresh=0.05)
    kept = rel.density > 0
    np.testing.assert_array_equal(kept, rel.raw >= 0.05 * rel.raw.max())
    np.testing.assert_array_equal(rel.density[kept], rel.raw[kept])
    absolute = kde_grid(pts, thresh=0.05, relative=False)
    np.testing.assert_array_equal(absolute.density > 0, absolute.raw >= 0.05)


def test_grid_shape():
    grid = kde_grid(np.random.default_rng(6).normal(size=(10, 2)), grid=(30, 20))
    assert grid.density.shape == (20, 30) and grid.x.size == 30 and grid.y.size == 20


def test_degenerate():
    with pytest.raises(DegenerateSpread):
        kde_grid([[0.5, 0.5]])
    with pytest.raises(DegenerateSpread):
        kde_grid([[0.5, 0.1], [0.5, 0.2]])
    with pytest.raises(InputError):
        kde_grid([[0.5, 0.1, 3.0]])
