"""
Validation versus test performance
==================================

A gridded kernel density estimate of (validation accuracy, test accuracy)
pairs, as used to draw contour plots of a Rashomon set.  Rendering is left to
any plotting tool; here the grid is summarised numerically.
"""

import numpy as np

from multiplicity import SynthConfig, generate, kde_grid

rset = generate(SynthConfig(200, 2000, 3, 0.8, 0.3, rng_seed=11, n_val_samples=1000))
points = np.array([[r.val_metric, r.test_metric] for r in rset.records])

grid = kde_grid(points, bw_adjust=0.5, grid=(200, 200), thresh=0.05)
j, i = np.unravel_index(np.argmax(grid.raw), grid.raw.shape)
print(f"bandwidths {grid.bandwidth[0]:.5f}, {grid.bandwidth[1]:.5f}")
print(f"mode at val={grid.x[i]:.4f}, test={grid.y[j]:.4f}")
print(f"integral before thresholding {grid.integral():.4f}")
print(f"cells above 5% of the peak: {np.count_nonzero(grid.density)} of {grid.density.size}")
