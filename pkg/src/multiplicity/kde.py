"""Gridded 2-D Gaussian kernel density estimates for scatter data.

Used to draw validation-versus-test performance densities of a Rashomon set.
The kernel is a product of two Gaussians whose per-axis bandwidth is Scott's
factor ``n ** (-1/6)`` times the axis standard deviation, scaled by
``bw_adjust``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpread, InputError


@dataclass(frozen=True)
class KdeGrid:
    """Density evaluated on a regular grid.

    ``density[j, i]`` is the density at ``(x[i], y[j])``; ``raw`` holds the
    values before thresholding.
    """

    x: np.ndarray
    y: np.ndarray
    density: np.ndarray
    raw: np.ndarray
    bandwidth: tuple
    bw_adjust: float
    thresh: float
    relative: bool

    @property
    def cell_area(self) -> float:
        return float((self.x[1] - self.x[0]) * (self.y[1] - self.y[0]))

    def integral(self) -> float:
        """Riemann sum of the unthresholded density."""
        return float(self.raw.sum() * self.cell_area)


def scott_bandwidth(values: np.ndarray, dims: int = 2) -> float:
    return float(np.std(values, ddof=1) * values.size ** (-1.0 / (dims + 4)))


def kde_grid(points, bw_adjust: float = 0.5, grid=(200, 200), thresh: float = 0.05,
             relative: bool = True, cut: float = 3.0) -> KdeGrid:
    """Evaluate a 2-D KDE of ``points`` (shape ``(n, 2)``) on a grid.

    The grid spans the data range padded by ``cut`` bandwidths on each side.
    Densities below ``thresh * max`` (``relative=True``) or below ``thresh``
    (``relative=False``) are set to zero in ``density``.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2:
        raise InputError("points must have shape (n, 2)")
    if points.shape[0] < 2:
        raise DegenerateSpread("a KDE needs at least two points")
    if not np.all(np.isfinite(points)):
        raise InputError("points must be finite")
    if bw_adjust <= 0:
        raise InputError("bw_adjust must be positive")
    nx, ny = (int(g) for g in grid)
    if nx < 2 or ny < 2:
        raise InputError("grid needs at least 2 x 2 cells")
    x, y = points[:, 0], points[:, 1]
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise DegenerateSpread("points need non-zero spread in both coordinates")
    hx = scott_bandwidth(x) * bw_adjust
    hy = scott_bandwidth(y) * bw_adjust
    gx = np.linspace(x.min() - cut * hx, x.max() + cut * hx, nx)
    gy = np.linspace(y.min() - cut * hy, y.max() + cut * hy, ny)
    kx = np.exp(-0.5 * ((gx[None, :] - x[:, None]) / hx) ** 2) / (hx * np.sqrt(2 * np.pi))
    ky = np.exp(-0.5 * ((gy[None, :] - y[:, None]) / hy) ** 2) / (hy * np.sqrt(2 * np.pi))
    raw = ky.T @ kx / points.shape[0]
    level = thresh * raw.max() if relative else thresh
    density = np.where(raw >= level, raw, 0.0)
    return KdeGrid(gx, gy, density, raw, (hx, hy), float(bw_adjust), float(thresh), bool(relative))
