"""Full-weighting restriction and (bi-/tri-)linear interpolation.

Both transfers act axis by axis with real weights, independent of the complex
interval widths; Dirichlet neighbours are treated as zero.
"""

import numpy as np

from .grid import Grid

__all__ = ["restrict", "interpolate", "scale_rhs"]


def _restrict_axis(f, axis):
    f = np.moveaxis(f, axis, 0)
    out = 0.5 * f[1:-1:2]
    out += 0.25 * f[0:-2:2]
    out += 0.25 * f[2::2]
    return np.moveaxis(out, 0, axis)


def _interpolate_axis(c, axis, n_fine):
    c = np.moveaxis(c, axis, 0)
    out = np.zeros((n_fine,) + c.shape[1:], dtype=np.result_type(c, float))
    out[1::2] = c
    out[2:-1:2] = 0.5 * (c[:-1] + c[1:])
    out[0] = 0.5 * c[0]
    out[-1] = 0.5 * c[-1]
    return np.moveaxis(out, 0, axis)


def _check(field, grid):
    if np.size(field) != grid.size:
        raise ValueError(f"field of size {np.size(field)} does not match grid size {grid.size}")


def restrict(fine, fine_grid: Grid, coarse_grid: Grid):
    _check(fine, fine_grid)
    out = np.asarray(fine).reshape(fine_grid.shape)
    for ax in range(fine_grid.dim):
        out = _restrict_axis(out, ax)
    return out.reshape(coarse_grid.shape)


def interpolate(coarse, coarse_grid: Grid, fine_grid: Grid):
    _check(coarse, coarse_grid)
    out = np.asarray(coarse).reshape(coarse_grid.shape)
    for ax, n in enumerate(fine_grid.shape):
        out = _interpolate_axis(out, ax, n)
    return out


def scale_rhs(r_coarse, c):
    if c == 1:
        return r_coarse
    return c * r_coarse
