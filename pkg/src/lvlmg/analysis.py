"""Closed-form spectral diagnostics for 1D Dirichlet model problems.

Mode ``l`` of a grid with ``n`` intervals is ``w_l[j] = sin(l j pi / n)``,
``j = 1..n-1``. Smooth modes have ``l < n/2``; their oscillatory companion is
``l' = n - l``. Full weighting and linear interpolation map the pair
``(w_l, w_l')`` onto the single coarse mode ``w_l^{2h}`` and back, which makes
the two-grid operator block diagonal in these pairs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .operator import CSG, CSL, UNPERTURBED, Perturbation

__all__ = [
    "RESONANCE_TOL",
    "laplacian_eigenvalue",
    "mode",
    "helmholtz_eigenvalue",
    "TwoGridModes",
    "two_grid_amplification",
    "gamma_l",
    "gamma_from_eigenvalues",
    "gamma_spectrum_table",
    "smooth_limit",
]

RESONANCE_TOL = 1e-14


def _check_mode(l: int, n: int) -> None:
    if not 1 <= l <= n - 1:
        raise ValueError(f"mode index l={l} outside 1..{n - 1}")


def laplacian_eigenvalue(l: int, n: int, h: float | None = None, d: int = 1) -> float:
    """``(4 d / h^2) sin^2(l pi / 2n)``; ``h`` defaults to ``1/n``."""
    _check_mode(l, n)
    h = 1.0 / n if h is None else h
    return 4.0 * d / h ** 2 * np.sin(l * np.pi / (2 * n)) ** 2


def mode(l: int, n: int) -> np.ndarray:
    """Discrete sine mode ``w_l`` on the ``n - 1`` interior nodes."""
    _check_mode(l, n)
    j = np.arange(1, n)
    return np.sin(l * j * np.pi / n)


def helmholtz_eigenvalue(lam_L, k: float, scheme: Perturbation = Perturbation()):
    """Eigenvalue of the (perturbed) Helmholtz operator for Laplacian eigenvalue ``lam_L``."""
    k2 = k * k
    if scheme.variant == CSG:
        return lam_L * np.exp(-1j * scheme.theta) - k2
    if scheme.variant == CSL:
        return lam_L - k2 * np.exp(1j * scheme.theta)
    return lam_L - k2 + 0j


@dataclass(frozen=True)
class TwoGridModes:
    """Action of the two-grid operator on the pair ``(w_l, w_l')``.

    ``TG w_l = alpha_smooth w_l + coupling[0] w_l'`` and
    ``TG w_l' = coupling[1] w_l + alpha_osc w_l'``.
    """

    alpha_smooth: complex
    alpha_osc: complex
    coupling: tuple
    stable: bool

    @property
    def matrix(self) -> np.ndarray:
        """Matrix of TG in the basis ``(w_l, w_l')`` (columns are images)."""
        return np.array([[self.alpha_smooth, self.coupling[1]],
                         [self.coupling[0], self.alpha_osc]])


def two_grid_amplification(l: int, n: int, scheme_fine: Perturbation,
                           scheme_coarse: Perturbation, k: float,
                           h: float | None = None, rhs_scale: complex = 1.0) -> TwoGridModes:
    """Two-grid mixing of ``(w_l, w_{n-l})`` with exact coarse solve, no smoothing.

    The coarse operator uses the rediscretized Laplacian on spacing ``2h``;
    ``rhs_scale`` multiplies the restricted residual.
    """
    if not 1 <= l < n / 2:
        raise ValueError(f"smooth mode index l={l} must satisfy 1 <= l < n/2 = {n / 2}")
    h = 1.0 / n if h is None else h
    cl = np.cos(l * np.pi / (2 * n)) ** 2
    sl = np.sin(l * np.pi / (2 * n)) ** 2
    lam = helmholtz_eigenvalue(laplacian_eigenvalue(l, n, h), k, scheme_fine)
    lam_osc = helmholtz_eigenvalue(laplacian_eigenvalue(n - l, n, h), k, scheme_fine)
    lam_H = helmholtz_eigenvalue(laplacian_eigenvalue(l, n // 2, 2 * h), k, scheme_coarse)
    if abs(lam_H) < RESONANCE_TOL:
        inf = complex(np.inf)
        return TwoGridModes(inf, inf, (inf, inf), False)
    a = rhs_scale * lam / lam_H
    b = rhs_scale * lam_osc / lam_H
    # restriction maps w_l -> c_l w^{2h} and w_l' -> -s_l w^{2h};
    # interpolation maps w^{2h} -> c_l w_l - s_l w_l'
    return TwoGridModes(1.0 - cl * cl * a, 1.0 - sl * sl * b,
                        (cl * sl * a, cl * sl * b), True)


def gamma_from_eigenvalues(lam_A, lam_At, c: complex = 1.0):
    """Perturbation-error weight ``(c lam_A - lam_At) / lam_At``."""
    return (c * lam_A - lam_At) / lam_At


def gamma_l(l: int, n_coarse: int, h_coarse: float | None, d: int, k: float,
            dtheta: float, variant: str = CSG) -> complex:
    """Weight of coarse mode ``l`` in the level-dependent perturbation error.

    CSL uses ``c = 1``; CSG uses ``c = exp(-i dtheta)``. Returns complex
    infinity when the perturbed coarse eigenvalue is (numerically) zero.
    """
    lam_L = laplacian_eigenvalue(l, n_coarse, h_coarse, d)
    return _gamma(lam_L, k, dtheta, variant)


def _gamma(lam_L, k, dtheta, variant):
    k2 = k * k
    if variant == UNPERTURBED:
        return np.zeros_like(np.asarray(lam_L, dtype=complex))[()]
    if variant == CSL:
        num = k2 * (np.exp(1j * dtheta) - 1.0)
        den = lam_L - k2 * np.exp(1j * dtheta)
    elif variant == CSG:
        num = k2 * (1.0 - np.exp(-1j * dtheta))
        den = lam_L * np.exp(-1j * dtheta) - k2
    else:
        raise ValueError(f"unknown variant {variant!r}")
    den = np.asarray(den, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(den) < RESONANCE_TOL, complex(np.inf), num / den)
    return out[()]


def smooth_limit(dtheta: float) -> complex:
    """Value ``exp(-i dtheta) - 1`` approached by the smoothest modes."""
    return np.exp(-1j * dtheta) - 1.0


def gamma_spectrum_table(n: int, k: float, dtheta: float, d: int = 1,
                         variant: str = CSG) -> list:
    """All ``gamma`` values for the coarse grid of an ``n``-interval unit-domain grid.

    Rows are ``(l, gamma)`` with ``l`` an int for ``d = 1`` and a tuple of
    per-axis indices otherwise; the coarse Laplacian eigenvalue of a tensor
    mode is the sum of its 1D eigenvalues.
    """
    nc = n // 2
    if nc < 2:
        raise ValueError(f"n={n} has no coarse-grid modes")
    hc = 1.0 / nc
    lam1 = {l: laplacian_eigenvalue(l, nc, hc) for l in range(1, nc)}
    rows = []
    for idx in itertools.product(range(1, nc), repeat=d):
        lam = sum(lam1[i] for i in idx)
        rows.append((idx[0] if d == 1 else idx, complex(_gamma(lam, k, dtheta, variant))))
    return rows
