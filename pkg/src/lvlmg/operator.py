"""Matrix-free second-order finite-difference Helmholtz operators.

The discrete Laplacian on a (possibly complex-spaced) tensor grid is the sum
over axes of the three-point stencil

    -2/(h-(h- + h+)) u[i-1] + 2/(h- h+) u[i] - 2/(h+(h- + h+)) u[i+1],

with Dirichlet nodes contributing zero. On top of the Laplacian ``L`` an
operator carries a perturbation: none (``L - k^2``), a complex shift
(``L - k^2 e^{i theta}``) or a complex grid stretch (``L e^{-i theta} - k^2``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .grid import Grid

__all__ = [
    "UNPERTURBED",
    "CSL",
    "CSG",
    "Perturbation",
    "LevelOperator",
    "apply",
    "residual",
    "diagonal",
    "dense_matrix",
    "sparse_matrix",
    "inject_k2",
    "DENSE_CAP",
]

UNPERTURBED = "unperturbed"
CSL = "csl"
CSG = "csg"
_VARIANTS = (UNPERTURBED, CSL, CSG)

DENSE_CAP = 20_000


@dataclass(frozen=True)
class Perturbation:
    """Perturbation scheme with unit modulus ``r = 1``."""

    variant: str = UNPERTURBED
    theta: float = 0.0

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown perturbation variant {self.variant!r}")
        if self.variant == UNPERTURBED and self.theta != 0.0:
            raise ValueError("the unperturbed scheme has no angle")

    @property
    def laplacian_factor(self) -> complex:
        return np.exp(-1j * self.theta) if self.variant == CSG else 1.0 + 0.0j

    @property
    def shift_factor(self) -> complex:
        return np.exp(1j * self.theta) if self.variant == CSL else 1.0 + 0.0j


def _axis_stencil(spacings: np.ndarray):
    hm, hp = spacings[:-1], spacings[1:]
    lo = -2.0 / (hm * (hm + hp))
    hi = -2.0 / (hp * (hm + hp))
    di = 2.0 / (hm * hp)
    return lo, di, hi


def _along(a: np.ndarray, axis: int, dim: int) -> np.ndarray:
    shape = [1] * dim
    shape[axis] = a.size
    return a.reshape(shape)


def inject_k2(k2, fine: Grid, coarse: Grid):
    """Sample a fine-grid ``k^2`` field at the nodes shared with ``coarse``."""
    if np.ndim(k2) == 0:
        return k2
    k2 = np.asarray(k2)
    out = k2[(slice(1, None, 2),) * fine.dim]
    assert out.shape == coarse.shape
    return out


@dataclass(frozen=True, eq=False)
class LevelOperator:
    """Helmholtz operator on one level of a hierarchy.

    ``k2`` is either a scalar or an array of shape ``grid.shape``.
    ``rhs_scale`` is the factor applied to residuals restricted onto this level.
    """

    grid: Grid
    k2: object
    scheme: Perturbation = Perturbation()
    level: int = 0
    rhs_scale: complex = 1.0 + 0.0j
    _lo: tuple = field(init=False, repr=False)
    _hi: tuple = field(init=False, repr=False)
    _diag: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        k2 = self.k2
        if np.ndim(k2) == 0:
            k2 = float(k2)
        else:
            k2 = np.asarray(k2, dtype=float)
            if k2.shape != self.grid.shape:
                raise ValueError(f"k2 shape {k2.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(k2)):
            raise ValueError("k2 must be finite")
        object.__setattr__(self, "k2", k2)
        dim, lf = self.grid.dim, self.scheme.laplacian_factor
        lo, hi, diag = [], [], 0.0
        for ax, spacings in enumerate(self.grid.spacings):
            l, d, h = _axis_stencil(spacings)
            lo.append(_along(lf * l, ax, dim))
            hi.append(_along(lf * h, ax, dim))
            diag = diag + _along(lf * d, ax, dim)
        diag = diag - self.scheme.shift_factor * k2
        object.__setattr__(self, "_lo", tuple(lo))
        object.__setattr__(self, "_hi", tuple(hi))
        object.__setattr__(self, "_diag", np.broadcast_to(diag, self.grid.shape).copy())

    @property
    def shape(self) -> tuple:
        return self.grid.shape

    @property
    def size(self) -> int:
        return self.grid.size

    @property
    def theta(self) -> float:
        return self.scheme.theta

    def with_scheme(self, scheme: Perturbation, level: int | None = None,
                    rhs_scale: complex = 1.0) -> "LevelOperator":
        return LevelOperator(self.grid, self.k2, scheme,
                             self.level if level is None else level, rhs_scale)

    def rediscretize(self, coarse: Grid, scheme: Perturbation, level: int,
                     rhs_scale: complex = 1.0) -> "LevelOperator":
        return LevelOperator(coarse, inject_k2(self.k2, self.grid, coarse),
                             scheme, level, rhs_scale)

    def matvec(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        if u.size != self.size:
            raise ValueError(f"field of size {u.size} does not match operator size {self.size}")
        v = u.reshape(self.shape)
        out = self._diag * v
        dim = self.grid.dim
        for ax in range(dim):
            head = [slice(None)] * dim
            tail = [slice(None)] * dim
            head[ax] = slice(None, -1)
            tail[ax] = slice(1, None)
            head, tail = tuple(head), tuple(tail)
            out[head] += self._hi[ax][head] * v[tail]
            out[tail] += self._lo[ax][tail] * v[head]
        return out.reshape(u.shape)

    __call__ = matvec


def apply(op: LevelOperator, u: np.ndarray) -> np.ndarray:
    return op.matvec(u)


def residual(op: LevelOperator, u: np.ndarray, b: np.ndarray) -> np.ndarray:
    b = np.asarray(b)
    if b.size != op.size:
        raise ValueError(f"rhs of size {b.size} does not match operator size {op.size}")
    return b - op.matvec(u).reshape(b.shape)


def diagonal(op: LevelOperator) -> np.ndarray:
    return op._diag.copy()


def sparse_matrix(op: LevelOperator) -> sp.csr_matrix:
    """Assemble the operator as a sparse matrix (C-order unknown numbering)."""
    shape = op.shape
    lf = op.scheme.laplacian_factor
    mat = sp.csr_matrix((op.size, op.size), dtype=complex)
    for ax, spacings in enumerate(op.grid.spacings):
        lo, di, hi = _axis_stencil(spacings)
        tri = sp.diags([lo[1:], di, hi[:-1]], [-1, 0, 1], format="csr")
        term = sp.identity(1, dtype=complex, format="csr")
        for other, n in enumerate(shape):
            term = sp.kron(term, tri if other == ax else sp.identity(n, format="csr"),
                           format="csr")
        mat = mat + lf * term
    k2 = np.broadcast_to(op.k2, shape).ravel()
    return (mat - sp.diags(op.scheme.shift_factor * k2)).tocsr()


def dense_matrix(op: LevelOperator, cap: int = DENSE_CAP) -> np.ndarray:
    if op.size > cap:
        raise ValueError(f"operator has {op.size} unknowns, above the dense cap of {cap}")
    return sparse_matrix(op).toarray()
