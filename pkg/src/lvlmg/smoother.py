"""Relaxation schemes: weighted Jacobi, fixed polynomials and GMRES(m)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .operator import LevelOperator, diagonal

__all__ = [
    "WeightedJacobi",
    "Polynomial",
    "GmresM",
    "SmootherSpec",
    "PolynomialReport",
    "smooth",
    "gmres_correction",
    "smoothing_polynomial_check",
    "BREAKDOWN_TOL",
]

BREAKDOWN_TOL = 1e-14


@dataclass(frozen=True)
class WeightedJacobi:
    omega: complex = 2.0 / 3.0
    sweeps: int = 1

    def __post_init__(self):
        if self.sweeps < 1:
            raise ValueError("weighted Jacobi needs at least one sweep")


@dataclass(frozen=True)
class Polynomial:
    """Fixed smoothing polynomial ``p(t) = 1 + sum_i coeffs[i-1] t^i``.

    The error after one application is ``p(A) e``.
    """

    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ValueError("polynomial smoother needs degree >= 1")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    @classmethod
    def from_roots(cls, roots: Sequence[complex]) -> "Polynomial":
        """Polynomial ``prod_i (1 - t / roots[i])``, normalised so ``p(0) = 1``."""
        # np.poly lists prod(s - 1/r_i) highest power first, which is
        # prod(1 - t/r_i) lowest power first
        c = np.poly(1.0 / np.asarray(roots, dtype=complex))
        return cls(tuple(c[1:]))

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        out = np.zeros_like(t)
        for c in reversed(self.coeffs):
            out = (out + c) * t
        return 1.0 + out


@dataclass(frozen=True)
class GmresM:
    m: int = 3

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("GMRES smoother needs m >= 1")


SmootherSpec = Union[WeightedJacobi, Polynomial, GmresM]


def gmres_correction(A, r0: np.ndarray, m: int, breakdown_tol: float = BREAKDOWN_TOL):
    """Run ``m`` un-restarted GMRES steps on ``A e = r0`` from ``e = 0``.

    Returns ``(e, r)`` with ``r = r0 - A e`` obtained from the Arnoldi relation,
    so no extra operator application is needed.
    """
    beta = np.linalg.norm(r0)
    if beta == 0.0:
        return np.zeros_like(r0), r0.copy()
    V = np.empty((m + 1,) + r0.shape, dtype=np.result_type(r0, complex))
    H = np.zeros((m + 1, m), dtype=complex)
    V[0] = r0 / beta
    k = m
    for j in range(m):
        w = A(V[j])
        for i in range(j + 1):
            H[i, j] = np.vdot(V[i], w)
            w -= H[i, j] * V[i]
        H[j + 1, j] = np.linalg.norm(w)
        if H[j + 1, j].real <= breakdown_tol * beta:
            k = j + 1
            break
        V[j + 1] = w / H[j + 1, j]
    Hk = H[:k + 1, :k]
    rhs = np.zeros(k + 1, dtype=complex)
    rhs[0] = beta
    y = np.linalg.lstsq(Hk, rhs, rcond=None)[0]
    e = np.tensordot(y, V[:k], axes=1)
    r = r0 - np.tensordot(Hk @ y, V[:k + 1], axes=1)
    return e, r


def smooth(op: LevelOperator, x, b, spec: SmootherSpec, r=None, return_residual=False):
    """Apply one smoothing step to ``op x = b``.

    ``r`` may pass a known residual ``b - op x`` to save an operator application.
    With ``return_residual`` the updated residual is returned as well; it is
    exact up to rounding for every scheme.
    """
    if np.size(x) != op.size or np.size(b) != op.size:
        raise ValueError("field sizes do not match the operator")
    if isinstance(spec, GmresM):
        if r is None:
            r = b - op(x)
        e, r = gmres_correction(op, r, spec.m)
        x = x + e
    elif isinstance(spec, WeightedJacobi):
        dinv = spec.omega / diagonal(op).reshape(np.shape(x))
        for _ in range(spec.sweeps):
            if r is None:
                r = b - op(x)
            x = x + dinv * r
            r = None
    elif isinstance(spec, Polynomial):
        if r is None:
            r = b - op(x)
        # q(t) = -(p(t) - 1) / t, evaluated by Horner on r
        c = spec.coeffs
        s = c[-1] * r
        for ci in reversed(c[:-1]):
            s = op(s) + ci * r
        x = x - s
        r = None
    else:
        raise TypeError(f"unknown smoother spec {spec!r}")
    if return_residual:
        return x, (b - op(x) if r is None else r)
    return x


@dataclass(frozen=True)
class PolynomialReport:
    stable: bool
    max_modulus: float
    oscillatory_root_gap: float


def smoothing_polynomial_check(spec: SmootherSpec, spectrum, diag: complex = 1.0) -> PolynomialReport:
    """Evaluate the smoothing polynomial of ``spec`` over ``spectrum``.

    For weighted Jacobi the polynomial is ``1 - omega t / diag`` (constant
    diagonal). The oscillatory gap is ``|p|`` at the rightmost eigenvalue.
    """
    lam = np.atleast_1d(np.asarray(spectrum, dtype=complex))
    if lam.size == 0:
        raise ValueError("empty spectrum")
    if isinstance(spec, WeightedJacobi):
        vals = (1.0 - spec.omega * lam / diag) ** spec.sweeps
    elif isinstance(spec, Polynomial):
        vals = spec(lam)
    else:
        raise TypeError("GMRES(m) has no fixed smoothing polynomial")
    mod = np.abs(vals)
    top = int(np.argmax(lam.real))
    return PolynomialReport(bool(np.all(mod < 1.0)), float(mod.max()), float(mod[top]))
