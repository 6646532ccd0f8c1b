"""Flexible GMRES with (optionally) restarting, for multigrid preconditioning."""

from __future__ import annotations

import time
from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla

from .cycle import ConvergenceReport, Hierarchy, WorkMeter, _Metered, precondition
from .operator import LevelOperator

__all__ = ["fgmres", "mg_preconditioner", "BREAKDOWN_TOL"]

BREAKDOWN_TOL = 1e-14


def mg_preconditioner(h: Hierarchy, meter: Optional[WorkMeter] = None) -> Callable:
    """One V-cycle from zero per call, charged to ``meter``."""
    meter = meter if meter is not None else WorkMeter()

    def apply(r):
        return precondition(h, r, meter)

    apply.meter = meter
    return apply


def _givens(a, b):
    """Complex rotation ``(c, s)`` zeroing ``b`` in ``[a, b]``."""
    if b == 0:
        return 1.0, 0.0
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    t = np.hypot(abs(a), abs(b))
    return abs(a) / t, (a / abs(a)) * np.conj(b) / t


def fgmres(op: LevelOperator, b, precond: Optional[Callable] = None,
           restart: Optional[int] = None, tol: float = 1e-7, maxiter: int = 500,
           x0=None, meter: Optional[WorkMeter] = None, callback=None):
    """Right-preconditioned flexible GMRES(``restart``) on ``op x = b``.

    ``precond`` may change from one call to the next (e.g. a V-cycle with a
    GMRES smoother). Iterations count outer Krylov steps. If ``precond`` has a
    ``meter`` attribute and ``meter`` is not given, that meter is shared so the
    report's work units cover both the matvecs and the preconditioner.
    """
    t0 = time.perf_counter()
    shape = np.shape(b)
    b = np.asarray(b, dtype=complex).ravel()
    if meter is None:
        meter = getattr(precond, "meter", None) or WorkMeter()
    A = _Metered(op, meter, 1.0)
    M = precond if precond is not None else (lambda r: r)
    m = restart or maxiter
    bnorm = float(np.linalg.norm(b))

    x = np.zeros_like(b) if x0 is None else np.asarray(x0, dtype=complex).ravel().copy()
    r = b - A(x).ravel() if x0 is not None else b.copy()
    beta = float(np.linalg.norm(r))
    history = [beta]
    if bnorm == 0.0:
        return x.reshape(shape), ConvergenceReport(0, [0.0], True, time.perf_counter() - t0, 0.0)
    converged = beta / bnorm < tol
    it = 0
    while not converged and it < maxiter:
        V = np.zeros((m + 1, b.size), dtype=complex)
        Z = np.zeros((m, b.size), dtype=complex)
        H = np.zeros((m + 1, m), dtype=complex)
        cs = np.zeros(m)
        sn = np.zeros(m, dtype=complex)
        g = np.zeros(m + 1, dtype=complex)
        g[0] = beta
        V[0] = r / beta
        j = -1
        for j in range(min(m, maxiter - it)):
            Z[j] = np.ravel(M(V[j].reshape(op.shape)))
            w = A(Z[j]).ravel()
            for i in range(j + 1):
                H[i, j] = np.vdot(V[i], w)
                w -= H[i, j] * V[i]
            H[j + 1, j] = np.linalg.norm(w)
            breakdown = abs(H[j + 1, j]) <= BREAKDOWN_TOL * beta
            if not breakdown:
                V[j + 1] = w / H[j + 1, j]
            for i in range(j):
                hi, hi1 = H[i, j], H[i + 1, j]
                H[i, j] = cs[i] * hi + sn[i] * hi1
                H[i + 1, j] = -np.conj(sn[i]) * hi + cs[i] * hi1
            cs[j], sn[j] = _givens(H[j, j], H[j + 1, j])
            H[j, j] = cs[j] * H[j, j] + sn[j] * H[j + 1, j]
            H[j + 1, j] = 0.0
            g[j + 1] = -np.conj(sn[j]) * g[j]
            g[j] = cs[j] * g[j]
            it += 1
            history.append(float(abs(g[j + 1])))
            if callback is not None:
                callback(it, history[-1])
            if breakdown or history[-1] / bnorm < tol:
                break
        k = j + 1
        y = sla.solve_triangular(H[:k, :k], g[:k])
        x = x + y @ Z[:k]
        r = b - A(x).ravel()
        beta = float(np.linalg.norm(r))
        if beta / bnorm < tol:
            converged = True
        elif breakdown:
            converged = beta / bnorm < tol
            break
        history[-1] = beta
    report = ConvergenceReport(it, history, converged, time.perf_counter() - t0, meter.units)
    return x.reshape(shape), report
