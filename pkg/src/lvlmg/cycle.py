"""Level-dependent multigrid hierarchies and V-cycles.

Level ``m`` (0 = finest) of a level-dependent hierarchy carries the angle
``theta_m = m * dtheta`` with ``dtheta = theta_max / p`` for a hierarchy of
``p`` levels, so the finest level is the original Helmholtz problem. With the
CSG variant the restricted residual is multiplied by ``exp(-i dtheta)``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .grid import ConfigurationError, Grid, coarsen_grid
from .operator import CSG, CSL, UNPERTURBED, LevelOperator, Perturbation, dense_matrix
from .smoother import GmresM, SmootherSpec, smooth
from .transfer import interpolate, restrict, scale_rhs

__all__ = [
    "ThetaSchedule",
    "CycleConfig",
    "Hierarchy",
    "ConvergenceReport",
    "WorkMeter",
    "SingularCoarseLevel",
    "build_hierarchy",
    "vcycle",
    "solve",
    "precondition",
    "DTHETA_BOUND",
]

DTHETA_BOUND = np.pi / 3


class SingularCoarseLevel(np.linalg.LinAlgError):
    """The coarsest-level matrix is singular."""


@dataclass(frozen=True)
class ThetaSchedule:
    theta_max: float
    p: int
    fixed: bool = False

    def __post_init__(self):
        if self.p < 1:
            raise ConfigurationError("a hierarchy needs at least one level")
        if not self.fixed and self.dtheta >= DTHETA_BOUND:
            raise ConfigurationError(
                f"per-level angle dtheta = theta_max/p = {self.dtheta:.6g} must stay "
                f"below pi/3 = {DTHETA_BOUND:.6g}")

    @property
    def dtheta(self) -> float:
        return 0.0 if self.fixed else self.theta_max / self.p

    @property
    def angles(self) -> list:
        if self.fixed:
            return [float(self.theta_max)] * self.p
        return [m * self.dtheta for m in range(self.p)]


@dataclass(frozen=True)
class CycleConfig:
    """Multigrid cycle options.

    ``fixed_angle`` builds the classical CSG preconditioner hierarchy with
    ``theta_max`` on every level instead of the level-dependent schedule.
    """

    nu1: int = 1
    nu2: int = 1
    smoother: SmootherSpec = GmresM(3)
    variant: str = CSG
    rhs_scaling: Optional[bool] = None
    theta_max: float = np.pi / 6
    max_levels: Optional[int] = None
    fixed_angle: bool = False

    def __post_init__(self):
        if self.nu1 < 0 or self.nu2 < 0 or self.nu1 + self.nu2 < 1:
            raise ConfigurationError("need nu1, nu2 >= 0 and nu1 + nu2 >= 1")
        if self.variant not in (UNPERTURBED, CSL, CSG):
            raise ConfigurationError(f"unknown variant {self.variant!r}")
        if self.max_levels is not None and self.max_levels < 2:
            raise ConfigurationError("max_levels must be at least 2")

    @property
    def scales_rhs(self) -> bool:
        if self.variant != CSG:
            return False
        return True if self.rhs_scaling is None else bool(self.rhs_scaling)


@dataclass
class WorkMeter:
    """Operator applications weighted by level size relative to the finest level."""

    units: float = 0.0


class _Metered:
    __slots__ = ("op", "meter", "weight")

    def __init__(self, op, meter, weight):
        self.op, self.meter, self.weight = op, meter, weight

    def __call__(self, u):
        self.meter.units += self.weight
        return self.op.matvec(u)

    matvec = __call__

    def __getattr__(self, name):
        return getattr(self.op, name)


@dataclass(frozen=True, eq=False)
class Hierarchy:
    levels: tuple
    schedule: ThetaSchedule
    config: CycleConfig
    base: LevelOperator           # unperturbed finest operator
    _lu: tuple = field(repr=False)

    @property
    def p(self) -> int:
        return len(self.levels)

    @property
    def grids(self) -> list:
        return [op.grid for op in self.levels]

    def weight(self, m: int) -> float:
        return self.levels[m].size / self.levels[0].size


@dataclass
class ConvergenceReport:
    iterations: int
    residual_history: list
    converged: bool
    wall_seconds: float
    work_units: float

    @property
    def rhs_norm(self) -> float:
        return self.residual_history[0]

    @property
    def relative_residuals(self) -> list:
        b = self.residual_history[0]
        return [r / b if b else 0.0 for r in self.residual_history]

    @property
    def final_rel_residual(self) -> float:
        return self.relative_residuals[-1]


def _fine_operator(problem) -> LevelOperator:
    if isinstance(problem, LevelOperator):
        return problem.with_scheme(Perturbation(), level=0)
    return LevelOperator(problem.grid, problem.k2)


def build_hierarchy(problem, config: CycleConfig = CycleConfig()) -> Hierarchy:
    """Coarsen the problem grid as far as possible and rediscretize on every level.

    ``problem`` is anything with ``grid`` and ``k2`` attributes (or a
    :class:`LevelOperator`).
    """
    base = _fine_operator(problem)
    grids = [base.grid]
    cap = config.max_levels or np.inf
    while len(grids) < cap and grids[-1].coarsenable():
        grids.append(coarsen_grid(grids[-1]))
    if len(grids) < 2:
        raise ConfigurationError("the finest grid cannot be coarsened")
    p = len(grids)
    theta_max = 0.0 if config.variant == UNPERTURBED else config.theta_max
    schedule = ThetaSchedule(theta_max, p, fixed=config.fixed_angle)
    angles = schedule.angles
    levels = []
    for m, (g, theta) in enumerate(zip(grids, angles)):
        if config.variant == UNPERTURBED:
            scheme = Perturbation()
        else:
            scheme = Perturbation(config.variant, theta)
        c = 1.0 + 0.0j
        if m > 0 and config.scales_rhs:
            c = np.exp(-1j * (angles[m] - angles[m - 1]))
        if m == 0:
            levels.append(LevelOperator(g, base.k2, scheme, 0, 1.0))
        else:
            levels.append(levels[-1].rediscretize(g, scheme, m, c))
    lu = sla.lu_factor(dense_matrix(levels[-1]), check_finite=True)
    if np.any(np.abs(np.diag(lu[0])) == 0):
        raise SingularCoarseLevel("coarsest-level operator is singular")
    return Hierarchy(tuple(levels), schedule, config, base, lu)


def _coarse_solve(h: Hierarchy, b):
    x = sla.lu_solve(h._lu, np.ravel(b))
    return x.reshape(np.shape(b))


def _vcycle(h: Hierarchy, m: int, x, b, r, meter: WorkMeter):
    """One V-cycle on level ``m``. ``r`` is ``b - A_m x`` if already known.

    Returns ``(x, r)`` where ``r`` is the updated residual or None.
    """
    op = h.levels[m]
    if m == h.p - 1:
        if x is None:
            return _coarse_solve(h, b), None
        if r is None:
            r = b - _Metered(op, meter, h.weight(m))(x)
        return x + _coarse_solve(h, r), None
    cfg = h.config
    A = _Metered(op, meter, h.weight(m))
    if x is None:
        x = np.zeros_like(b)
        r = b
    for _ in range(cfg.nu1):
        x, r = smooth(A, x, b, cfg.smoother, r=r, return_residual=True)
    if r is None:
        r = b - A(x)
    fine, coarse = op.grid, h.levels[m + 1].grid
    rc = scale_rhs(restrict(r, fine, coarse), h.levels[m + 1].rhs_scale)
    ec, _ = _vcycle(h, m + 1, None, rc, None, meter)
    x = x + interpolate(ec, coarse, fine)
    r = None
    for _ in range(cfg.nu2):
        x, r = smooth(A, x, b, cfg.smoother, r=r, return_residual=True)
    return x, r


def vcycle(h: Hierarchy, m: int, x, b, meter: Optional[WorkMeter] = None):
    if not 0 <= m < h.p:
        raise ValueError(f"level {m} outside hierarchy of {h.p} levels")
    b = np.asarray(b, dtype=complex).reshape(h.levels[m].shape)
    x = np.asarray(x, dtype=complex).reshape(b.shape)
    out, _ = _vcycle(h, m, x, b, None, meter or WorkMeter())
    return out


def precondition(h: Hierarchy, r, meter: Optional[WorkMeter] = None):
    """One V-cycle from a zero initial guess on the finest level."""
    shape = np.shape(r)
    b = np.asarray(r, dtype=complex).reshape(h.levels[0].shape)
    z, _ = _vcycle(h, 0, None, b, None, meter or WorkMeter())
    return z.reshape(shape)


def solve(h: Hierarchy, b, tol: float = 1e-7, maxiter: int = 500, x0=None,
          callback=None):
    """Repeat V-cycles until ``||b - A x|| / ||b|| < tol`` with the original operator.

    Returns ``(x, ConvergenceReport)``; non-convergence is reported, not raised.
    """
    t0 = time.perf_counter()
    shape = np.shape(b)
    b = np.asarray(b, dtype=complex).reshape(h.base.shape)
    meter = WorkMeter()
    A = _Metered(h.base, meter, 1.0)
    # reuse the level-0 smoother residual only when level 0 is the original operator
    exact_fine = h.levels[0].scheme.theta == 0.0
    bnorm = float(np.linalg.norm(b))
    if x0 is None:
        x = np.zeros_like(b)
        r = b.copy()
    else:
        x = np.asarray(x0, dtype=complex).reshape(b.shape).copy()
        r = b - A(x)
    history = [float(np.linalg.norm(r))]
    if bnorm == 0.0:
        return x.reshape(shape), ConvergenceReport(0, [0.0], True, time.perf_counter() - t0, 0.0)
    converged = history[0] / bnorm < tol
    it = 0
    while not converged and it < maxiter:
        x, r = _vcycle(h, 0, x, b, r if exact_fine else None, meter)
        if r is None or not exact_fine:
            r = b - A(x)
        it += 1
        rn = float(np.linalg.norm(r))
        if rn / bnorm < tol:
            # confirm with an explicitly computed residual
            r = b - A(x)
            rn = float(np.linalg.norm(r))
            converged = rn / bnorm < tol
        history.append(rn)
        if callback is not None:
            callback(it, x)
        if not np.isfinite(rn):
            break
    report = ConvergenceReport(it, history, converged, time.perf_counter() - t0, meter.units)
    return x.reshape(shape), report
